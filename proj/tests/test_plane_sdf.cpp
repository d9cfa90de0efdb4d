#include <catch2/catch_amalgamated.hpp>

#include "planesdf/plane_sdf.hpp"
#include "test_helpers.hpp"

using namespace planesdf;

namespace {

const std::string kDir = testutil::temp_dir("plane_sdf");

DetectedPlane ground_plane(const PointCloud& cloud, double tol = 0.01) {
  DetectedPlane plane;
  plane.pose = {Vec3(0, 0, 1), 0.0};
  for (std::size_t i = 0; i < cloud.size(); ++i)
    if (std::abs(cloud.points[i].z()) <= tol) plane.inliers.push_back(static_cast<int>(i));
  return plane;
}

FusionParams default_fusion() { return {}; }

// Independent 8-connectivity labeling by brute-force label propagation:
// sweep until no label can be lowered.
Grid2<int32_t> flood_oracle(const Grid2<uint8_t>& fg) {
  const int nx = fg.nx(), ny = fg.ny();
  Grid2<int32_t> lab(nx, ny, 0);
  int next = 1;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x)
      if (fg.at(x, y)) lab.at(x, y) = next++;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        if (!fg.at(x, y)) continue;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int px = x + dx, py = y + dy;
            if (!fg.in_bounds(px, py) || !fg.at(px, py)) continue;
            if (lab.at(px, py) < lab.at(x, y)) {
              lab.at(x, y) = lab.at(px, py);
              changed = true;
            }
          }
      }
  }
  return lab;
}

}  // namespace

TEST_CASE("flat plane fuses to an all-zero height map with no blobs") {
  std::mt19937_64 rng(1);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 0.5, 0, 0.5, 0.0, 20000);
  const PlaneSdf ps = instantiate(cloud, ground_plane(cloud), default_fusion());

  std::size_t observed = 0, nonzero = 0;
  for (const double h : ps.height_map.values.data()) {
    if (h >= 0.0) ++observed;
    if (h > 0.0) ++nonzero;
  }
  CHECK(observed > 4000);
  CHECK(nonzero == 0);
  CHECK(ps.object_map.blobs.empty());
  // Cells outside the sampled footprint are unobserved.
  CHECK(ps.height_map.values.at(0, 0) == -1.0);
}

TEST_CASE("a box on the plane forms one blob at its height") {
  std::mt19937_64 rng(2);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, -0.3, 0.3, -0.3, 0.3, 0.0, 30000);
  testutil::add_box(cloud, rng, 0.0, 0.0, 0.0, 0.12, 0.12, 0.10, 800);
  const PlaneSdf ps = instantiate(cloud, ground_plane(cloud), default_fusion());

  REQUIRE(ps.object_map.blobs.size() == 1);
  double max_h = 0.0;
  for (const Cell& c : ps.object_map.blobs[0].cells)
    max_h = std::max(max_h, ps.height_map.values.at(c.x, c.y));
  CHECK(max_h == Catch::Approx(0.10).margin(default_fusion().voxel_size));

  // Height/object map consistency: labeled cells are exactly the H > 0 cells.
  for (int y = 0; y < ps.height_map.ny(); ++y)
    for (int x = 0; x < ps.height_map.nx(); ++x) {
      const bool labeled = ps.object_map.labels.at(x, y) > 0;
      const bool positive = ps.height_map.values.at(x, y) > 0.0;
      REQUIRE(labeled == positive);
    }
}

TEST_CASE("points above the fusing band never influence the volume") {
  std::mt19937_64 rng(3);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 0.4, 0, 0.4, 0.0, 15000);
  const PlaneSdf base = instantiate(cloud, ground_plane(cloud), default_fusion());

  PointCloud extra = cloud;
  extra.append({0.2, 0.2, 0.35});                       // beyond the 0.3 band
  extra.append({0.2, 0.2, 0.3 + 1e-9});                 // just beyond
  const PlaneSdf with = instantiate(extra, ground_plane(extra), default_fusion());

  REQUIRE(with.volume.phi.data() == base.volume.phi.data());
  REQUIRE(with.volume.weight.data() == base.volume.weight.data());
}

TEST_CASE("refusing the same cloud is bit-identical") {
  std::mt19937_64 rng(4);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 0.4, 0, 0.4, 0.0, 10000);
  testutil::add_box(cloud, rng, 0.2, 0.2, 0.0, 0.08, 0.08, 0.15, 400);
  const PlaneSdf a = instantiate(cloud, ground_plane(cloud), default_fusion());
  const PlaneSdf b = instantiate(cloud, ground_plane(cloud), default_fusion());
  CHECK(a.volume.phi == b.volume.phi);
  CHECK(a.volume.weight == b.volume.weight);
}

TEST_CASE("adding points above a cell never lowers its height") {
  std::mt19937_64 rng(5);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 0.3, 0, 0.3, 0.0, 8000);
  const PlaneSdf before = instantiate(cloud, ground_plane(cloud), default_fusion());

  PointCloud more = cloud;
  for (int i = 0; i < 50; ++i)
    more.append({uniform(rng, 0.1, 0.2), uniform(rng, 0.1, 0.2), uniform(rng, 0.05, 0.25)});
  const PlaneSdf after = instantiate(more, ground_plane(more), default_fusion());

  REQUIRE(after.height_map.nx() == before.height_map.nx());
  for (int y = 0; y < before.height_map.ny(); ++y)
    for (int x = 0; x < before.height_map.nx(); ++x)
      REQUIRE(after.height_map.values.at(x, y) >= before.height_map.values.at(x, y));
}

TEST_CASE("voxel budget overflow raises a size error") {
  std::mt19937_64 rng(6);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 1, 0, 1, 0.0, 5000);
  FusionParams params;
  params.max_voxels = 1000;
  try {
    instantiate(cloud, ground_plane(cloud), params);
    FAIL("expected SizeError");
  } catch (const SizeError& e) {
    CHECK(e.required() > e.allowed());
  }
}

TEST_CASE("height map unit semantics on hand-built volumes") {
  SdfVolume vol = testutil::make_volume(4, 4, 10, [](int, int, int) { return 0.1; });

  SECTION("all unobserved means every cell is -1") {
    vol.weight = Grid3<float>(4, 4, 10, 0.0f);
    const HeightMap hm = compute_height_map(vol);
    for (const double h : hm.values.data()) CHECK(h == -1.0);
  }

  SECTION("single occupied voxel sets its column height") {
    vol.phi.at(2, 1, 3) = 0.0f;  // occupied at k = 3
    const HeightMap hm = compute_height_map(vol);
    CHECK(hm.values.at(2, 1) == Catch::Approx(3.5 * vol.voxel_size));
    CHECK(hm.values.at(0, 0) == 0.0);  // observed flat
  }

  SECTION("max rule over a column") {
    const int ka = static_cast<int>(0.02 / vol.voxel_size);
    const int kb = static_cast<int>(0.08 / vol.voxel_size) - 1;
    vol.phi.at(1, 1, ka) = 0.0f;
    vol.phi.at(1, 1, kb) = 0.0f;
    const HeightMap hm = compute_height_map(vol);
    CHECK(hm.values.at(1, 1) == Catch::Approx((kb + 0.5) * vol.voxel_size));
  }

  SECTION("occupied voxels in the bottom layer read as flat") {
    vol.phi.at(2, 2, 0) = 0.0f;
    const HeightMap hm = compute_height_map(vol);
    CHECK(hm.values.at(2, 2) == 0.0);
  }
}

TEST_CASE("label_objects splits and merges per 8-connectivity") {
  HeightMap hm;
  hm.values = Grid2<double>(9, 5, 0.0);

  SECTION("two blocks separated by a zero column") {
    for (int y = 1; y <= 3; ++y)
      for (int x = 0; x < 3; ++x) {
        hm.values.at(x, y) = 0.1;
        hm.values.at(x + 5, y) = 0.1;
      }
    const ObjectMap om = label_objects(hm);
    CHECK(om.blobs.size() == 2);
  }

  SECTION("zeros and unobserved cells give no blobs") {
    hm.values.at(1, 1) = -1.0;
    CHECK(label_objects(hm).blobs.empty());
  }

  SECTION("diagonal touch is one blob") {
    hm.values.at(1, 1) = 0.1;
    hm.values.at(2, 2) = 0.1;
    CHECK(label_objects(hm).blobs.size() == 1);
  }
}

TEST_CASE("labeling matches a brute-force flood fill on random grids") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int nx = 3 + static_cast<int>(uniform_index(rng, 20));
    const int ny = 3 + static_cast<int>(uniform_index(rng, 20));
    Grid2<uint8_t> fg(nx, ny, 0);
    HeightMap hm;
    hm.values = Grid2<double>(nx, ny, 0.0);
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x)
        if (uniform01(rng) < 0.4) {
          fg.at(x, y) = 1;
          hm.values.at(x, y) = 0.2;
        }
    const ObjectMap om = label_objects(hm);
    const Grid2<int32_t> oracle = flood_oracle(fg);

    // Same partition: cells share a label iff the oracle agrees.
    std::map<int32_t, int32_t> fwd, bwd;
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        const int32_t a = om.labels.at(x, y), b = oracle.at(x, y);
        REQUIRE((a > 0) == (b > 0));
        if (a == 0) continue;
        if (fwd.count(a)) REQUIRE(fwd[a] == b);
        if (bwd.count(b)) REQUIRE(bwd[b] == a);
        fwd[a] = b;
        bwd[b] = a;
      }
  }
}

TEST_CASE("volume serialization round trips and rejects junk") {
  std::mt19937_64 rng(8);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 0.2, 0, 0.2, 0.0, 3000);
  testutil::add_box(cloud, rng, 0.1, 0.1, 0.0, 0.05, 0.05, 0.08, 200);
  const PlaneSdf ps = instantiate(cloud, ground_plane(cloud), default_fusion());

  const std::string path = kDir + "/vol.psdf";
  save_volume(ps, path);
  const PlaneSdf back = load_volume(path);
  CHECK(back.volume.phi == ps.volume.phi);
  CHECK(back.volume.weight == ps.volume.weight);
  CHECK(back.volume.nx() == ps.volume.nx());
  CHECK(back.pose.normal.isApprox(ps.pose.normal, 1e-6));
  CHECK(back.height_map.values == ps.height_map.values);

  std::ofstream bad(kDir + "/bad.psdf", std::ios::binary);
  bad << "nope";
  bad.close();
  CHECK_THROWS_AS(load_volume(kDir + "/bad.psdf"), ParseError);

  // Truncate the body.
  {
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});
    std::ofstream out(kDir + "/cut.psdf", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_volume(kDir + "/cut.psdf"), ParseError);
}

TEST_CASE("height map exports have the documented shape") {
  HeightMap hm;
  hm.values = Grid2<double>(3, 2, 0.0);
  hm.values.at(0, 0) = -1.0;
  hm.values.at(1, 0) = 0.15;
  hm.values.at(2, 1) = 0.3;

  const std::string pgm = kDir + "/hm.pgm";
  save_height_map_pgm(hm, 0.3, pgm);
  std::ifstream in(pgm, std::ios::binary);
  std::string magic, dims;
  std::getline(in, magic);
  CHECK(magic == "P5");
  std::getline(in, dims);
  CHECK(dims == "3 2");
  std::string maxval;
  std::getline(in, maxval);
  unsigned char px[6];
  in.read(reinterpret_cast<char*>(px), 6);
  CHECK(px[0] == 0);    // unobserved
  CHECK(px[1] == 128);  // half band -> 1 + 127
  CHECK(px[5] == 255);  // full band

  const std::string csv = kDir + "/hm.csv";
  save_height_map_csv(hm, csv);
  std::ifstream csv_in(csv);
  std::string line;
  std::getline(csv_in, line);
  CHECK(line == "-1.000000,0.150000,0.000000");
}
