#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "planesdf/io.hpp"
#include "planesdf/synthetic.hpp"
#include "test_helpers.hpp"

using namespace planesdf;

namespace {
const std::string kDir = testutil::temp_dir("scene_io");

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
}
}  // namespace

TEST_CASE("ply reader parses a small ascii file") {
  const std::string path = kDir + "/three.ply";
  write_file(path,
             "ply\nformat ascii 1.0\ncomment test\nelement vertex 3\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n"
             "0 0 0\n1 0 0\n0.5 2.5 -1\n");
  const PointCloud cloud = load_point_cloud(path, CloudFormat::PlyAscii);
  REQUIRE(cloud.size() == 3);
  CHECK(cloud.points[2] == Vec3(0.5, 2.5, -1.0));
  CHECK_FALSE(cloud.has_colors());
}

TEST_CASE("ply reader keeps colors and labels") {
  const std::string path = kDir + "/colored.ply";
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float x\nproperty float y\nproperty float z\n"
             "property uchar red\nproperty uchar green\nproperty uchar blue\n"
             "property int object_id\nend_header\n"
             "0 0 0 255 0 0 4\n1 1 1 0 255 0 9\n");
  const PointCloud cloud = load_ply_ascii(path);
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.colors[0] == Rgb{255, 0, 0});
  CHECK(cloud.labels[1] == 9);
}

TEST_CASE("empty csv yields an empty cloud") {
  const std::string path = kDir + "/empty.csv";
  write_file(path, "");
  CHECK(load_point_cloud(path, CloudFormat::XyzCsv).size() == 0);
}

TEST_CASE("csv reader skips comments and reads colors") {
  const std::string path = kDir + "/pts.csv";
  write_file(path, "# header\n1,2,3\n4,5,6,10,20,30\n");
  const PointCloud cloud = load_xyz_csv(path);
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.points[0] == Vec3(1, 2, 3));
  CHECK(cloud.colors[1] == Rgb{10, 20, 30});
}

TEST_CASE("truncated ply is a parse error with a line number") {
  const std::string path = kDir + "/short.ply";
  write_file(path,
             "ply\nformat ascii 1.0\nelement vertex 5\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n"
             "0 0 0\n1 1 1\n2 2 2\n3 3 3\n");
  try {
    load_ply_ascii(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 7);
    CHECK(std::string(e.what()).find("4 of 5") != std::string::npos);
  }
}

TEST_CASE("malformed inputs raise parse errors") {
  const std::string bad_header = kDir + "/bad1.ply";
  write_file(bad_header, "elf\nformat ascii 1.0\nend_header\n");
  CHECK_THROWS_AS(load_ply_ascii(bad_header), ParseError);

  const std::string bad_value = kDir + "/bad2.csv";
  write_file(bad_value, "1,2,zebra\n");
  CHECK_THROWS_AS(load_xyz_csv(bad_value), ParseError);

  const std::string bad_fields = kDir + "/bad3.csv";
  write_file(bad_fields, "1,2\n");
  CHECK_THROWS_AS(load_xyz_csv(bad_fields), ParseError);

  CHECK_THROWS_AS(load_ply_ascii(kDir + "/missing.ply"), IoError);
}

TEST_CASE("save then load round trips within text precision") {
  std::mt19937_64 rng(42);
  PointCloud cloud;
  for (int i = 0; i < 100; ++i)
    cloud.append({uniform(rng, -5, 5), uniform(rng, -5, 5), uniform(rng, -5, 5)},
                 {static_cast<uint8_t>(i), 7, 9});
  for (const char* name : {"roundtrip.ply", "roundtrip.csv"}) {
    const std::string path = kDir + "/" + name;
    save_point_cloud(cloud, path);
    const PointCloud back = load_point_cloud(path);
    REQUIRE(back.size() == cloud.size());
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i)
      max_dev = std::max(max_dev, (back.points[i] - cloud.points[i]).cwiseAbs().maxCoeff());
    CHECK(max_dev <= 1e-6);
    CHECK(back.colors == cloud.colors);
  }
}

TEST_CASE("saving an empty cloud produces a valid file") {
  const std::string path = kDir + "/empty_out.ply";
  save_ply_ascii(PointCloud{}, path);
  CHECK(load_ply_ascii(path).size() == 0);
}

TEST_CASE("saving to an unwritable path fails") {
  CHECK_THROWS_AS(save_ply_ascii(PointCloud{}, "/nonexistent_dir_xyz/out.ply"), IoError);
}

TEST_CASE("generator is deterministic and scenario kinds are consistent") {
  const SyntheticScenario sc = make_tabletop_scenario(ScenarioKind::Swap, 11);
  REQUIRE(sc.changed_ids == std::vector<int>{0, 1});
  const ScenePair a = generate_scene_pair(sc, 11);
  const ScenePair b = generate_scene_pair(sc, 11);
  REQUIRE(a.source.points == b.source.points);
  REQUIRE(a.target.points == b.target.points);

  // Swap: both objects changed in both directions.
  auto labels_of = [](const PointCloud& pc) {
    std::vector<int32_t> l = pc.labels;
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    return l;
  };
  CHECK(labels_of(a.gt_source) == std::vector<int32_t>{0, 1});
  CHECK(labels_of(a.gt_target) == std::vector<int32_t>{0, 1});
}

TEST_CASE("unchanged scenario with one seed gives identical clouds") {
  const SyntheticScenario sc = make_tabletop_scenario(ScenarioKind::Unchanged, 3);
  const ScenePair pair = generate_scene_pair(sc, 3);
  REQUIRE(pair.source.points == pair.target.points);
  CHECK(pair.gt_source.empty());
  CHECK(pair.gt_target.empty());
}

TEST_CASE("remove scenario wipes the object from the target") {
  SyntheticScenario sc = make_tabletop_scenario(ScenarioKind::Remove, 5);
  sc.noise_sigma = 0.002;
  const ScenePair pair = generate_scene_pair(sc, 5);
  const ObjectSpec& removed = sc.objects[0];
  REQUIRE(removed.in_source);
  REQUIRE_FALSE(removed.in_target);
  CHECK(pair.gt_source.size() > 100);
  CHECK(pair.gt_target.empty());

  // No target point may remain in the removed object's inflated bounding
  // box. The box bottom starts 3 sigma above the tabletop: the support
  // plane under the object is legitimately revealed in the target.
  const double s3 = 3.0 * sc.noise_sigma;
  const double r = removed.footprint_radius() + s3;
  const double z_lo = sc.table_height + s3;
  const double z_hi = sc.table_height + removed.height() + s3;
  for (const Vec3& p : pair.target.points) {
    if (p.z() <= z_lo || p.z() > z_hi) continue;
    const bool inside = std::abs(p.x() - removed.source_pose.x) <= r &&
                        std::abs(p.y() - removed.source_pose.y) <= r;
    if (inside) {
      CAPTURE(p.x(), p.y(), p.z());
      FAIL("target point inside the removed object's inflated bounding box");
    }
  }
  // And the source does contain the object's points.
  std::size_t inside_src = 0;
  for (const Vec3& p : pair.gt_source.points)
    if (std::abs(p.x() - removed.source_pose.x) <= r &&
        std::abs(p.y() - removed.source_pose.y) <= r)
      ++inside_src;
  CHECK(inside_src == pair.gt_source.size());
}

TEST_CASE("degenerate scenarios are rejected") {
  SyntheticScenario sc = make_tabletop_scenario(ScenarioKind::Remove, 1);
  sc.objects[0].dim_a = 0.0;
  CHECK_THROWS_AS(generate_scene_pair(sc, 1), ValidationError);

  SyntheticScenario outside = make_tabletop_scenario(ScenarioKind::Unchanged, 1);
  outside.objects[0].source_pose.x = 10.0;
  outside.objects[0].target_pose.x = 10.0;
  CHECK_THROWS_AS(generate_scene_pair(outside, 1), ValidationError);

  SyntheticScenario bad_gt = make_tabletop_scenario(ScenarioKind::Unchanged, 1);
  bad_gt.changed_ids = {0};
  CHECK_THROWS_AS(generate_scene_pair(bad_gt, 1), ValidationError);
}
