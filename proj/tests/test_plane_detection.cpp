#include <catch2/catch_amalgamated.hpp>

#include "planesdf/plane_detection.hpp"
#include "test_helpers.hpp"

using namespace planesdf;

namespace {

PlaneDetectionParams small_params() {
  PlaneDetectionParams p;
  p.min_inliers = 500;
  p.seed = 7;
  return p;
}

// Least-squares fit on known ground-truth membership, used as the oracle
// for recovered normals.
PlanePose lsq_oracle(const PointCloud& cloud, std::size_t begin, std::size_t end) {
  Vec3 centroid = Vec3::Zero();
  for (std::size_t i = begin; i < end; ++i) centroid += cloud.points[i];
  centroid /= static_cast<double>(end - begin);
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = begin; i < end; ++i) {
    const Vec3 q = cloud.points[i] - centroid;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  const Vec3 n = es.eigenvectors().col(0).normalized();
  return {n, n.dot(centroid)};
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized()))));
}

}  // namespace

TEST_CASE("single dominant horizontal plane") {
  std::mt19937_64 rng(1);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 1, 0, 1, 0.0, 10000);
  for (int i = 0; i < 500; ++i)
    cloud.append({uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0.1, 1.0)});

  const auto planes = detect_planes(cloud, small_params());
  REQUIRE(planes.size() == 1);
  const DetectedPlane& p = planes[0];
  CHECK(p.orientation == PlaneOrientation::Horizontal);
  CHECK(p.pose.normal.z() > 0.0);  // normalized sign
  CHECK(angle_between(p.pose.normal, Vec3(0, 0, 1)) < 1e-6);
  CHECK(std::abs(p.pose.offset) <= 1e-6);
  CHECK(p.inliers.size() >= 10000);
  for (int i : p.inliers)
    CHECK(std::abs(p.pose.signed_distance(cloud.points[i])) <= 0.01);
  CHECK(p.support_area == Catch::Approx(1.0).margin(0.2));
}

TEST_CASE("two orthogonal planes recovered within half a degree") {
  std::mt19937_64 rng(2);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 1, 0, 1, 0.0, 8000);  // z = 0
  for (int i = 0; i < 6000; ++i)                                  // x = 1
    cloud.append({1.0, uniform(rng, 0, 1), uniform(rng, 0, 1)});

  const auto planes = detect_planes(cloud, small_params());
  REQUIRE(planes.size() == 2);
  CHECK(planes[0].inliers.size() >= planes[1].inliers.size());  // sorted

  const PlanePose horiz_oracle = lsq_oracle(cloud, 0, 8000);
  const PlanePose vert_oracle = lsq_oracle(cloud, 8000, 14000);
  const double half_deg = 0.5 * M_PI / 180.0;
  CHECK(angle_between(planes[0].pose.normal, horiz_oracle.normal) < half_deg);
  CHECK(angle_between(planes[1].pose.normal, vert_oracle.normal) < half_deg);
  CHECK(planes[1].orientation == PlaneOrientation::Vertical);

  // Disjoint inlier sets.
  std::vector<int> all = planes[0].inliers;
  all.insert(all.end(), planes[1].inliers.begin(), planes[1].inliers.end());
  std::sort(all.begin(), all.end());
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
}

TEST_CASE("a 45 degree plane is neither horizontal nor vertical") {
  std::mt19937_64 rng(3);
  PointCloud cloud;
  for (int i = 0; i < 8000; ++i) {
    const double u = uniform(rng, 0, 1), v = uniform(rng, 0, 1);
    cloud.append({u, v, u});  // plane z = x, tilted 45 degrees
  }
  CHECK(detect_planes(cloud, small_params()).empty());
}

TEST_CASE("detection is deterministic for a fixed seed") {
  std::mt19937_64 rng(4);
  PointCloud cloud;
  testutil::add_plane_patch(cloud, rng, 0, 1, 0, 1, 0.0, 5000);
  testutil::add_plane_patch(cloud, rng, 0, 1, 0, 1, 0.4, 3000);
  for (int i = 0; i < 800; ++i)
    cloud.append({uniform(rng, 0, 1), uniform(rng, 0, 1), uniform(rng, 0.05, 0.35)});

  const auto a = detect_planes(cloud, small_params());
  const auto b = detect_planes(cloud, small_params());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].inliers == b[i].inliers);
    CHECK(a[i].pose.normal == b[i].pose.normal);
  }
}

TEST_CASE("empty cloud is a precondition violation") {
  CHECK_THROWS_AS(detect_planes(PointCloud{}, small_params()), ValidationError);
}

TEST_CASE("normalize_pose canonicalizes scale and sign") {
  const PlanePose a = normalize_pose({Vec3(0, 0, -2), -2});
  CHECK(a.normal == Vec3(0, 0, 1));
  CHECK(a.offset == Catch::Approx(1.0));

  const PlanePose b = normalize_pose({Vec3(0, 0, 1), 0.5});
  CHECK(b.normal == Vec3(0, 0, 1));
  CHECK(b.offset == Catch::Approx(0.5));

  const PlanePose c = normalize_pose({Vec3(-1, 0, 0), 3});
  CHECK(c.normal == Vec3(1, 0, 0));
  CHECK(c.offset == Catch::Approx(-3.0));

  CHECK_THROWS_AS(normalize_pose({Vec3::Zero(), 1.0}), ValidationError);
}
