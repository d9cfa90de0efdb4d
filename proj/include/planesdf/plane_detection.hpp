#ifndef PLANESDF_PLANE_DETECTION_HPP
#define PLANESDF_PLANE_DETECTION_HPP

// Horizontal/vertical plane extraction from a complete scene cloud.
// Sequential RANSAC: the dominant plane is found, its inliers removed, and
// the search repeats. Fits are refined by a least-squares (PCA) pass.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "planesdf/errors.hpp"
#include "planesdf/geometry.hpp"
#include "planesdf/point_cloud.hpp"
#include "planesdf/random.hpp"

namespace planesdf {

enum class PlaneOrientation { Horizontal, Vertical };

struct DetectedPlane {
  PlanePose pose;
  std::vector<int> inliers;   // indices into the source cloud
  PlaneOrientation orientation = PlaneOrientation::Horizontal;
  double support_area = 0.0;  // m^2, occupied-cell estimate
};

struct PlaneDetectionParams {
  double inlier_tolerance = 0.01;       // meters
  int min_inliers = 1000;
  double orientation_tolerance_deg = 10.0;
  int ransac_iterations = 200;
  int max_planes = 16;
  uint64_t seed = 1;
};

// Canonical sign/scale: unit normal, horizontal planes point up, vertical
// planes take the lexicographically larger of +-n. Offsets follow the sign
// flip so n.p = d still holds.
inline PlanePose normalize_pose(const PlanePose& pose,
                                double orientation_tolerance_deg = 10.0) {
  const double len = pose.normal.norm();
  if (len < 1e-12) throw ValidationError("normalize_pose: zero normal");
  Vec3 n = pose.normal / len;
  double d = pose.offset / len;

  const double tol = orientation_tolerance_deg * M_PI / 180.0;
  bool flip = false;
  if (std::abs(n.z()) >= std::cos(tol)) {
    flip = n.z() < 0;
  } else {
    const Vec3 neg = -n;
    flip = std::lexicographical_compare(n.data(), n.data() + 3, neg.data(), neg.data() + 3);
  }
  if (flip) {
    n = -n;
    d = -d;
  }
  return {n, d};
}

namespace detail {

inline std::optional<PlanePose> fit_plane_lsq(const PointCloud& cloud,
                                              const std::vector<int>& idx) {
  if (idx.size() < 3) return std::nullopt;
  Vec3 centroid = Vec3::Zero();
  for (int i : idx) centroid += cloud.points[i];
  centroid /= static_cast<double>(idx.size());
  Mat3 cov = Mat3::Zero();
  for (int i : idx) {
    const Vec3 q = cloud.points[i] - centroid;
    cov += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Vec3 n = es.eigenvectors().col(0);  // smallest eigenvalue
  if (n.norm() < 1e-12) return std::nullopt;
  return PlanePose{n.normalized(), n.normalized().dot(centroid)};
}

inline double support_area_estimate(const PointCloud& cloud, const std::vector<int>& idx,
                                    const PlanePose& pose) {
  // Count occupied 2 cm cells in the plane frame.
  const double cell = 0.02;
  const PlaneFrame frame = make_plane_frame(pose);
  std::vector<std::pair<int64_t, int64_t>> cells;
  cells.reserve(idx.size());
  for (int i : idx) {
    const Vec3 l = frame.to_local(cloud.points[i]);
    cells.emplace_back(static_cast<int64_t>(std::floor(l.x() / cell)),
                       static_cast<int64_t>(std::floor(l.y() / cell)));
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return static_cast<double>(cells.size()) * cell * cell;
}

}  // namespace detail

inline std::vector<DetectedPlane> detect_planes(const PointCloud& cloud,
                                                const PlaneDetectionParams& params) {
  if (cloud.empty()) throw ValidationError("detect_planes: empty cloud");

  const double tol = params.inlier_tolerance;
  const double orient = params.orientation_tolerance_deg * M_PI / 180.0;
  const double cos_h = std::cos(orient);
  const double sin_v = std::sin(orient);

  std::mt19937_64 rng(params.seed);
  std::vector<int> active(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) active[i] = static_cast<int>(i);

  std::vector<DetectedPlane> planes;
  int extracted = 0;
  while (static_cast<int>(active.size()) >= params.min_inliers &&
         extracted < params.max_planes) {
    // RANSAC over the still-active points.
    std::size_t best_count = 0;
    PlanePose best_pose;
    for (int it = 0; it < params.ransac_iterations; ++it) {
      const int a = active[uniform_index(rng, active.size())];
      const int b = active[uniform_index(rng, active.size())];
      const int c = active[uniform_index(rng, active.size())];
      if (a == b || b == c || a == c) continue;
      const Vec3 n = (cloud.points[b] - cloud.points[a])
                         .cross(cloud.points[c] - cloud.points[a]);
      const double len = n.norm();
      if (len < 1e-12) continue;
      const PlanePose pose{n / len, (n / len).dot(cloud.points[a])};
      std::size_t count = 0;
      for (int i : active)
        if (std::abs(pose.signed_distance(cloud.points[i])) <= tol) ++count;
      if (count > best_count) {
        best_count = count;
        best_pose = pose;
      }
    }
    if (best_count < static_cast<std::size_t>(params.min_inliers)) break;

    // Least-squares refinement, two rounds of refit + inlier recount.
    std::vector<int> inliers;
    PlanePose pose = best_pose;
    for (int round = 0; round < 2; ++round) {
      inliers.clear();
      for (int i : active)
        if (std::abs(pose.signed_distance(cloud.points[i])) <= tol) inliers.push_back(i);
      const auto refit = detail::fit_plane_lsq(cloud, inliers);
      if (!refit) break;
      pose = *refit;
    }
    inliers.clear();
    for (int i : active)
      if (std::abs(pose.signed_distance(cloud.points[i])) <= tol) inliers.push_back(i);
    if (static_cast<int>(inliers.size()) < params.min_inliers) break;

    // Remove the extracted points regardless of orientation, so a dominant
    // slanted surface cannot be rediscovered forever.
    std::vector<int> remaining;
    remaining.reserve(active.size() - inliers.size());
    std::size_t k = 0;
    for (int i : active) {
      if (k < inliers.size() && inliers[k] == i)
        ++k;
      else
        remaining.push_back(i);
    }
    active.swap(remaining);
    ++extracted;

    const double nz = std::abs(pose.normal.z());
    std::optional<PlaneOrientation> orientation;
    if (nz >= cos_h)
      orientation = PlaneOrientation::Horizontal;
    else if (nz <= sin_v)
      orientation = PlaneOrientation::Vertical;
    if (!orientation) continue;  // neither horizontal nor vertical

    DetectedPlane plane;
    plane.pose = normalize_pose(pose, params.orientation_tolerance_deg);
    plane.inliers = std::move(inliers);
    plane.orientation = *orientation;
    plane.support_area = detail::support_area_estimate(cloud, plane.inliers, plane.pose);
    planes.push_back(std::move(plane));
  }

  std::stable_sort(planes.begin(), planes.end(),
                   [](const DetectedPlane& a, const DetectedPlane& b) {
                     return a.inliers.size() > b.inliers.size();
                   });
  return planes;
}

}  // namespace planesdf

#endif  // PLANESDF_PLANE_DETECTION_HPP
