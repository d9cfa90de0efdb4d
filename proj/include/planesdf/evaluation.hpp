#ifndef PLANESDF_EVALUATION_HPP
#define PLANESDF_EVALUATION_HPP

// Point- and cluster-level scoring of detections against a labeled
// ground-truth cloud: precision, recall, F1, missed objects, and wrongly
// detected clusters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "planesdf/errors.hpp"
#include "planesdf/point_cloud.hpp"

namespace planesdf {

struct ObjectScore {
  int32_t id = 0;
  std::size_t gt_points = 0;
  std::size_t matched_points = 0;
  bool missed() const { return matched_points == 0; }
};

struct EvaluationReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int missed_objects = 0;
  int wrong_clusters = 0;
  int total_gt_objects = 0;
  int detected_clusters = 0;
  std::size_t detected_points = 0;
  std::size_t gt_points = 0;
  std::size_t true_positive_points = 0;
  bool vacuous = false;  // empty ground truth with nonempty detections
  std::vector<ObjectScore> per_object;
};

namespace detail {

using GridKey = std::tuple<int64_t, int64_t, int64_t>;

inline GridKey grid_key(const Vec3& p, double cell) {
  return {static_cast<int64_t>(std::floor(p.x() / cell)),
          static_cast<int64_t>(std::floor(p.y() / cell)),
          static_cast<int64_t>(std::floor(p.z() / cell))};
}

class PointGrid {
public:
  PointGrid(const std::vector<Vec3>& pts, double cell) : pts_(pts), cell_(cell) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      buckets_[grid_key(pts[i], cell)].push_back(static_cast<int>(i));
  }

  bool any_within(const Vec3& p, double radius) const {
    const auto [cx, cy, cz] = grid_key(p, cell_);
    const double r2 = radius * radius;
    for (int64_t dz = -1; dz <= 1; ++dz)
      for (int64_t dy = -1; dy <= 1; ++dy)
        for (int64_t dx = -1; dx <= 1; ++dx) {
          const auto it = buckets_.find({cx + dx, cy + dy, cz + dz});
          if (it == buckets_.end()) continue;
          for (int i : it->second)
            if ((pts_[i] - p).squaredNorm() <= r2) return true;
        }
    return false;
  }

private:
  const std::vector<Vec3>& pts_;
  double cell_;
  std::map<GridKey, std::vector<int>> buckets_;
};

}  // namespace detail

// `ground_truth` must carry per-point object ids in `labels`. A detected
// point is a true positive when a ground-truth point lies within
// match_radius. Detected points are clustered on a grid of cluster_cell
// (26-connectivity); clusters without a single true positive count as wrong.
inline EvaluationReport score(const PointCloud& detected, const PointCloud& ground_truth,
                              double match_radius, double cluster_cell = 0.014) {
  if (!ground_truth.empty() && !ground_truth.has_labels())
    throw ValidationError("score: ground truth cloud lacks object ids");

  EvaluationReport rep;
  rep.detected_points = detected.size();
  rep.gt_points = ground_truth.size();

  const detail::PointGrid gt_grid(ground_truth.points, match_radius);
  std::vector<uint8_t> tp(detected.size(), 0);
  for (std::size_t i = 0; i < detected.size(); ++i)
    tp[i] = gt_grid.any_within(detected.points[i], match_radius);
  rep.true_positive_points =
      static_cast<std::size_t>(std::count(tp.begin(), tp.end(), uint8_t{1}));

  const detail::PointGrid det_grid(detected.points, match_radius);
  std::map<int32_t, ObjectScore> objects;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    ObjectScore& os = objects[ground_truth.labels[i]];
    os.id = ground_truth.labels[i];
    os.gt_points += 1;
    if (det_grid.any_within(ground_truth.points[i], match_radius)) os.matched_points += 1;
  }
  std::size_t gt_matched = 0;
  for (const auto& [id, os] : objects) {
    rep.per_object.push_back(os);
    gt_matched += os.matched_points;
    if (os.missed()) rep.missed_objects += 1;
  }
  rep.total_gt_objects = static_cast<int>(objects.size());

  // Cluster detected points on a coarse grid, 26-connectivity.
  std::map<detail::GridKey, std::vector<int>> cells;
  for (std::size_t i = 0; i < detected.size(); ++i)
    cells[detail::grid_key(detected.points[i], cluster_cell)].push_back(static_cast<int>(i));
  std::map<detail::GridKey, int> cluster_of;
  int n_clusters = 0;
  for (const auto& [k, pts] : cells) {
    if (cluster_of.count(k)) continue;
    const int cid = n_clusters++;
    std::vector<detail::GridKey> stack{k};
    cluster_of[k] = cid;
    while (!stack.empty()) {
      const auto [cx, cy, cz] = stack.back();
      stack.pop_back();
      for (int64_t dz = -1; dz <= 1; ++dz)
        for (int64_t dy = -1; dy <= 1; ++dy)
          for (int64_t dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const detail::GridKey nb{cx + dx, cy + dy, cz + dz};
            if (!cells.count(nb) || cluster_of.count(nb)) continue;
            cluster_of[nb] = cid;
            stack.push_back(nb);
          }
    }
  }
  std::vector<uint8_t> cluster_has_tp(n_clusters, 0);
  for (const auto& [k, pts] : cells) {
    const int cid = cluster_of[k];
    for (int i : pts)
      if (tp[i]) cluster_has_tp[cid] = 1;
  }
  rep.detected_clusters = n_clusters;
  for (int c = 0; c < n_clusters; ++c)
    if (!cluster_has_tp[c]) rep.wrong_clusters += 1;

  if (ground_truth.empty()) {
    rep.recall = 1.0;  // vacuously complete
    rep.precision = detected.empty() ? 1.0 : 0.0;
    rep.vacuous = !detected.empty();
  } else {
    rep.recall = static_cast<double>(gt_matched) / static_cast<double>(ground_truth.size());
    rep.precision = detected.empty()
                        ? 1.0
                        : static_cast<double>(rep.true_positive_points) /
                              static_cast<double>(detected.size());
  }
  rep.f1 = rep.precision + rep.recall > 0.0
               ? 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall)
               : 0.0;
  return rep;
}

inline std::string report_text(const EvaluationReport& rep) {
  std::ostringstream os;
  os << "precision: " << rep.precision << '\n';
  os << "recall: " << rep.recall << '\n';
  os << "f1: " << rep.f1 << '\n';
  os << "missed_objects: " << rep.missed_objects << '\n';
  os << "wrong_clusters: " << rep.wrong_clusters << '\n';
  os << "total_gt_objects: " << rep.total_gt_objects << '\n';
  os << "detected_clusters: " << rep.detected_clusters << '\n';
  os << "detected_points: " << rep.detected_points << '\n';
  os << "gt_points: " << rep.gt_points << '\n';
  os << "true_positive_points: " << rep.true_positive_points << '\n';
  if (rep.vacuous) os << "vacuous: 1\n";
  for (const auto& obj : rep.per_object)
    os << "object " << obj.id << ": gt=" << obj.gt_points
       << " matched=" << obj.matched_points << (obj.missed() ? " MISSED" : "") << '\n';
  return os.str();
}

inline std::string report_csv_header() {
  return "precision,recall,f1,missed_objects,wrong_clusters,total_gt_objects,"
         "detected_clusters,detected_points,gt_points,true_positive_points";
}

inline std::string report_csv_row(const EvaluationReport& rep) {
  std::ostringstream os;
  os << rep.precision << ',' << rep.recall << ',' << rep.f1 << ',' << rep.missed_objects
     << ',' << rep.wrong_clusters << ',' << rep.total_gt_objects << ','
     << rep.detected_clusters << ',' << rep.detected_points << ',' << rep.gt_points << ','
     << rep.true_positive_points;
  return os.str();
}

}  // namespace planesdf

#endif  // PLANESDF_EVALUATION_HPP
