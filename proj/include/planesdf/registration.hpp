#ifndef PLANESDF_REGISTRATION_HPP
#define PLANESDF_REGISTRATION_HPP

// Cross-scene association of plane volumes by pose: two planes are the same
// surface when their normals' cosine similarity and offset difference pass
// the admission thresholds. Matched pairs get a rigid transform that maps
// source plane-local coordinates onto the target plane exactly.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "planesdf/geometry.hpp"
#include "planesdf/plane_sdf.hpp"

namespace planesdf {

struct PlanePairing {
  int source_id = -1;
  int target_id = -1;
  double cosine = 0.0;
  double offset_gap = 0.0;
  RigidTransform transform = RigidTransform::Identity();  // src local -> tgt local
};

struct MatchResult {
  std::vector<PlanePairing> pairings;
  std::vector<int> unmatched_source;  // whole-plane-new candidates
  std::vector<int> unmatched_target;
};

// Maps source plane-local coordinates into target plane-local coordinates:
// local -> world, then the minimal rotation taking n onto n', then a push of
// (d' - d) along n', then into the target frame. Points on the source plane
// land on the target plane exactly; in-plane drift is not corrected.
inline RigidTransform relative_transform(const PlanePose& src_pose, const PlaneFrame& src_frame,
                                         const PlanePose& tgt_pose, const PlaneFrame& tgt_frame) {
  RigidTransform src_to_world = RigidTransform::Identity();
  src_to_world.linear().col(0) = src_frame.u;
  src_to_world.linear().col(1) = src_frame.v;
  src_to_world.linear().col(2) = src_frame.w;
  src_to_world.translation() = src_frame.origin;

  RigidTransform tgt_to_world = RigidTransform::Identity();
  tgt_to_world.linear().col(0) = tgt_frame.u;
  tgt_to_world.linear().col(1) = tgt_frame.v;
  tgt_to_world.linear().col(2) = tgt_frame.w;
  tgt_to_world.translation() = tgt_frame.origin;

  RigidTransform snap = RigidTransform::Identity();
  snap.linear() = minimal_rotation(src_pose.normal, tgt_pose.normal);
  snap.translation() = (tgt_pose.offset - src_pose.offset) * tgt_pose.normal;

  return tgt_to_world.inverse() * snap * src_to_world;
}

struct PlaneInfo {
  int id = 0;
  PlanePose pose;
};

inline MatchResult match_planes(const std::vector<PlaneInfo>& source,
                                const std::vector<PlaneInfo>& target,
                                double delta_n, double delta_d) {
  struct Cand {
    double cosine;
    double gap;
    int si, ti;  // indices into the input vectors
  };
  std::vector<Cand> cands;
  for (std::size_t si = 0; si < source.size(); ++si) {
    for (std::size_t ti = 0; ti < target.size(); ++ti) {
      const double cosine = source[si].pose.normal.dot(target[ti].pose.normal);
      const double gap = std::abs(source[si].pose.offset - target[ti].pose.offset);
      if (cosine >= delta_n && gap <= delta_d)
        cands.push_back({cosine, gap, static_cast<int>(si), static_cast<int>(ti)});
    }
  }
  // Greedy one-to-one: best cosine first, then smallest gap, ids break ties.
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.cosine != b.cosine) return a.cosine > b.cosine;
    if (a.gap != b.gap) return a.gap < b.gap;
    if (a.si != b.si) return a.si < b.si;
    return a.ti < b.ti;
  });

  MatchResult result;
  std::vector<bool> used_s(source.size(), false), used_t(target.size(), false);
  for (const Cand& c : cands) {
    if (used_s[c.si] || used_t[c.ti]) continue;
    used_s[c.si] = used_t[c.ti] = true;
    result.pairings.push_back({source[c.si].id, target[c.ti].id, c.cosine, c.gap});
  }
  for (std::size_t i = 0; i < source.size(); ++i)
    if (!used_s[i]) result.unmatched_source.push_back(source[i].id);
  for (std::size_t i = 0; i < target.size(); ++i)
    if (!used_t[i]) result.unmatched_target.push_back(target[i].id);
  return result;
}

inline MatchResult match_planes(const std::vector<PlaneSdf>& source,
                                const std::vector<PlaneSdf>& target,
                                double delta_n, double delta_d) {
  std::vector<PlaneInfo> s, t;
  for (const auto& p : source) s.push_back({p.id, p.pose});
  for (const auto& p : target) t.push_back({p.id, p.pose});
  MatchResult result = match_planes(s, t, delta_n, delta_d);
  auto find = [](const std::vector<PlaneSdf>& v, int id) -> const PlaneSdf& {
    for (const auto& p : v)
      if (p.id == id) return p;
    throw InternalError("match_planes: pairing references unknown plane id");
  };
  for (PlanePairing& pr : result.pairings) {
    const PlaneSdf& sp = find(source, pr.source_id);
    const PlaneSdf& tp = find(target, pr.target_id);
    pr.transform = relative_transform(sp.pose, sp.frame, tp.pose, tp.frame);
  }
  return result;
}

// Optional in-plane refinement: point-to-point 2D ICP over occupied
// height-map cell centers, composed on top of the pose-snap transform.
// Off by default; the shared world frame usually handles in-plane drift.
inline RigidTransform refine_inplane_icp(const HeightMap& src, const HeightMap& tgt,
                                         const RigidTransform& base, int iterations = 20) {
  std::vector<Vec2> tgt_pts;
  for (int y = 0; y < tgt.ny(); ++y)
    for (int x = 0; x < tgt.nx(); ++x)
      if (tgt.values.at(x, y) > 0.0)
        tgt_pts.emplace_back(tgt.cell_center_u(x), tgt.cell_center_v(y));
  std::vector<Vec2> src_pts;
  for (int y = 0; y < src.ny(); ++y)
    for (int x = 0; x < src.nx(); ++x)
      if (src.values.at(x, y) > 0.0)
        src_pts.emplace_back(src.cell_center_u(x), src.cell_center_v(y));
  if (src_pts.empty() || tgt_pts.empty()) return base;

  // Bucket the target cells for nearest-neighbor lookups.
  const double cell = tgt.cell_size;
  const double capture = 12.0 * cell;
  auto key = [&](double u, double v) {
    return std::make_pair(static_cast<int64_t>(std::floor(u / capture)),
                          static_cast<int64_t>(std::floor(v / capture)));
  };
  std::map<std::pair<int64_t, int64_t>, std::vector<int>> buckets;
  for (std::size_t i = 0; i < tgt_pts.size(); ++i)
    buckets[key(tgt_pts[i].x(), tgt_pts[i].y())].push_back(static_cast<int>(i));

  RigidTransform current = base;
  for (int it = 0; it < iterations; ++it) {
    Vec2 ca = Vec2::Zero(), cb = Vec2::Zero();
    std::vector<std::pair<Vec2, Vec2>> matches;
    for (const Vec2& sp : src_pts) {
      const Vec3 m = current * Vec3(sp.x(), sp.y(), 0.0);
      const auto [bu, bv] = key(m.x(), m.y());
      double best = capture * capture;
      int best_i = -1;
      for (int du = -1; du <= 1; ++du)
        for (int dv = -1; dv <= 1; ++dv) {
          const auto it2 = buckets.find({bu + du, bv + dv});
          if (it2 == buckets.end()) continue;
          for (int i : it2->second) {
            const double d2 = (tgt_pts[i] - Vec2(m.x(), m.y())).squaredNorm();
            if (d2 < best) {
              best = d2;
              best_i = i;
            }
          }
        }
      if (best_i >= 0) matches.emplace_back(Vec2(m.x(), m.y()), tgt_pts[best_i]);
    }
    if (matches.size() < 8) break;
    for (const auto& [a, b] : matches) {
      ca += a;
      cb += b;
    }
    ca /= static_cast<double>(matches.size());
    cb /= static_cast<double>(matches.size());
    double sc = 0.0, ss = 0.0;
    for (const auto& [a, b] : matches) {
      const Vec2 pa = a - ca, pb = b - cb;
      sc += pa.dot(pb);
      ss += pa.x() * pb.y() - pa.y() * pb.x();
    }
    const double angle = std::atan2(ss, sc);
    const Eigen::Rotation2Dd rot(angle);
    const Vec2 trans = cb - rot * ca;

    RigidTransform correction = RigidTransform::Identity();
    correction.linear().topLeftCorner<2, 2>() = rot.toRotationMatrix();
    correction.translation().head<2>() = trans;
    current = correction * current;
    if (std::abs(angle) < 1e-9 && trans.norm() < 1e-9) break;
  }
  return current;
}

}  // namespace planesdf

#endif  // PLANESDF_REGISTRATION_HPP
