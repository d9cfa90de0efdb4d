#ifndef PLANESDF_GEOMETRY_HPP
#define PLANESDF_GEOMETRY_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "planesdf/errors.hpp"

namespace planesdf {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using RigidTransform = Eigen::Isometry3d;

// Oriented plane n.p = d with |n| = 1.
struct PlanePose {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
};

// Right-handed orthonormal frame attached to a plane: u, v span the plane,
// w is the plane normal. World origin of the frame is the plane point
// closest to the world origin.
struct PlaneFrame {
  Vec3 u, v, w;
  Vec3 origin;

  Vec3 to_local(const Vec3& p) const {
    const Vec3 q = p - origin;
    return {u.dot(q), v.dot(q), w.dot(q)};
  }
  Vec3 to_world(const Vec3& p) const {
    return origin + p.x() * u + p.y() * v + p.z() * w;
  }
};

inline PlaneFrame make_plane_frame(const PlanePose& pose) {
  PlaneFrame f;
  f.w = pose.normal.normalized();
  const Vec3 anchor = std::abs(f.w.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  f.u = anchor.cross(f.w).normalized();
  f.v = f.w.cross(f.u);
  f.origin = pose.offset * f.w;
  return f;
}

// Minimal rotation taking unit vector a onto unit vector b.
// Anti-parallel inputs are rejected: plane pairs that far apart are
// filtered out before any transform is built.
inline Mat3 minimal_rotation(const Vec3& a, const Vec3& b) {
  const double c = a.dot(b);
  if (c <= -1.0 + 1e-12)
    throw ValidationError("minimal_rotation: vectors are anti-parallel");
  const Vec3 axis = a.cross(b);
  const double s2 = axis.squaredNorm();
  if (s2 < 1e-30) return Mat3::Identity();
  return Eigen::AngleAxisd(std::atan2(std::sqrt(s2), c), axis.normalized())
      .toRotationMatrix();
}

}  // namespace planesdf

#endif  // PLANESDF_GEOMETRY_HPP
