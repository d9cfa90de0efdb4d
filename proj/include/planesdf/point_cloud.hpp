#ifndef PLANESDF_POINT_CLOUD_HPP
#define PLANESDF_POINT_CLOUD_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "planesdf/geometry.hpp"

namespace planesdf {

using Rgb = std::array<uint8_t, 3>;

// Unorganized point cloud in the world frame. Colors and labels are
// optional; when present they are parallel to `points`. Labels carry
// per-object ids in ground-truth clouds.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Rgb> colors;
  std::vector<int32_t> labels;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_colors() const { return !colors.empty(); }
  bool has_labels() const { return !labels.empty(); }

  void append(const Vec3& p) { points.push_back(p); }
  void append(const Vec3& p, const Rgb& c) {
    points.push_back(p);
    colors.push_back(c);
  }
};

}  // namespace planesdf

#endif  // PLANESDF_POINT_CLOUD_HPP
