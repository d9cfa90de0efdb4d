#ifndef PLANESDF_TEST_HELPERS_HPP
#define PLANESDF_TEST_HELPERS_HPP

#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "planesdf/plane_sdf.hpp"
#include "planesdf/point_cloud.hpp"
#include "planesdf/random.hpp"

namespace testutil {

// Fresh temp directory per test binary run.
inline std::string temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("planesdf_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Fully observed volume with phi set from an analytic field of the voxel
// indices. Useful for kernel and feature oracles.
inline planesdf::SdfVolume make_volume(int nx, int ny, int nz,
                                       const std::function<double(int, int, int)>& field,
                                       double voxel = 0.007) {
  planesdf::SdfVolume vol;
  vol.voxel_size = voxel;
  vol.origin = planesdf::Vec3::Zero();
  vol.phi = planesdf::Grid3<float>(nx, ny, nz, 0.0f);
  vol.weight = planesdf::Grid3<float>(nx, ny, nz, 1.0f);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        vol.phi.at(i, j, k) = static_cast<float>(field(i, j, k));
  return vol;
}

// Uniformly sampled axis-aligned rectangle in a horizontal plane.
inline void add_plane_patch(planesdf::PointCloud& cloud, std::mt19937_64& rng, double x0,
                            double x1, double y0, double y1, double z, int count) {
  for (int n = 0; n < count; ++n)
    cloud.append({planesdf::uniform(rng, x0, x1), planesdf::uniform(rng, y0, y1), z});
}

// Axis-aligned box surface (top + four sides) standing on z = base.
inline void add_box(planesdf::PointCloud& cloud, std::mt19937_64& rng, double cx, double cy,
                    double base, double sx, double sy, double sz, int per_face) {
  for (int n = 0; n < per_face; ++n) {
    cloud.append({cx + planesdf::uniform(rng, -0.5, 0.5) * sx,
                  cy + planesdf::uniform(rng, -0.5, 0.5) * sy, base + sz});
    cloud.append({cx + planesdf::uniform(rng, -0.5, 0.5) * sx, cy - 0.5 * sy,
                  base + planesdf::uniform01(rng) * sz});
    cloud.append({cx + planesdf::uniform(rng, -0.5, 0.5) * sx, cy + 0.5 * sy,
                  base + planesdf::uniform01(rng) * sz});
    cloud.append({cx - 0.5 * sx, cy + planesdf::uniform(rng, -0.5, 0.5) * sy,
                  base + planesdf::uniform01(rng) * sz});
    cloud.append({cx + 0.5 * sx, cy + planesdf::uniform(rng, -0.5, 0.5) * sy,
                  base + planesdf::uniform01(rng) * sz});
  }
}

}  // namespace testutil

#endif  // PLANESDF_TEST_HELPERS_HPP
