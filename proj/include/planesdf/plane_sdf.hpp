#ifndef PLANESDF_PLANE_SDF_HPP
#define PLANESDF_PLANE_SDF_HPP

// Plane-anchored truncated SDF volumes. Points within a fixed band above a
// detected plane are fused into a dense voxel grid in plane-local
// coordinates; a 2D height map (max occupied-voxel height per column) and a
// connected-component object map are derived from the volume.
//
// Fusion computes, per voxel, the truncated distance to the nearest
// contributing point. The distance field is evaluated at voxel resolution
// with a separable squared distance transform seeded by per-voxel
// point offsets, which keeps fusion O(N) in the grid size. Signs follow the
// height direction: voxels above the topmost occupied voxel of their column
// are outside (+), voxels below it are behind the surface (-).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "planesdf/connected_components.hpp"
#include "planesdf/errors.hpp"
#include "planesdf/geometry.hpp"
#include "planesdf/grid.hpp"
#include "planesdf/io.hpp"
#include "planesdf/plane_detection.hpp"
#include "planesdf/point_cloud.hpp"

namespace planesdf {

constexpr float kUnobservedPhi = 1.0e30f;

struct SdfVolume {
  // Plane-local position of the corner of voxel (0,0,0). z = 0 is the plane.
  Vec3 origin = Vec3::Zero();
  double voxel_size = 0.007;
  Grid3<float> phi;      // truncated signed distance, meters
  Grid3<float> weight;   // 0 = unobserved

  int nx() const { return phi.nx(); }
  int ny() const { return phi.ny(); }
  int nz() const { return phi.nz(); }

  Vec3 voxel_center(int i, int j, int k) const {
    return origin + voxel_size * Vec3(i + 0.5, j + 0.5, k + 0.5);
  }
  bool observed(int i, int j, int k) const { return weight.at(i, j, k) > 0.0f; }
  bool occupied(int i, int j, int k) const {
    return observed(i, j, k) &&
           std::abs(phi.at(i, j, k)) <= 0.5 * voxel_size + 1e-12;
  }
};

// Per-cell max voxel-to-plane height. 0 = observed flat, -1 = unobserved.
struct HeightMap {
  double origin_u = 0.0, origin_v = 0.0;  // corner of cell (0,0), meters
  double cell_size = 0.007;
  Grid2<double> values;

  int nx() const { return values.nx(); }
  int ny() const { return values.ny(); }
  double cell_center_u(int x) const { return origin_u + (x + 0.5) * cell_size; }
  double cell_center_v(int y) const { return origin_v + (y + 0.5) * cell_size; }
};

struct ObjectMap {
  Grid2<int32_t> labels;            // 0 = background
  std::vector<Component> blobs;     // label k at blobs[k-1]
};

struct PlaneSdf {
  int id = 0;
  PlanePose pose;
  PlaneFrame frame;
  double band = 0.3;
  SdfVolume volume;
  HeightMap height_map;
  ObjectMap object_map;
};

struct FusionParams {
  double voxel_size = 0.007;
  double band = 0.3;
  int truncation_voxels = 4;
  std::size_t max_voxels = 100000000;
};

namespace detail {

// Felzenszwalb-Huttenlocher 1D squared distance transform (lower envelope
// of parabolas). Values around 1e20 act as +inf.
inline void edt_1d(const float* f, float* d, int n, int* v, float* z) {
  constexpr float kInf = 1.0e20f;
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    float s;
    while (true) {
      const float fq = f[q] + static_cast<float>(q) * q;
      const float fv = f[v[k]] + static_cast<float>(v[k]) * v[k];
      s = (fq - fv) / (2.0f * (q - v[k]));
      if (s <= z[k] && k > 0)
        --k;
      else
        break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<float>(q)) ++k;
    const float dq = static_cast<float>(q - v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

inline void edt_3d(Grid3<float>& g) {
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  const int nmax = std::max({nx, ny, nz});
  std::vector<float> row(nmax), out(nmax), z(nmax + 1);
  std::vector<int> v(nmax);

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) {
      float* p = &g.at(0, j, k);
      edt_1d(p, out.data(), nx, v.data(), z.data());
      std::copy(out.begin(), out.begin() + nx, p);
    }
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < ny; ++j) row[j] = g.at(i, j, k);
      edt_1d(row.data(), out.data(), ny, v.data(), z.data());
      for (int j = 0; j < ny; ++j) g.at(i, j, k) = out[j];
    }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      for (int k = 0; k < nz; ++k) row[k] = g.at(i, j, k);
      edt_1d(row.data(), out.data(), nz, v.data(), z.data());
      for (int k = 0; k < nz; ++k) g.at(i, j, k) = out[k];
    }
}

}  // namespace detail

inline HeightMap compute_height_map(const SdfVolume& volume) {
  HeightMap hm;
  hm.origin_u = volume.origin.x();
  hm.origin_v = volume.origin.y();
  hm.cell_size = volume.voxel_size;
  hm.values = Grid2<double>(volume.nx(), volume.ny(), -1.0);

  for (int j = 0; j < volume.ny(); ++j) {
    for (int i = 0; i < volume.nx(); ++i) {
      bool observed = false;
      double h = -1.0;
      for (int k = volume.nz() - 1; k >= 0; --k) {
        if (!volume.observed(i, j, k)) continue;
        observed = true;
        // The first voxel layer reads as the plane sheet, not an object.
        if (k >= 1 && volume.occupied(i, j, k)) {
          h = (k + 0.5) * volume.voxel_size;
          break;
        }
      }
      if (h >= 0.0)
        hm.values.at(i, j) = h;
      else
        hm.values.at(i, j) = observed ? 0.0 : -1.0;
    }
  }
  return hm;
}

inline ObjectMap label_objects(const HeightMap& hm) {
  Grid2<uint8_t> fg(hm.nx(), hm.ny(), 0);
  for (int y = 0; y < hm.ny(); ++y)
    for (int x = 0; x < hm.nx(); ++x)
      if (hm.values.at(x, y) > 0.0) fg.at(x, y) = 1;
  ComponentLabeling lab = label_components_8(fg);
  return ObjectMap{std::move(lab.labels), std::move(lab.components)};
}

inline PlaneSdf instantiate(const PointCloud& cloud, const DetectedPlane& plane,
                            const FusionParams& params, int id = 0) {
  PlaneSdf ps;
  ps.id = id;
  ps.pose = plane.pose;
  ps.frame = make_plane_frame(plane.pose);
  ps.band = params.band;

  const double vox = params.voxel_size;
  const double band = params.band;

  // Contributing points: within the band above the plane.
  std::vector<Vec3> local;
  local.reserve(cloud.size() / 4);
  for (const Vec3& p : cloud.points) {
    const double sd = ps.pose.signed_distance(p);
    if (sd < 0.0 || sd > band) continue;
    local.push_back(ps.frame.to_local(p));
  }

  // In-plane bounds: plane inliers plus everything that contributes.
  double min_u = std::numeric_limits<double>::max(), max_u = -min_u;
  double min_v = min_u, max_v = -min_u;
  for (int idx : plane.inliers) {
    const Vec3 l = ps.frame.to_local(cloud.points[idx]);
    min_u = std::min(min_u, l.x());
    max_u = std::max(max_u, l.x());
    min_v = std::min(min_v, l.y());
    max_v = std::max(max_v, l.y());
  }
  for (const Vec3& l : local) {
    min_u = std::min(min_u, l.x());
    max_u = std::max(max_u, l.x());
    min_v = std::min(min_v, l.y());
    max_v = std::max(max_v, l.y());
  }
  if (min_u > max_u) {  // nothing to fuse; minimal empty volume
    min_u = min_v = 0.0;
    max_u = max_v = vox;
  }

  const int pad = 2;
  const int nx = static_cast<int>(std::ceil((max_u - min_u) / vox)) + 2 * pad + 1;
  const int ny = static_cast<int>(std::ceil((max_v - min_v) / vox)) + 2 * pad + 1;
  const int nz = static_cast<int>(std::ceil(band / vox));
  const std::size_t total =
      static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * nz;
  if (total > params.max_voxels) throw SizeError(total, params.max_voxels);

  SdfVolume& vol = ps.volume;
  vol.voxel_size = vox;
  vol.origin = Vec3(min_u - pad * vox, min_v - pad * vox, 0.0);
  vol.phi = Grid3<float>(nx, ny, nz, 1.0e20f);
  vol.weight = Grid3<float>(nx, ny, nz, 0.0f);

  // Seed squared distances (voxel units) and mark observed columns.
  Grid2<uint8_t> col_observed(nx, ny, 0);
  for (const Vec3& l : local) {
    const int i = std::clamp(static_cast<int>(std::floor((l.x() - vol.origin.x()) / vox)), 0, nx - 1);
    const int j = std::clamp(static_cast<int>(std::floor((l.y() - vol.origin.y()) / vox)), 0, ny - 1);
    const int k = std::clamp(static_cast<int>(std::floor(l.z() / vox)), 0, nz - 1);
    col_observed.at(i, j) = 1;
    const Vec3 off = (l - vol.voxel_center(i, j, k)) / vox;
    const float d2 = static_cast<float>(off.squaredNorm());
    float& cell = vol.phi.at(i, j, k);
    cell = std::min(cell, d2);
  }

  detail::edt_3d(vol.phi);

  // Truncate, sign by column, and stamp observation weights.
  const double trunc = params.truncation_voxels * vox;
  const double occ = 0.5 * vox + 1e-12;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!col_observed.at(i, j)) {
        for (int k = 0; k < nz; ++k) vol.phi.at(i, j, k) = kUnobservedPhi;
        continue;
      }
      int k_top = -1;
      for (int k = nz - 1; k >= 0; --k) {
        const double u = std::sqrt(static_cast<double>(vol.phi.at(i, j, k))) * vox;
        if (u <= occ) {
          k_top = k;
          break;
        }
      }
      for (int k = 0; k < nz; ++k) {
        const double u =
            std::min(std::sqrt(static_cast<double>(vol.phi.at(i, j, k))) * vox, trunc);
        vol.phi.at(i, j, k) = static_cast<float>(k < k_top ? -u : u);
        vol.weight.at(i, j, k) = 1.0f;
      }
    }
  }

  ps.height_map = compute_height_map(vol);
  ps.object_map = label_objects(ps.height_map);
  return ps;
}

// --- serialization ---------------------------------------------------------

namespace detail {

inline void put_f32(std::ostream& os, float v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}
inline void put_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), 4);
}
inline float get_f32(std::istream& is) {
  float v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
inline uint32_t get_u32(std::istream& is) {
  uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace detail

constexpr uint32_t kVolumeMagic = 0x46445350;  // "PSDF" little-endian
constexpr uint32_t kVolumeVersion = 1;

inline void save_volume(const PlaneSdf& ps, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path, "cannot open for writing");
  const SdfVolume& vol = ps.volume;
  detail::put_u32(out, kVolumeMagic);
  detail::put_u32(out, kVolumeVersion);
  detail::put_u32(out, static_cast<uint32_t>(vol.nx()));
  detail::put_u32(out, static_cast<uint32_t>(vol.ny()));
  detail::put_u32(out, static_cast<uint32_t>(vol.nz()));
  detail::put_f32(out, static_cast<float>(vol.voxel_size));
  for (int a = 0; a < 3; ++a) detail::put_f32(out, static_cast<float>(vol.origin[a]));
  for (int a = 0; a < 3; ++a) detail::put_f32(out, static_cast<float>(ps.pose.normal[a]));
  detail::put_f32(out, static_cast<float>(ps.pose.offset));
  for (int a = 0; a < 3; ++a) detail::put_f32(out, static_cast<float>(ps.frame.u[a]));
  for (int a = 0; a < 3; ++a) detail::put_f32(out, static_cast<float>(ps.frame.v[a]));
  detail::put_f32(out, static_cast<float>(ps.band));
  out.write(reinterpret_cast<const char*>(vol.phi.data().data()),
            static_cast<std::streamsize>(vol.phi.size() * 4));
  out.write(reinterpret_cast<const char*>(vol.weight.data().data()),
            static_cast<std::streamsize>(vol.weight.size() * 4));
  if (!out) throw IoError(path, "write failed");
}

inline PlaneSdf load_volume(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  if (detail::get_u32(in) != kVolumeMagic) throw ParseError(path, 0, "bad magic");
  const uint32_t version = detail::get_u32(in);
  if (version != kVolumeVersion)
    throw ParseError(path, 0, "unsupported version " + std::to_string(version));
  PlaneSdf ps;
  const int nx = static_cast<int>(detail::get_u32(in));
  const int ny = static_cast<int>(detail::get_u32(in));
  const int nz = static_cast<int>(detail::get_u32(in));
  ps.volume.voxel_size = detail::get_f32(in);
  for (int a = 0; a < 3; ++a) ps.volume.origin[a] = detail::get_f32(in);
  for (int a = 0; a < 3; ++a) ps.pose.normal[a] = detail::get_f32(in);
  ps.pose.offset = detail::get_f32(in);
  for (int a = 0; a < 3; ++a) ps.frame.u[a] = detail::get_f32(in);
  for (int a = 0; a < 3; ++a) ps.frame.v[a] = detail::get_f32(in);
  ps.band = detail::get_f32(in);
  ps.frame.w = ps.pose.normal;
  ps.frame.origin = ps.pose.offset * ps.pose.normal;
  ps.volume.phi = Grid3<float>(nx, ny, nz);
  ps.volume.weight = Grid3<float>(nx, ny, nz);
  in.read(reinterpret_cast<char*>(ps.volume.phi.data().data()),
          static_cast<std::streamsize>(ps.volume.phi.size() * 4));
  in.read(reinterpret_cast<char*>(ps.volume.weight.data().data()),
          static_cast<std::streamsize>(ps.volume.weight.size() * 4));
  if (!in) throw ParseError(path, 0, "truncated volume body");
  ps.height_map = compute_height_map(ps.volume);
  ps.object_map = label_objects(ps.height_map);
  return ps;
}

// --- debug exports ---------------------------------------------------------

inline void save_height_map_pgm(const HeightMap& hm, double band, const std::string& path) {
  Grid2<uint8_t> img(hm.nx(), hm.ny(), 0);
  for (int y = 0; y < hm.ny(); ++y)
    for (int x = 0; x < hm.nx(); ++x) {
      const double h = hm.values.at(x, y);
      if (h < 0.0) continue;  // unobserved -> 0
      const double t = std::clamp(h / band, 0.0, 1.0);
      img.at(x, y) = static_cast<uint8_t>(1 + std::lround(t * 254.0));
    }
  save_pgm(img, path);
}

namespace detail {
inline std::string fmt_height(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}
}  // namespace detail

inline void save_height_map_csv(const HeightMap& hm, const std::string& path) {
  save_grid_csv(hm.values, path, [](double v) { return detail::fmt_height(v); });
}

inline void save_object_map_pgm(const ObjectMap& om, const std::string& path) {
  Grid2<uint8_t> img(om.labels.nx(), om.labels.ny(), 0);
  for (int y = 0; y < om.labels.ny(); ++y)
    for (int x = 0; x < om.labels.nx(); ++x) {
      const int32_t l = om.labels.at(x, y);
      if (l > 0) img.at(x, y) = static_cast<uint8_t>(1 + (l - 1) * 83 % 255);
    }
  save_pgm(img, path);
}

}  // namespace planesdf

#endif  // PLANESDF_PLANE_SDF_HPP
