#ifndef PLANESDF_CHANGE2D_HPP
#define PLANESDF_CHANGE2D_HPP

// 2D change mask from height-map comparison. Each source cell is projected
// into the target map and compared against the 2x2 cell neighborhood of the
// landing point: a cell is changed only when every comparable neighbor
// disagrees by more than delta_h. Small changed clusters are filtered and
// the survivors dilated, then the mask is intersected with the object map
// to produce per-blob change candidates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "planesdf/connected_components.hpp"
#include "planesdf/errors.hpp"
#include "planesdf/geometry.hpp"
#include "planesdf/grid.hpp"
#include "planesdf/io.hpp"
#include "planesdf/plane_sdf.hpp"

namespace planesdf {

enum class ChangeState : uint8_t { Unknown = 0, Unchanged = 1, Changed = 2 };

struct ChangeMask {
  double origin_u = 0.0, origin_v = 0.0;
  double cell_size = 0.007;
  Grid2<ChangeState> states;

  int nx() const { return states.nx(); }
  int ny() const { return states.ny(); }
  std::size_t count(ChangeState s) const {
    std::size_t n = 0;
    for (const ChangeState& v : states.data())
      if (v == s) ++n;
    return n;
  }
};

struct BlobCandidate {
  int blob_label = 0;            // 0 = synthetic (changed cells on no blob)
  bool synthetic = false;
  std::vector<Cell> cells;       // changed cells in this candidate
  std::vector<Cell> footprint;   // full blob cells (== cells when synthetic)
  double overlap = 0.0;          // |changed ∩ blob| / |blob|
};

inline ChangeMask compare_height_maps(const HeightMap& src, const HeightMap& tgt,
                                      const RigidTransform& transform, double delta_h) {
  if (std::abs(src.cell_size - tgt.cell_size) > 1e-12)
    throw ValidationError("compare_height_maps: cell size mismatch between maps");

  ChangeMask mask;
  mask.origin_u = src.origin_u;
  mask.origin_v = src.origin_v;
  mask.cell_size = src.cell_size;
  mask.states = Grid2<ChangeState>(src.nx(), src.ny(), ChangeState::Unknown);

  for (int y = 0; y < src.ny(); ++y) {
    for (int x = 0; x < src.nx(); ++x) {
      const double h = src.values.at(x, y);
      if (h < 0.0) continue;  // unobserved source cell stays unknown

      const Vec3 p = transform * Vec3(src.cell_center_u(x), src.cell_center_v(y), 0.0);
      // Continuous grid coordinates where integers sit on cell centers.
      const double gx = (p.x() - tgt.origin_u) / tgt.cell_size - 0.5;
      const double gy = (p.y() - tgt.origin_v) / tgt.cell_size - 0.5;
      const int ix = static_cast<int>(std::floor(gx));
      const int iy = static_cast<int>(std::floor(gy));

      int comparable = 0, within = 0;
      for (int j = 0; j <= 1; ++j) {
        for (int i = 0; i <= 1; ++i) {
          const int tx = ix + i, ty = iy + j;
          if (!tgt.values.in_bounds(tx, ty)) continue;
          const double th = tgt.values.at(tx, ty);
          if (th < 0.0) continue;  // unobserved target neighbors are excluded
          ++comparable;
          if (std::abs(th - h) <= delta_h) ++within;
        }
      }
      if (comparable == 0)
        mask.states.at(x, y) = ChangeState::Unknown;
      else
        mask.states.at(x, y) = within > 0 ? ChangeState::Unchanged : ChangeState::Changed;
    }
  }
  return mask;
}

inline ChangeMask denoise_mask(const ChangeMask& mask, int min_cluster_cells,
                               int dilation_radius) {
  const int nx = mask.nx(), ny = mask.ny();
  Grid2<uint8_t> changed(nx, ny, 0), unknown(nx, ny, 0);
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      changed.at(x, y) = mask.states.at(x, y) == ChangeState::Changed;
      unknown.at(x, y) = mask.states.at(x, y) == ChangeState::Unknown;
    }

  const ComponentLabeling lab = label_components_8(changed);
  Grid2<uint8_t> kept(nx, ny, 0);
  for (const Component& c : lab.components)
    if (static_cast<int>(c.cells.size()) >= min_cluster_cells)
      for (const Cell& cell : c.cells) kept.at(cell.x, cell.y) = 1;

  const Grid2<uint8_t> grown = dilate_square(kept, dilation_radius, &unknown);

  ChangeMask out = mask;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      if (unknown.at(x, y)) continue;
      out.states.at(x, y) = grown.at(x, y) ? ChangeState::Changed : ChangeState::Unchanged;
    }
  return out;
}

inline std::vector<BlobCandidate> extract_candidates(const ChangeMask& mask,
                                                     const ObjectMap& objects,
                                                     double min_overlap) {
  if (mask.nx() != objects.labels.nx() || mask.ny() != objects.labels.ny())
    throw ValidationError("extract_candidates: mask and object map shapes differ");

  std::vector<BlobCandidate> out;
  for (const Component& blob : objects.blobs) {
    BlobCandidate cand;
    cand.blob_label = blob.label;
    cand.footprint = blob.cells;
    for (const Cell& c : blob.cells)
      if (mask.states.at(c.x, c.y) == ChangeState::Changed) cand.cells.push_back(c);
    if (blob.cells.empty()) continue;
    cand.overlap = static_cast<double>(cand.cells.size()) /
                   static_cast<double>(blob.cells.size());
    if (cand.overlap >= min_overlap && !cand.cells.empty()) out.push_back(std::move(cand));
  }

  // Changed cells on no blob: group them into synthetic candidates so that
  // free-space changes (objects only present in the target) stay represented.
  Grid2<uint8_t> off_blob(mask.nx(), mask.ny(), 0);
  for (int y = 0; y < mask.ny(); ++y)
    for (int x = 0; x < mask.nx(); ++x)
      off_blob.at(x, y) = mask.states.at(x, y) == ChangeState::Changed &&
                          objects.labels.at(x, y) == 0;
  for (const Component& c : label_components_8(off_blob).components) {
    BlobCandidate cand;
    cand.blob_label = 0;
    cand.synthetic = true;
    cand.cells = c.cells;
    cand.footprint = c.cells;
    cand.overlap = 1.0;
    out.push_back(std::move(cand));
  }
  return out;
}

// --- exports ---------------------------------------------------------------

inline void save_mask_pgm(const ChangeMask& mask, const std::string& path) {
  Grid2<uint8_t> img(mask.nx(), mask.ny(), 0);
  for (int y = 0; y < mask.ny(); ++y)
    for (int x = 0; x < mask.nx(); ++x) {
      switch (mask.states.at(x, y)) {
        case ChangeState::Unknown: img.at(x, y) = 0; break;
        case ChangeState::Unchanged: img.at(x, y) = 128; break;
        case ChangeState::Changed: img.at(x, y) = 255; break;
      }
    }
  save_pgm(img, path);
}

// CSV cells: 0 = unknown, 1 = unchanged, 2 = changed.
inline void save_mask_csv(const ChangeMask& mask, const std::string& path) {
  save_grid_csv(mask.states, path, [](ChangeState s) {
    return std::to_string(static_cast<int>(s));
  });
}

}  // namespace planesdf

#endif  // PLANESDF_CHANGE2D_HPP
