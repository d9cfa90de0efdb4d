#ifndef PLANESDF_CONNECTED_COMPONENTS_HPP
#define PLANESDF_CONNECTED_COMPONENTS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "planesdf/grid.hpp"

namespace planesdf {

struct Cell {
  int x = 0, y = 0;
  bool operator==(const Cell&) const = default;
  bool operator<(const Cell& o) const {
    return y != o.y ? y < o.y : x < o.x;
  }
};

struct Component {
  int label = 0;                // 1-based
  std::vector<Cell> cells;     // row-major order of discovery
  int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

struct ComponentLabeling {
  Grid2<int32_t> labels;       // 0 = background
  std::vector<Component> components;
};

// 8-connected components of the cells where `fg` is nonzero. Labels are
// assigned in row-major order of each component's first cell, so the result
// is deterministic for a given grid.
inline ComponentLabeling label_components_8(const Grid2<uint8_t>& fg) {
  const int nx = fg.nx(), ny = fg.ny();
  ComponentLabeling out;
  out.labels = Grid2<int32_t>(nx, ny, 0);

  std::vector<Cell> stack;
  int next = 1;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if (!fg.at(x, y) || out.labels.at(x, y) != 0) continue;
      Component comp;
      comp.label = next;
      comp.min_x = comp.max_x = x;
      comp.min_y = comp.max_y = y;
      stack.push_back({x, y});
      out.labels.at(x, y) = next;
      while (!stack.empty()) {
        const Cell c = stack.back();
        stack.pop_back();
        comp.cells.push_back(c);
        comp.min_x = std::min(comp.min_x, c.x);
        comp.max_x = std::max(comp.max_x, c.x);
        comp.min_y = std::min(comp.min_y, c.y);
        comp.max_y = std::max(comp.max_y, c.y);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int px = c.x + dx, py = c.y + dy;
            if (!fg.in_bounds(px, py)) continue;
            if (!fg.at(px, py) || out.labels.at(px, py) != 0) continue;
            out.labels.at(px, py) = comp.label;
            stack.push_back({px, py});
          }
        }
      }
      out.components.push_back(std::move(comp));
      ++next;
    }
  }
  return out;
}

// Dilate the nonzero cells of `fg` by a square structuring element of the
// given radius (Chebyshev ball). Cells where `blocked` is nonzero are left
// untouched.
inline Grid2<uint8_t> dilate_square(const Grid2<uint8_t>& fg, int radius,
                                    const Grid2<uint8_t>* blocked = nullptr) {
  const int nx = fg.nx(), ny = fg.ny();
  Grid2<uint8_t> out = fg;
  if (radius <= 0) return out;
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      if (!fg.at(x, y)) continue;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int px = x + dx, py = y + dy;
          if (!fg.in_bounds(px, py)) continue;
          if (blocked && blocked->at(px, py)) continue;
          out.at(px, py) = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace planesdf

#endif  // PLANESDF_CONNECTED_COMPONENTS_HPP
