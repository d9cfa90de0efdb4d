#ifndef PLANESDF_GRID_HPP
#define PLANESDF_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "planesdf/errors.hpp"

namespace planesdf {

// Dense row-major 2D grid. Index x is the fast axis.
template <typename T>
class Grid2 {
public:
  Grid2() = default;
  Grid2(int nx, int ny, T fill = T{})
      : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return data_.size(); }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < nx_ && y >= 0 && y < ny_;
  }

  T& at(int x, int y) { return data_[idx(x, y)]; }
  const T& at(int x, int y) const { return data_[idx(x, y)]; }

  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y) * nx_ + x;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid2&) const = default;

private:
  int nx_ = 0, ny_ = 0;
  std::vector<T> data_;
};

// Dense 3D grid, x fastest, then y, then z.
template <typename T>
class Grid3 {
public:
  Grid3() = default;
  Grid3(int nx, int ny, int nz, T fill = T{})
      : nx_(nx), ny_(ny), nz_(nz),
        data_(static_cast<std::size_t>(nx) * ny * nz, fill) {}

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t size() const { return data_.size(); }
  bool in_bounds(int x, int y, int z) const {
    return x >= 0 && x < nx_ && y >= 0 && y < ny_ && z >= 0 && z < nz_;
  }

  T& at(int x, int y, int z) { return data_[idx(x, y, z)]; }
  const T& at(int x, int y, int z) const { return data_[idx(x, y, z)]; }

  std::size_t idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * ny_ + y) * nx_ + x;
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Grid3&) const = default;

private:
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<T> data_;
};

}  // namespace planesdf

#endif  // PLANESDF_GRID_HPP
