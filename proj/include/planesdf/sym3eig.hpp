#ifndef PLANESDF_SYM3EIG_HPP
#define PLANESDF_SYM3EIG_HPP

// Closed-form eigendecomposition of symmetric 3x3 matrices. Eigenvalues come
// from the trigonometric solution of the characteristic cubic; eigenvectors
// are extracted with the row-cross-product method, starting from the most
// separated eigenvalue so that near-degenerate pairs stay stable. Output is
// deterministic: eigenpairs sorted by descending eigenvalue, each vector
// signed so its largest-magnitude component is positive.

#include <algorithm>
#include <array>
#include <cmath>

#include "planesdf/geometry.hpp"

namespace planesdf {

struct EigenPairs3 {
  std::array<double, 3> values;  // descending
  std::array<Vec3, 3> vectors;   // unit, mutually orthogonal
};

namespace detail {

inline void orthogonal_complement(const Vec3& w, Vec3& u, Vec3& v) {
  if (std::abs(w.x()) > std::abs(w.y()))
    u = Vec3(-w.z(), 0.0, w.x()) / std::hypot(w.x(), w.z());
  else
    u = Vec3(0.0, w.z(), -w.y()) / std::hypot(w.y(), w.z());
  v = w.cross(u);
}

// Eigenvector for an eigenvalue known to be well separated: the two rows of
// (A - eval I) with the largest cross product span its normal space.
inline Vec3 eigenvector_cross(const Mat3& a, double eval) {
  const Vec3 r0 = a.row(0).transpose() - eval * Vec3(1, 0, 0);
  const Vec3 r1 = a.row(1).transpose() - eval * Vec3(0, 1, 0);
  const Vec3 r2 = a.row(2).transpose() - eval * Vec3(0, 0, 1);
  const Vec3 c01 = r0.cross(r1), c02 = r0.cross(r2), c12 = r1.cross(r2);
  const double n01 = c01.squaredNorm(), n02 = c02.squaredNorm(), n12 = c12.squaredNorm();
  if (n01 >= n02 && n01 >= n12) return n01 > 0 ? Vec3(c01 / std::sqrt(n01)) : Vec3(1, 0, 0);
  if (n02 >= n12) return Vec3(c02 / std::sqrt(n02));
  return Vec3(c12 / std::sqrt(n12));
}

// Second eigenvector restricted to the plane orthogonal to w0, via the null
// space of the projected 2x2 system.
inline Vec3 eigenvector_complement(const Mat3& a, const Vec3& w0, double eval) {
  Vec3 u, v;
  orthogonal_complement(w0, u, v);
  const Vec3 au = a * u, av = a * v;
  const double m00 = u.dot(au) - eval;
  const double m01 = u.dot(av);
  const double m11 = v.dot(av) - eval;
  const double a00 = std::abs(m00), a11 = std::abs(m11), a01 = std::abs(m01);
  if (a00 >= a11) {
    if (std::max(a00, a01) > 0) {
      if (a00 >= a01) {
        const double t = m01 / m00;
        const double s = 1.0 / std::sqrt(1.0 + t * t);
        return s * (t * u - v);
      }
      const double t = m00 / m01;
      const double s = 1.0 / std::sqrt(1.0 + t * t);
      return s * (u - t * v);
    }
    return u;
  }
  if (std::max(a11, a01) > 0) {
    if (a11 >= a01) {
      const double t = m01 / m11;
      const double s = 1.0 / std::sqrt(1.0 + t * t);
      return s * (u - t * v);
    }
    const double t = m11 / m01;
    const double s = 1.0 / std::sqrt(1.0 + t * t);
    return s * (t * u - v);
  }
  return u;
}

inline void fix_sign(Vec3& v) {
  int arg = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0) v = -v;
}

}  // namespace detail

inline EigenPairs3 sym3_eigen(const Mat3& a_in) {
  EigenPairs3 out;
  const double scale = a_in.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    out.values = {0.0, 0.0, 0.0};
    out.vectors = {Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)};
    return out;
  }
  const Mat3 a = ((a_in + a_in.transpose()) / (2.0 * scale)).eval();

  const double off = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  double e0, e1, e2;  // descending
  if (off < 1e-30) {
    e0 = a(0, 0);
    e1 = a(1, 1);
    e2 = a(2, 2);
    std::array<int, 3> order = {0, 1, 2};
    std::array<double, 3> diag = {e0, e1, e2};
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return diag[i] > diag[j]; });
    for (int i = 0; i < 3; ++i) {
      out.values[i] = diag[order[i]] * scale;
      out.vectors[i] = Vec3::Unit(order[i]);
    }
    return out;
  }

  const double q = a.trace() / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * off;
  const double p = std::sqrt(p2 / 6.0);
  const Mat3 b = (a - q * Mat3::Identity()) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  e0 = q + 2.0 * p * std::cos(phi);
  e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  e1 = 3.0 * q - e0 - e2;

  // Extract the best-separated extreme eigenvector first.
  Vec3 v0, v1, v2;
  if (e0 - e1 >= e1 - e2) {
    v0 = detail::eigenvector_cross(a, e0);
    v1 = detail::eigenvector_complement(a, v0, e1);
    v2 = v0.cross(v1);
  } else {
    v2 = detail::eigenvector_cross(a, e2);
    v1 = detail::eigenvector_complement(a, v2, e1);
    v0 = v1.cross(v2);
  }

  out.values = {e0 * scale, e1 * scale, e2 * scale};
  out.vectors = {v0, v1, v2};
  for (Vec3& v : out.vectors) detail::fix_sign(v);
  return out;
}

}  // namespace planesdf

#endif  // PLANESDF_SYM3EIG_HPP
