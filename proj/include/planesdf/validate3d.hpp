#ifndef PLANESDF_VALIDATE3D_HPP
#define PLANESDF_VALIDATE3D_HPP

// Per-blob 3D validation of change candidates. Key voxels are local extrema
// of the determinant of the SDF Hessian; each key voxel is described by
// eigenpair histograms of its 3x3x3 neighborhood plus a Gaussian-weighted
// SDF value, compared against the projected target neighborhood with a
// similarity score. A blob's verdict comes from the frequency-weighted mean
// of its score histogram.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "planesdf/change2d.hpp"
#include "planesdf/errors.hpp"
#include "planesdf/geometry.hpp"
#include "planesdf/plane_sdf.hpp"
#include "planesdf/sym3eig.hpp"

namespace planesdf {

struct ValidationParams {
  int bins_theta = 5;
  int bins_phi = 5;
  int bins_lambda = 6;
  double alpha = 2.0;
  double delta_blob = 0.9;
  double doh_floor = 1e-6;
  int max_key_voxels = 512;
  double epsilon_score = 1e-3;   // score for key voxels with no target evidence
  double gaussian_sigma = 2.0;   // voxels, for the weighted SDF value
};

struct VoxelIndex {
  int i = 0, j = 0, k = 0;
  bool operator==(const VoxelIndex&) const = default;
};

using FeatureVector = std::vector<double>;

// Per-direction eigenvalue bin ranges, established on the source side and
// reused for the target neighborhood.
struct LambdaBins {
  std::array<double, 3> lo{0, 0, 0};
  std::array<double, 3> hi{0, 0, 0};
};

constexpr int kScoreBins = 10;

struct BlobVerdict {
  int blob_label = 0;
  bool synthetic = false;
  bool changed = false;
  bool low_evidence = false;                 // no usable key voxels
  double h_avg = 0.0;
  std::array<int, kScoreBins> histogram{};   // scores binned over (0,1]
  std::vector<VoxelIndex> key_voxels;
  std::vector<double> scores;                // parallel to key_voxels
};

namespace detail {

// Composed 1D factors of the Sobel-of-Sobel kernels (support 5).
inline const std::array<double, 5>& kernel_dd() {
  static const std::array<double, 5> k = {1, 0, -2, 0, 1};
  return k;
}
inline const std::array<double, 5>& kernel_ds() {
  static const std::array<double, 5> k = {-1, -2, 0, 2, 1};
  return k;
}
inline const std::array<double, 5>& kernel_ss() {
  static const std::array<double, 5> k = {1, 4, 6, 4, 1};
  return k;
}

inline bool neighborhood_observed(const SdfVolume& vol, int i, int j, int k, int radius) {
  if (i - radius < 0 || i + radius >= vol.nx() || j - radius < 0 ||
      j + radius >= vol.ny() || k - radius < 0 || k + radius >= vol.nz())
    return false;
  for (int dk = -radius; dk <= radius; ++dk)
    for (int dj = -radius; dj <= radius; ++dj)
      for (int di = -radius; di <= radius; ++di)
        if (!vol.observed(i + di, j + dj, k + dk)) return false;
  return true;
}

}  // namespace detail

// Hessian of the SDF at a voxel via the composed 3D Sobel derivative
// kernels. The composed filters have 5x5x5 support, so the voxel needs a
// complete observed 5x5x5 neighborhood; otherwise it is not a candidate.
inline std::optional<Mat3> hessian_at(const SdfVolume& vol, int i, int j, int k) {
  if (!detail::neighborhood_observed(vol, i, j, k, 2)) return std::nullopt;

  auto factor = [](int axis, int a, int b) -> const std::array<double, 5>& {
    const bool da = axis == a, db = axis == b;
    if (da && db) return detail::kernel_dd();
    if (da || db) return detail::kernel_ds();
    return detail::kernel_ss();
  };

  Mat3 h;
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      const auto& kx = factor(0, a, b);
      const auto& ky = factor(1, a, b);
      const auto& kz = factor(2, a, b);
      double s = 0.0;
      for (int dk = -2; dk <= 2; ++dk)
        for (int dj = -2; dj <= 2; ++dj) {
          const double wyz = ky[dj + 2] * kz[dk + 2];
          for (int di = -2; di <= 2; ++di)
            s += kx[di + 2] * wyz *
                 static_cast<double>(vol.phi.at(i + di, j + dj, k + dk));
        }
      h(a, b) = s;
      h(b, a) = s;
    }
  }
  return h;
}

inline double det_of_hessian(const Mat3& h) { return h.determinant(); }

// Key voxels of a blob: voxels above the blob's 2D footprint whose |DoH| is
// a strict local maximum over the valid 3x3x3 neighborhood and clears the
// floor. Returned by descending |DoH|, capped.
inline std::vector<VoxelIndex> select_key_voxels(const SdfVolume& vol,
                                                 const std::vector<Cell>& footprint,
                                                 const ValidationParams& params) {
  if (footprint.empty()) return {};
  int min_x = footprint[0].x, max_x = footprint[0].x;
  int min_y = footprint[0].y, max_y = footprint[0].y;
  for (const Cell& c : footprint) {
    min_x = std::min(min_x, c.x);
    max_x = std::max(max_x, c.x);
    min_y = std::min(min_y, c.y);
    max_y = std::max(max_y, c.y);
  }
  // DoH over the footprint box inflated by one voxel, for the extremum test.
  const int bx0 = std::max(0, min_x - 1), bx1 = std::min(vol.nx() - 1, max_x + 1);
  const int by0 = std::max(0, min_y - 1), by1 = std::min(vol.ny() - 1, max_y + 1);
  const int bnx = bx1 - bx0 + 1, bny = by1 - by0 + 1;

  constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();
  Grid3<double> doh(bnx, bny, vol.nz(), kInvalid);
  for (int k = 0; k < vol.nz(); ++k)
    for (int y = by0; y <= by1; ++y)
      for (int x = bx0; x <= bx1; ++x)
        if (const auto h = hessian_at(vol, x, y, k))
          doh.at(x - bx0, y - by0, k) = det_of_hessian(*h);

  Grid2<uint8_t> in_blob(bnx, bny, 0);
  for (const Cell& c : footprint)
    if (c.x >= bx0 && c.x <= bx1 && c.y >= by0 && c.y <= by1)
      in_blob.at(c.x - bx0, c.y - by0) = 1;

  struct Scored {
    double mag;
    VoxelIndex v;
  };
  std::vector<Scored> hits;
  for (int k = 0; k < vol.nz(); ++k) {
    for (int y = 0; y < bny; ++y) {
      for (int x = 0; x < bnx; ++x) {
        if (!in_blob.at(x, y)) continue;
        const double d = doh.at(x, y, k);
        if (std::isnan(d)) continue;
        const double mag = std::abs(d);
        if (mag < params.doh_floor) continue;
        bool is_max = true;
        for (int dk = -1; dk <= 1 && is_max; ++dk)
          for (int dj = -1; dj <= 1 && is_max; ++dj)
            for (int di = -1; di <= 1 && is_max; ++di) {
              if (di == 0 && dj == 0 && dk == 0) continue;
              const int px = x + di, py = y + dj, pk = k + dk;
              if (!doh.in_bounds(px, py, pk)) continue;
              const double nd = doh.at(px, py, pk);
              if (!std::isnan(nd) && std::abs(nd) >= mag) is_max = false;
            }
        if (is_max) hits.push_back({mag, {x + bx0, y + by0, k}});
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Scored& a, const Scored& b) {
    if (a.mag != b.mag) return a.mag > b.mag;
    if (a.v.k != b.v.k) return a.v.k < b.v.k;
    if (a.v.j != b.v.j) return a.v.j < b.v.j;
    return a.v.i < b.v.i;
  });
  if (static_cast<int>(hits.size()) > params.max_key_voxels)
    hits.resize(params.max_key_voxels);
  std::vector<VoxelIndex> out;
  out.reserve(hits.size());
  for (const Scored& s : hits) out.push_back(s.v);
  return out;
}

// Hemisphere folding: e and -e map to the same direction. The canonical
// representative has y >= 0 (then x >= 0, then z >= 0 on the boundaries),
// giving azimuth theta in [0,180] deg and elevation phi in [-90,90] deg.
inline void direction_to_spherical(Vec3 e, double& theta_deg, double& phi_deg) {
  if (e.y() < 0 || (e.y() == 0 && (e.x() < 0 || (e.x() == 0 && e.z() < 0)))) e = -e;
  const double n = e.norm();
  theta_deg = std::atan2(e.y(), e.x()) * 180.0 / M_PI;
  phi_deg = n > 0 ? std::asin(std::clamp(e.z() / n, -1.0, 1.0)) * 180.0 / M_PI : 0.0;
}

inline std::optional<FeatureVector> build_feature(const SdfVolume& vol, const VoxelIndex& v0,
                                                  const ValidationParams& params,
                                                  const LambdaBins* shared_bins,
                                                  LambdaBins* bins_out) {
  struct Pair {
    double lambda;
    double theta, phi;
  };
  std::array<std::vector<Pair>, 3> pairs;
  for (auto& p : pairs) p.reserve(27);

  for (int dk = -1; dk <= 1; ++dk) {
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const auto h = hessian_at(vol, v0.i + di, v0.j + dj, v0.k + dk);
        if (!h) return std::nullopt;  // incomplete neighborhood
        const EigenPairs3 eig = sym3_eigen(*h);
        const double denom =
            std::abs(eig.values[0]) + std::abs(eig.values[1]) + std::abs(eig.values[2]) + 1e-12;
        for (int e = 0; e < 3; ++e) {
          Pair p;
          p.lambda = eig.values[e] / denom;
          direction_to_spherical(eig.vectors[e], p.theta, p.phi);
          pairs[e].push_back(p);
        }
      }
    }
  }

  LambdaBins bins;
  if (shared_bins) {
    bins = *shared_bins;
  } else {
    for (int e = 0; e < 3; ++e) {
      double lo = pairs[e][0].lambda, hi = lo;
      for (const Pair& p : pairs[e]) {
        lo = std::min(lo, p.lambda);
        hi = std::max(hi, p.lambda);
      }
      bins.lo[e] = lo;
      bins.hi[e] = hi;
    }
  }
  if (bins_out) *bins_out = bins;

  const int nt = params.bins_theta, np = params.bins_phi, nl = params.bins_lambda;
  FeatureVector f(static_cast<std::size_t>(3) * nt * np * nl + 1, 0.0);
  auto bin_index = [](double v, double lo, double hi, int n) {
    if (hi <= lo) return 0;  // degenerate range collapses into the first bin
    const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * n));
    return std::clamp(b, 0, n - 1);  // out-of-range values clamp to edge bins
  };
  for (int e = 0; e < 3; ++e) {
    const std::size_t base = static_cast<std::size_t>(e) * nt * np * nl;
    for (const Pair& p : pairs[e]) {
      const int bt = bin_index(p.theta, 0.0, 180.0, nt);
      const int bp = bin_index(p.phi, -90.0, 90.0, np);
      const int bl = bin_index(p.lambda, bins.lo[e], bins.hi[e], nl);
      f[base + (static_cast<std::size_t>(bt) * np + bp) * nl + bl] += 1.0;
    }
  }

  // Gaussian-weighted SDF value over the neighborhood, sigma in voxels.
  const double s2 = 2.0 * params.gaussian_sigma * params.gaussian_sigma;
  double wsum = 0.0, acc = 0.0;
  for (int dk = -1; dk <= 1; ++dk)
    for (int dj = -1; dj <= 1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        const double w = std::exp(-(di * di + dj * dj + dk * dk) / s2);
        wsum += w;
        acc += w * static_cast<double>(vol.phi.at(v0.i + di, v0.j + dj, v0.k + dk));
      }
  f.back() = acc / wsum;
  return f;
}

inline double similarity(const FeatureVector& f, const FeatureVector& g, double alpha) {
  if (f.size() != g.size())
    throw ValidationError("similarity: feature length mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    d2 += d * d;
  }
  return 1.0 / (1.0 + alpha * std::sqrt(d2));
}

inline int score_bin(double score) {
  // Bins partition (0,1]: bin b covers (b/10, (b+1)/10].
  const int b = static_cast<int>(std::ceil(score * kScoreBins)) - 1;
  return std::clamp(b, 0, kScoreBins - 1);
}

inline BlobVerdict validate_blob(const PlaneSdf& src, const PlaneSdf& tgt,
                                 const RigidTransform& transform,
                                 const BlobCandidate& candidate,
                                 const ValidationParams& params) {
  BlobVerdict verdict;
  verdict.blob_label = candidate.blob_label;
  verdict.synthetic = candidate.synthetic;
  verdict.key_voxels = select_key_voxels(src.volume, candidate.footprint, params);

  const SdfVolume& tv = tgt.volume;
  for (const VoxelIndex& v : verdict.key_voxels) {
    LambdaBins bins;
    const auto f = build_feature(src.volume, v, params, nullptr, &bins);
    if (!f) continue;  // no source evidence at this voxel

    const Vec3 p = transform * src.volume.voxel_center(v.i, v.j, v.k);
    const VoxelIndex tvx{
        static_cast<int>(std::lround((p.x() - tv.origin.x()) / tv.voxel_size - 0.5)),
        static_cast<int>(std::lround((p.y() - tv.origin.y()) / tv.voxel_size - 0.5)),
        static_cast<int>(std::lround((p.z() - tv.origin.z()) / tv.voxel_size - 0.5))};

    double score = params.epsilon_score;
    if (tvx.i >= 0 && tvx.i < tv.nx() && tvx.j >= 0 && tvx.j < tv.ny() && tvx.k >= 0 &&
        tvx.k < tv.nz()) {
      const auto g = build_feature(tv, tvx, params, &bins, nullptr);
      if (g) score = similarity(*f, *g, params.alpha);
    }
    verdict.scores.push_back(score);
    verdict.histogram[score_bin(score)] += 1;
  }

  if (verdict.scores.empty()) {
    // No usable key voxels: the blob keeps its 2D-stage state (changed).
    verdict.low_evidence = true;
    verdict.h_avg = params.epsilon_score;
    verdict.changed = true;
    return verdict;
  }

  double acc = 0.0;
  for (int b = 0; b < kScoreBins; ++b)
    acc += (b + 0.5) / kScoreBins * verdict.histogram[b];
  verdict.h_avg = acc / static_cast<double>(verdict.scores.size());
  verdict.changed = verdict.h_avg < params.delta_blob;
  return verdict;
}

// Applies blob verdicts back onto the mask. Confirmed blobs get their whole
// footprint marked, which restores the full object contour; cleared blobs
// revert to unchanged. Synthetic candidates keep or clear their own cells.
inline ChangeMask refine_mask(const ChangeMask& mask, const std::vector<BlobVerdict>& verdicts,
                              const std::vector<BlobCandidate>& candidates,
                              const ObjectMap& objects) {
  if (verdicts.size() != candidates.size())
    throw ValidationError("refine_mask: verdicts do not cover the candidates");
  ChangeMask out = mask;
  for (std::size_t n = 0; n < verdicts.size(); ++n) {
    const BlobVerdict& v = verdicts[n];
    const BlobCandidate& c = candidates[n];
    if (!c.synthetic) {
      if (c.blob_label < 1 || c.blob_label > static_cast<int>(objects.blobs.size()))
        throw ValidationError("refine_mask: verdict references unknown blob");
      const Component& blob = objects.blobs[c.blob_label - 1];
      for (const Cell& cell : blob.cells)
        out.states.at(cell.x, cell.y) =
            v.changed ? ChangeState::Changed : ChangeState::Unchanged;
    } else {
      for (const Cell& cell : c.cells)
        out.states.at(cell.x, cell.y) =
            v.changed ? ChangeState::Changed : ChangeState::Unchanged;
    }
  }
  return out;
}

// World-frame centers of occupied voxels above changed cells (the plane
// sheet layer k = 0 is skipped, matching the height-map semantics).
inline PointCloud extract_changed_voxels(const PlaneSdf& ps, const ChangeMask& mask) {
  if (mask.nx() != ps.volume.nx() || mask.ny() != ps.volume.ny())
    throw ValidationError("extract_changed_voxels: mask does not match the volume");
  PointCloud cloud;
  for (int y = 0; y < mask.ny(); ++y)
    for (int x = 0; x < mask.nx(); ++x) {
      if (mask.states.at(x, y) != ChangeState::Changed) continue;
      for (int k = 1; k < ps.volume.nz(); ++k)
        if (ps.volume.occupied(x, y, k))
          cloud.append(ps.frame.to_world(ps.volume.voxel_center(x, y, k)), {255, 0, 0});
    }
  return cloud;
}

}  // namespace planesdf

#endif  // PLANESDF_VALIDATE3D_HPP
