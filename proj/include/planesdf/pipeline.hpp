#ifndef PLANESDF_PIPELINE_HPP
#define PLANESDF_PIPELINE_HPP

// End-to-end change detection: plane extraction, volume fusion, pairwise
// registration, height-map comparison, mask cleanup, 3D validation, and
// changed-voxel extraction. Plane pairings are processed by a small worker
// pool; results are merged in pairing order so outputs stay deterministic.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "planesdf/change2d.hpp"
#include "planesdf/config.hpp"
#include "planesdf/errors.hpp"
#include "planesdf/evaluation.hpp"
#include "planesdf/plane_detection.hpp"
#include "planesdf/plane_sdf.hpp"
#include "planesdf/point_cloud.hpp"
#include "planesdf/registration.hpp"
#include "planesdf/validate3d.hpp"

namespace planesdf {

enum class Direction { Forward, Backward, Both };

struct PairingArtifacts {
  PlanePairing pairing;
  ChangeMask raw_mask;       // height comparison (HC)
  ChangeMask denoised_mask;  // component filter + dilation (CC)
  ChangeMask refined_mask;   // after 3D validation (3D)
  std::vector<BlobCandidate> candidates;
  std::vector<BlobVerdict> verdicts;
  PointCloud changed_voxels;
};

struct DirectionResult {
  MatchResult match;
  std::vector<PairingArtifacts> pairs;
  PointCloud changed_voxels;  // union over pairings, in pairing order
};

struct PipelineResult {
  std::vector<PlaneSdf> source_planes;
  std::vector<PlaneSdf> target_planes;
  std::optional<DirectionResult> forward;
  std::optional<DirectionResult> backward;
};

inline PairingArtifacts process_pairing(const PlaneSdf& src, const PlaneSdf& tgt,
                                        const PlanePairing& pairing,
                                        const PipelineConfig& cfg) {
  PairingArtifacts art;
  art.pairing = pairing;
  RigidTransform transform = pairing.transform;
  if (cfg.icp_refine)
    transform = refine_inplane_icp(src.height_map, tgt.height_map, transform);

  art.raw_mask = compare_height_maps(src.height_map, tgt.height_map, transform, cfg.delta_h);
  art.denoised_mask = denoise_mask(art.raw_mask, cfg.min_cluster_cells, cfg.dilation_radius);
  art.candidates = extract_candidates(art.denoised_mask, src.object_map, cfg.min_overlap);

  const ValidationParams vp = cfg.validation_params();
  art.verdicts.reserve(art.candidates.size());
  for (const BlobCandidate& cand : art.candidates)
    art.verdicts.push_back(validate_blob(src, tgt, transform, cand, vp));

  art.refined_mask = refine_mask(art.denoised_mask, art.verdicts, art.candidates,
                                 src.object_map);
  art.changed_voxels = extract_changed_voxels(src, art.refined_mask);
  return art;
}

inline DirectionResult run_direction(const std::vector<PlaneSdf>& sources,
                                     const std::vector<PlaneSdf>& targets,
                                     const PipelineConfig& cfg) {
  DirectionResult result;
  result.match = match_planes(sources, targets, cfg.delta_n, cfg.delta_d);

  auto find = [](const std::vector<PlaneSdf>& v, int id) -> const PlaneSdf& {
    for (const auto& p : v)
      if (p.id == id) return p;
    throw InternalError("run_direction: pairing references unknown plane id");
  };

  const std::size_t n = result.match.pairings.size();
  result.pairs.resize(n);
  const unsigned pool = std::min<std::size_t>(
      std::max(1u, std::thread::hardware_concurrency()), n == 0 ? 1 : n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const PlanePairing& pr = result.match.pairings[i];
        result.pairs[i] =
            process_pairing(find(sources, pr.source_id), find(targets, pr.target_id), pr, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  if (n <= 1 || pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (const PairingArtifacts& art : result.pairs) {
    const PointCloud& pc = art.changed_voxels;
    for (std::size_t i = 0; i < pc.size(); ++i)
      result.changed_voxels.append(pc.points[i], pc.colors.empty() ? Rgb{255, 0, 0}
                                                                   : pc.colors[i]);
  }
  return result;
}

inline std::vector<PlaneSdf> build_plane_sdfs(const PointCloud& cloud,
                                              const PipelineConfig& cfg) {
  const std::vector<DetectedPlane> planes = detect_planes(cloud, cfg.detection_params());
  std::vector<PlaneSdf> out;
  out.reserve(planes.size());
  for (std::size_t i = 0; i < planes.size(); ++i)
    out.push_back(instantiate(cloud, planes[i], cfg.fusion_params(), static_cast<int>(i)));
  return out;
}

inline PipelineResult run_pipeline(const PointCloud& source, const PointCloud& target,
                                   const PipelineConfig& cfg,
                                   Direction direction = Direction::Both) {
  PipelineResult result;
  result.source_planes = build_plane_sdfs(source, cfg);
  result.target_planes = build_plane_sdfs(target, cfg);
  if (result.source_planes.empty())
    throw ValidationError("no planes detected in the source cloud");
  if (result.target_planes.empty())
    throw ValidationError("no planes detected in the target cloud");

  if (direction == Direction::Forward || direction == Direction::Both)
    result.forward = run_direction(result.source_planes, result.target_planes, cfg);
  if (direction == Direction::Backward || direction == Direction::Both)
    result.backward = run_direction(result.target_planes, result.source_planes, cfg);
  return result;
}

// --- artifacts --------------------------------------------------------------

namespace detail {

inline std::string fmt_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

// Writes the per-direction artifact set: pairing table, per-pairing stage
// masks and height maps (CSV + PGM), blob verdicts, and the merged
// changed-voxel cloud.
inline void write_direction_artifacts(const DirectionResult& dir,
                                      const std::vector<PlaneSdf>& sources,
                                      const std::vector<PlaneSdf>& targets,
                                      const std::string& out_dir, double band,
                                      bool debug_blobs = false) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return out_dir + "/" + name; };

  {
    std::ofstream out(path("pairings.csv"));
    if (!out) throw IoError(path("pairings.csv"), "cannot open for writing");
    out << "source_id,target_id,cosine,offset_gap\n";
    for (const PlanePairing& pr : dir.match.pairings)
      out << pr.source_id << ',' << pr.target_id << ',' << detail::fmt_g9(pr.cosine) << ','
          << detail::fmt_g9(pr.offset_gap) << '\n';
    for (int id : dir.match.unmatched_source) out << id << ",-1,,\n";
    for (int id : dir.match.unmatched_target) out << "-1," << id << ",,\n";
  }

  auto find = [](const std::vector<PlaneSdf>& v, int id) -> const PlaneSdf& {
    for (const auto& p : v)
      if (p.id == id) return p;
    throw InternalError("write_direction_artifacts: unknown plane id");
  };

  std::ofstream verdicts(path("verdicts.csv"));
  verdicts << "source_id,target_id,blob,synthetic,key_voxels,h_avg,changed,low_evidence\n";

  for (const PairingArtifacts& art : dir.pairs) {
    const PlaneSdf& src = find(sources, art.pairing.source_id);
    const PlaneSdf& tgt = find(targets, art.pairing.target_id);
    const std::string stem = "pair_s" + std::to_string(art.pairing.source_id) + "_t" +
                             std::to_string(art.pairing.target_id);
    save_height_map_csv(src.height_map, path(stem + "_height_src.csv"));
    save_height_map_pgm(src.height_map, band, path(stem + "_height_src.pgm"));
    save_height_map_csv(tgt.height_map, path(stem + "_height_tgt.csv"));
    save_height_map_pgm(tgt.height_map, band, path(stem + "_height_tgt.pgm"));
    save_object_map_pgm(src.object_map, path(stem + "_objects_src.pgm"));
    save_mask_csv(art.raw_mask, path(stem + "_mask_hc.csv"));
    save_mask_pgm(art.raw_mask, path(stem + "_mask_hc.pgm"));
    save_mask_csv(art.denoised_mask, path(stem + "_mask_cc.csv"));
    save_mask_pgm(art.denoised_mask, path(stem + "_mask_cc.pgm"));
    save_mask_csv(art.refined_mask, path(stem + "_mask_3d.csv"));
    save_mask_pgm(art.refined_mask, path(stem + "_mask_3d.pgm"));

    for (std::size_t i = 0; i < art.verdicts.size(); ++i) {
      const BlobVerdict& v = art.verdicts[i];
      verdicts << art.pairing.source_id << ',' << art.pairing.target_id << ','
               << v.blob_label << ',' << (v.synthetic ? 1 : 0) << ','
               << v.key_voxels.size() << ',' << detail::fmt_g9(v.h_avg) << ','
               << (v.changed ? 1 : 0) << ',' << (v.low_evidence ? 1 : 0) << '\n';
      if (debug_blobs) {
        std::ofstream dump(path(stem + "_blob" + std::to_string(i) + ".csv"));
        dump << "i,j,k,doh,similarity\n";
        for (std::size_t kv = 0; kv < v.key_voxels.size(); ++kv) {
          const VoxelIndex& vi = v.key_voxels[kv];
          const auto h = hessian_at(src.volume, vi.i, vi.j, vi.k);
          dump << vi.i << ',' << vi.j << ',' << vi.k << ','
               << detail::fmt_g9(h ? det_of_hessian(*h) : 0.0) << ','
               << detail::fmt_g9(kv < v.scores.size() ? v.scores[kv] : 0.0) << '\n';
        }
        dump << "histogram";
        for (int b : v.histogram) dump << ',' << b;
        dump << '\n';
      }
    }
  }

  save_ply_ascii(dir.changed_voxels, path("changed_voxels.ply"));
}

}  // namespace planesdf

#endif  // PLANESDF_PIPELINE_HPP
