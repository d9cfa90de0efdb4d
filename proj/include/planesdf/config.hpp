#ifndef PLANESDF_CONFIG_HPP
#define PLANESDF_CONFIG_HPP

// Pipeline configuration: flat `key = value` text files, `#` comments.
// File values are overridden by inline `key=value` strings from the CLI.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "planesdf/errors.hpp"
#include "planesdf/io.hpp"
#include "planesdf/plane_detection.hpp"
#include "planesdf/plane_sdf.hpp"
#include "planesdf/validate3d.hpp"

namespace planesdf {

struct PipelineConfig {
  // Fusion
  double voxel_size = 0.007;
  double fusing_band = 0.3;
  int truncation_voxels = 4;
  double max_voxels = 1e8;

  // Registration gates
  double delta_n = 0.95;
  double delta_d = 0.2;

  // Height comparison and mask cleanup
  double delta_h = 0.02;
  int min_cluster_cells = 12;
  int dilation_radius = 2;
  double min_overlap = 0.3;

  // 3D validation
  int bins_theta = 5;
  int bins_phi = 5;
  int bins_lambda = 6;
  double alpha = 2.0;
  double delta_blob = 0.9;
  double doh_floor = 1e-6;
  int max_key_voxels = 512;

  // Plane detection
  double inlier_tolerance = 0.01;
  int min_inliers = 1000;
  double orientation_tolerance_deg = 10.0;
  int ransac_iterations = 200;
  int max_planes = 16;
  uint64_t ransac_seed = 1;

  // Evaluation and extras
  double match_radius = 0.014;
  bool icp_refine = false;

  PlaneDetectionParams detection_params() const {
    return {inlier_tolerance, min_inliers, orientation_tolerance_deg,
            ransac_iterations, max_planes, ransac_seed};
  }
  FusionParams fusion_params() const {
    return {voxel_size, fusing_band, truncation_voxels,
            static_cast<std::size_t>(max_voxels)};
  }
  ValidationParams validation_params() const {
    ValidationParams p;
    p.bins_theta = bins_theta;
    p.bins_phi = bins_phi;
    p.bins_lambda = bins_lambda;
    p.alpha = alpha;
    p.delta_blob = delta_blob;
    p.doh_floor = doh_floor;
    p.max_key_voxels = max_key_voxels;
    return p;
  }
};

namespace detail {

inline void config_set(PipelineConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  auto num = [&](double lo) {
    double v;
    if (!parse_double(value, v)) throw ConfigError(key, "non-numeric value '" + value + "'");
    if (v <= lo) throw ConfigError(key, "value must be > " + std::to_string(lo));
    return v;
  };
  auto integer = [&](long lo) {
    long v;
    if (!parse_long(value, v)) throw ConfigError(key, "non-integer value '" + value + "'");
    if (v < lo) throw ConfigError(key, "value must be >= " + std::to_string(lo));
    return v;
  };

  if (key == "voxel_size") cfg.voxel_size = num(0);
  else if (key == "fusing_band") cfg.fusing_band = num(0);
  else if (key == "truncation_voxels") cfg.truncation_voxels = static_cast<int>(integer(1));
  else if (key == "max_voxels") cfg.max_voxels = num(0);
  else if (key == "delta_n") cfg.delta_n = num(0);
  else if (key == "delta_d") cfg.delta_d = num(0);
  else if (key == "delta_h") cfg.delta_h = num(0);
  else if (key == "min_cluster_cells") cfg.min_cluster_cells = static_cast<int>(integer(0));
  else if (key == "dilation_radius") cfg.dilation_radius = static_cast<int>(integer(0));
  else if (key == "min_overlap") cfg.min_overlap = num(0);
  else if (key == "bins_theta") cfg.bins_theta = static_cast<int>(integer(1));
  else if (key == "bins_phi") cfg.bins_phi = static_cast<int>(integer(1));
  else if (key == "bins_lambda") cfg.bins_lambda = static_cast<int>(integer(1));
  else if (key == "alpha") cfg.alpha = num(0);
  else if (key == "delta_blob") cfg.delta_blob = num(0);
  else if (key == "doh_floor") cfg.doh_floor = num(0);
  else if (key == "max_key_voxels") cfg.max_key_voxels = static_cast<int>(integer(1));
  else if (key == "inlier_tolerance") cfg.inlier_tolerance = num(0);
  else if (key == "min_inliers") cfg.min_inliers = static_cast<int>(integer(3));
  else if (key == "orientation_tolerance_deg") cfg.orientation_tolerance_deg = num(0);
  else if (key == "ransac_iterations") cfg.ransac_iterations = static_cast<int>(integer(1));
  else if (key == "max_planes") cfg.max_planes = static_cast<int>(integer(1));
  else if (key == "ransac_seed") cfg.ransac_seed = static_cast<uint64_t>(integer(0));
  else if (key == "match_radius") cfg.match_radius = num(0);
  else if (key == "icp_refine") {
    if (value == "1" || value == "true") cfg.icp_refine = true;
    else if (value == "0" || value == "false") cfg.icp_refine = false;
    else throw ConfigError(key, "expected 0/1/true/false, got '" + value + "'");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace detail

// Applies one `key=value` override string.
inline void apply_override(PipelineConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(assignment, "override must look like key=value");
  detail::config_set(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline PipelineConfig parse_config(const std::string& path,
                                   const std::vector<std::string>& overrides = {}) {
  PipelineConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config for reading");
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError(line, "expected key = value at line " + std::to_string(lineno));
      detail::config_set(cfg, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    }
  }
  for (const std::string& o : overrides) apply_override(cfg, o);
  return cfg;
}

}  // namespace planesdf

#endif  // PLANESDF_CONFIG_HPP
