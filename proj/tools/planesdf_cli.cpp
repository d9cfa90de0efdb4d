// Command-line front end for the planesdf change-detection pipeline.
//
//   planesdf detect --source a.ply --target b.ply --out dir [...]
//   planesdf gen    --scenario remove --seed 7 --out dir [...]
//   planesdf eval   --detected det.ply --gt gt.ply [...]
//
// Exit codes: 0 success, 2 input error, 3 config error, 4 internal error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "planesdf/planesdf.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitInternal = 4;

struct DetectOptions {
  std::string source, target, config, out, gt, gt_backward;
  std::string direction = "both";
  std::vector<std::string> overrides;
  long seed = -1;
  bool debug_blobs = false;
};

int run_detect(const DetectOptions& opt) {
  planesdf::PipelineConfig cfg = planesdf::parse_config(opt.config, opt.overrides);
  if (opt.seed >= 0) cfg.ransac_seed = static_cast<uint64_t>(opt.seed);

  planesdf::Direction dir;
  if (opt.direction == "forward") dir = planesdf::Direction::Forward;
  else if (opt.direction == "backward") dir = planesdf::Direction::Backward;
  else if (opt.direction == "both") dir = planesdf::Direction::Both;
  else throw planesdf::ConfigError("direction", "expected forward|backward|both");

  const planesdf::PointCloud source = planesdf::load_point_cloud(opt.source);
  const planesdf::PointCloud target = planesdf::load_point_cloud(opt.target);

  const planesdf::PipelineResult result = planesdf::run_pipeline(source, target, cfg, dir);

  namespace fs = std::filesystem;
  fs::create_directories(opt.out);
  auto report_direction = [&](const planesdf::DirectionResult& d, const std::string& name,
                              const std::string& gt_path) {
    planesdf::write_direction_artifacts(
        d, name == "forward" ? result.source_planes : result.target_planes,
        name == "forward" ? result.target_planes : result.source_planes,
        opt.out + "/" + name, cfg.fusing_band, opt.debug_blobs);
    std::size_t changed_cells = 0;
    for (const auto& p : d.pairs) changed_cells += p.refined_mask.count(planesdf::ChangeState::Changed);
    std::cout << name << ": " << d.match.pairings.size() << " plane pairs, "
              << d.match.unmatched_source.size() << " unmatched source planes, "
              << changed_cells << " changed cells, " << d.changed_voxels.size()
              << " changed voxels\n";
    if (!gt_path.empty()) {
      const planesdf::PointCloud gt = planesdf::load_point_cloud(gt_path);
      const planesdf::EvaluationReport rep =
          planesdf::score(d.changed_voxels, gt, cfg.match_radius, 2.0 * cfg.voxel_size);
      std::ofstream txt(opt.out + "/" + name + "/report.txt");
      txt << planesdf::report_text(rep);
      std::ofstream csv(opt.out + "/" + name + "/report.csv");
      csv << planesdf::report_csv_header() << '\n' << planesdf::report_csv_row(rep) << '\n';
      std::cout << name << " evaluation: precision " << rep.precision << ", recall "
                << rep.recall << ", f1 " << rep.f1 << ", missed " << rep.missed_objects
                << ", wrong clusters " << rep.wrong_clusters << "\n";
    }
  };

  if (result.forward) report_direction(*result.forward, "forward", opt.gt);
  if (result.backward) report_direction(*result.backward, "backward", opt.gt_backward);
  return kExitOk;
}

struct GenOptions {
  std::string scenario = "remove";
  std::string out;
  long seed = 0;
  int objects = 3;
  double noise = 0.0;
  double density = 40000.0;
};

int run_gen(const GenOptions& opt) {
  planesdf::SyntheticScenario sc = planesdf::make_tabletop_scenario(
      planesdf::scenario_kind_from_string(opt.scenario), static_cast<uint64_t>(opt.seed),
      opt.objects, opt.noise);
  sc.density = opt.density;
  const planesdf::ScenePair pair =
      planesdf::generate_scene_pair(sc, static_cast<uint64_t>(opt.seed));

  namespace fs = std::filesystem;
  fs::create_directories(opt.out);
  planesdf::save_ply_ascii(pair.source, opt.out + "/source.ply");
  planesdf::save_ply_ascii(pair.target, opt.out + "/target.ply");
  planesdf::save_ply_ascii(pair.gt_source, opt.out + "/gt_source.ply");
  planesdf::save_ply_ascii(pair.gt_target, opt.out + "/gt_target.ply");

  std::ofstream meta(opt.out + "/scenario.txt");
  meta << "kind: " << planesdf::to_string(sc.kind) << "\nseed: " << opt.seed
       << "\nnoise_sigma: " << sc.noise_sigma << "\ndensity: " << sc.density << "\n";
  for (const auto& obj : sc.objects) {
    meta << "object " << obj.id << ": "
         << (obj.shape == planesdf::ObjectShape::Box ? "box" : "cylinder") << " dims("
         << obj.dim_a << ',' << obj.dim_b << ',' << obj.dim_c << ")"
         << " source=" << (obj.in_source ? "present" : "absent") << "("
         << obj.source_pose.x << ',' << obj.source_pose.y << ',' << obj.source_pose.yaw
         << ")"
         << " target=" << (obj.in_target ? "present" : "absent") << "("
         << obj.target_pose.x << ',' << obj.target_pose.y << ',' << obj.target_pose.yaw
         << ")\n";
  }
  meta << "changed:";
  for (int id : sc.changed_ids) meta << ' ' << id;
  meta << '\n';

  std::cout << "wrote scene pair (" << pair.source.size() << " / " << pair.target.size()
            << " points) to " << opt.out << "\n";
  return kExitOk;
}

struct EvalOptions {
  std::string detected, gt;
  double radius = 0.014;
};

int run_eval(const EvalOptions& opt) {
  const planesdf::PointCloud detected = planesdf::load_point_cloud(opt.detected);
  const planesdf::PointCloud gt = planesdf::load_point_cloud(opt.gt);
  const planesdf::EvaluationReport rep = planesdf::score(detected, gt, opt.radius);
  std::cout << planesdf::report_text(rep);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PlaneSDF scene change detection"};
  app.require_subcommand(1);

  DetectOptions det;
  CLI::App* detect = app.add_subcommand("detect", "detect changes between two point clouds");
  detect->add_option("--source", det.source, "source cloud (.ply or .csv)")->required();
  detect->add_option("--target", det.target, "target cloud (.ply or .csv)")->required();
  detect->add_option("--config", det.config, "pipeline config file (key = value lines)");
  detect->add_option("--out", det.out, "output directory")->required();
  detect->add_option("--direction", det.direction, "forward|backward|both (default both)");
  detect->add_option("--gt", det.gt, "labeled ground-truth cloud for the forward direction");
  detect->add_option("--gt-backward", det.gt_backward,
                     "labeled ground-truth cloud for the backward direction");
  detect->add_option("--seed", det.seed, "override the plane-detection seed");
  detect->add_option("--set", det.overrides, "config override key=value (repeatable)");
  detect->add_flag("--debug-blobs", det.debug_blobs, "dump per-blob key-voxel CSVs");

  GenOptions gen;
  CLI::App* genc = app.add_subcommand("gen", "generate a synthetic tabletop scene pair");
  genc->add_option("--scenario", gen.scenario, "add|remove|move|swap|unchanged")->required();
  genc->add_option("--seed", gen.seed, "generator seed")->required();
  genc->add_option("--out", gen.out, "output directory")->required();
  genc->add_option("--objects", gen.objects, "number of objects (default 3)");
  genc->add_option("--noise", gen.noise, "noise sigma in meters (default 0)");
  genc->add_option("--density", gen.density, "surface sampling density per m^2");

  EvalOptions ev;
  CLI::App* evalc = app.add_subcommand("eval", "score a detection against ground truth");
  evalc->add_option("--detected", ev.detected, "detected changed-voxel cloud")->required();
  evalc->add_option("--gt", ev.gt, "labeled ground-truth cloud")->required();
  evalc->add_option("--radius", ev.radius, "point match radius in meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (detect->parsed()) return run_detect(det);
    if (genc->parsed()) return run_gen(gen);
    if (evalc->parsed()) return run_eval(ev);
    return kExitInput;
  } catch (const planesdf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const planesdf::ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const planesdf::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const planesdf::SizeError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const planesdf::ValidationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
