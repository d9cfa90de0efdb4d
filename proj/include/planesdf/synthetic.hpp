#ifndef PLANESDF_SYNTHETIC_HPP
#define PLANESDF_SYNTHETIC_HPP

// Synthetic tabletop scene pairs with ground-truth change annotations.
// A scene is a floor plane, a table plane, and primitive objects standing
// on the table. Sampling is organized so that every scene element draws
// from its own seeded stream: elements that are identical between the two
// scenes (same shape, same pose) produce bit-identical points, and for an
// unchanged scenario the whole pair is bit-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "planesdf/errors.hpp"
#include "planesdf/point_cloud.hpp"
#include "planesdf/random.hpp"

namespace planesdf {

enum class ScenarioKind { Add, Remove, Move, Swap, Unchanged };

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Add: return "add";
    case ScenarioKind::Remove: return "remove";
    case ScenarioKind::Move: return "move";
    case ScenarioKind::Swap: return "swap";
    case ScenarioKind::Unchanged: return "unchanged";
  }
  return "?";
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "add") return ScenarioKind::Add;
  if (s == "remove") return ScenarioKind::Remove;
  if (s == "move") return ScenarioKind::Move;
  if (s == "swap") return ScenarioKind::Swap;
  if (s == "unchanged") return ScenarioKind::Unchanged;
  throw ValidationError("unknown scenario kind '" + s + "'");
}

enum class ObjectShape { Box, Cylinder };

// Pose of an object on the table: footprint center and yaw about +z.
struct TablePose {
  double x = 0.0, y = 0.0, yaw = 0.0;
  bool operator==(const TablePose&) const = default;
};

struct ObjectSpec {
  int id = 0;
  ObjectShape shape = ObjectShape::Box;
  // Box: full extents sx, sy, sz. Cylinder: radius, height (dim_c unused).
  double dim_a = 0.1, dim_b = 0.1, dim_c = 0.1;

  bool in_source = true;
  bool in_target = true;
  TablePose source_pose;
  TablePose target_pose;

  double height() const {
    return shape == ObjectShape::Box ? dim_c : dim_b;
  }
  // Circumscribed footprint radius, for placement and box tests.
  double footprint_radius() const {
    return shape == ObjectShape::Box
               ? 0.5 * std::hypot(dim_a, dim_b)
               : dim_a;
  }
};

struct SyntheticScenario {
  ScenarioKind kind = ScenarioKind::Unchanged;
  double table_width = 1.2;
  double table_depth = 0.8;
  double table_height = 0.75;
  double floor_width = 2.4;
  double floor_depth = 2.4;
  double noise_sigma = 0.0;     // meters, isotropic, truncated at 3 sigma
  double density = 40000.0;     // points per square meter
  std::vector<ObjectSpec> objects;
  std::vector<int> changed_ids;
};

struct ScenePair {
  PointCloud source;
  PointCloud target;
  // Points of changed objects as sampled in each scene, labeled by object id.
  PointCloud gt_source;
  PointCloud gt_target;
};

namespace detail {

inline bool footprint_contains(const ObjectSpec& obj, const TablePose& pose,
                               double x, double y) {
  const double c = std::cos(-pose.yaw), s = std::sin(-pose.yaw);
  const double dx = x - pose.x, dy = y - pose.y;
  const double lx = c * dx - s * dy, ly = s * dx + c * dy;
  if (obj.shape == ObjectShape::Box)
    return std::abs(lx) <= 0.5 * obj.dim_a && std::abs(ly) <= 0.5 * obj.dim_b;
  return lx * lx + ly * ly <= obj.dim_a * obj.dim_a;
}

inline bool footprint_inside_table(const SyntheticScenario& sc, const ObjectSpec& obj,
                                   const TablePose& pose) {
  const double r = obj.footprint_radius();
  return std::abs(pose.x) + r <= 0.5 * sc.table_width &&
         std::abs(pose.y) + r <= 0.5 * sc.table_depth;
}

inline uint64_t pose_hash(const TablePose& p) {
  auto bits = [](double v) {
    uint64_t u;
    static_assert(sizeof(u) == sizeof(v));
    std::memcpy(&u, &v, sizeof(u));
    return u;
  };
  return mix_seed(mix_seed(bits(p.x), bits(p.y)), bits(p.yaw));
}

// Uniform samples over an axis-aligned rectangle, z fixed.
inline void sample_rect(std::mt19937_64& rng, double cx, double cy, double w, double d,
                        double z, double density, std::vector<Vec3>& out) {
  const long n = std::llround(w * d * density);
  for (long i = 0; i < n; ++i) {
    const double x = cx + (uniform01(rng) - 0.5) * w;
    const double y = cy + (uniform01(rng) - 0.5) * d;
    out.emplace_back(x, y, z);
  }
}

// Object surface samples in the object-local frame (base center at origin,
// +z up). Bottom faces are skipped: they rest on the table.
inline std::vector<Vec3> sample_object_local(std::mt19937_64& rng, const ObjectSpec& obj,
                                             double density) {
  std::vector<Vec3> pts;
  if (obj.shape == ObjectShape::Box) {
    const double sx = obj.dim_a, sy = obj.dim_b, sz = obj.dim_c;
    const long n_top = std::llround(sx * sy * density);
    for (long i = 0; i < n_top; ++i)
      pts.emplace_back((uniform01(rng) - 0.5) * sx, (uniform01(rng) - 0.5) * sy, sz);
    const long n_x = std::llround(sx * sz * density);  // faces y = +-sy/2
    for (int side = 0; side < 2; ++side)
      for (long i = 0; i < n_x; ++i)
        pts.emplace_back((uniform01(rng) - 0.5) * sx, (side ? 0.5 : -0.5) * sy,
                         uniform01(rng) * sz);
    const long n_y = std::llround(sy * sz * density);  // faces x = +-sx/2
    for (int side = 0; side < 2; ++side)
      for (long i = 0; i < n_y; ++i)
        pts.emplace_back((side ? 0.5 : -0.5) * sx, (uniform01(rng) - 0.5) * sy,
                         uniform01(rng) * sz);
  } else {
    const double r = obj.dim_a, h = obj.dim_b;
    const double pi = 3.14159265358979323846;
    const long n_top = std::llround(pi * r * r * density);
    for (long i = 0; i < n_top; ++i) {
      const double rr = r * std::sqrt(uniform01(rng));
      const double a = uniform01(rng) * 2.0 * pi;
      pts.emplace_back(rr * std::cos(a), rr * std::sin(a), h);
    }
    const long n_side = std::llround(2.0 * pi * r * h * density);
    for (long i = 0; i < n_side; ++i) {
      const double a = uniform01(rng) * 2.0 * pi;
      pts.emplace_back(r * std::cos(a), r * std::sin(a), uniform01(rng) * h);
    }
  }
  return pts;
}

inline Vec3 pose_to_world(const TablePose& pose, double table_z, const Vec3& local) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  return {pose.x + c * local.x() - s * local.y(),
          pose.y + s * local.x() + c * local.y(),
          table_z + local.z()};
}

}  // namespace detail

inline void validate_scenario(const SyntheticScenario& sc) {
  if (sc.table_width <= 0 || sc.table_depth <= 0 || sc.table_height <= 0 ||
      sc.floor_width <= 0 || sc.floor_depth <= 0)
    throw ValidationError("scenario: non-positive scene dimensions");
  if (sc.noise_sigma < 0) throw ValidationError("scenario: negative noise sigma");
  if (sc.density <= 0) throw ValidationError("scenario: non-positive density");
  for (const auto& obj : sc.objects) {
    if (obj.dim_a <= 0 || obj.dim_b <= 0 ||
        (obj.shape == ObjectShape::Box && obj.dim_c <= 0))
      throw ValidationError("scenario: object " + std::to_string(obj.id) +
                            " has a zero-size dimension");
    if (obj.in_source && !detail::footprint_inside_table(sc, obj, obj.source_pose))
      throw ValidationError("scenario: object " + std::to_string(obj.id) +
                            " source footprint outside the table");
    if (obj.in_target && !detail::footprint_inside_table(sc, obj, obj.target_pose))
      throw ValidationError("scenario: object " + std::to_string(obj.id) +
                            " target footprint outside the table");
  }
  std::vector<int> expect;
  for (const auto& obj : sc.objects) {
    const bool changed = obj.in_source != obj.in_target ||
                         (obj.in_source && !(obj.source_pose == obj.target_pose));
    if (changed) expect.push_back(obj.id);
  }
  std::vector<int> got = sc.changed_ids;
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  if (got != expect)
    throw ValidationError("scenario: changed_ids inconsistent with object states");
  if (sc.kind == ScenarioKind::Unchanged && !expect.empty())
    throw ValidationError("scenario: unchanged scenario lists changed objects");
}

inline ScenePair generate_scene_pair(const SyntheticScenario& sc, uint64_t seed) {
  validate_scenario(sc);
  ScenePair pair;

  struct SceneRole {
    PointCloud* cloud;
    PointCloud* gt;
    bool target;
  };
  const SceneRole roles[2] = {{&pair.source, &pair.gt_source, false},
                              {&pair.target, &pair.gt_target, true}};

  constexpr uint64_t kFloorElem = 0, kTableElem = 1, kObjectElemBase = 2;

  for (const SceneRole& role : roles) {
    // Floor.
    {
      std::mt19937_64 rng(mix_seed(seed, kFloorElem));
      std::mt19937_64 noise(mix_seed(mix_seed(seed, kFloorElem ^ 0x5eedull), 0));
      std::vector<Vec3> pts;
      detail::sample_rect(rng, 0, 0, sc.floor_width, sc.floor_depth, 0.0, sc.density, pts);
      for (const Vec3& p : pts) {
        Vec3 q = p;
        if (sc.noise_sigma > 0)
          q += Vec3(truncated_gaussian(noise, sc.noise_sigma),
                    truncated_gaussian(noise, sc.noise_sigma),
                    truncated_gaussian(noise, sc.noise_sigma));
        role.cloud->append(q, {120, 120, 120});
      }
    }

    // Table top. Candidate points and their noise are drawn before any
    // footprint rejection, so the accepted subset is identical across the
    // two scenes wherever the occluding objects are identical.
    {
      std::mt19937_64 rng(mix_seed(seed, kTableElem));
      std::mt19937_64 noise(mix_seed(mix_seed(seed, kTableElem ^ 0x5eedull), 0));
      std::vector<Vec3> pts;
      detail::sample_rect(rng, 0, 0, sc.table_width, sc.table_depth, sc.table_height,
                          sc.density, pts);
      for (const Vec3& p : pts) {
        Vec3 n = Vec3::Zero();
        if (sc.noise_sigma > 0)
          n = Vec3(truncated_gaussian(noise, sc.noise_sigma),
                   truncated_gaussian(noise, sc.noise_sigma),
                   truncated_gaussian(noise, sc.noise_sigma));
        bool covered = false;
        for (const auto& obj : sc.objects) {
          const bool present = role.target ? obj.in_target : obj.in_source;
          if (!present) continue;
          const TablePose& pose = role.target ? obj.target_pose : obj.source_pose;
          if (detail::footprint_contains(obj, pose, p.x(), p.y())) {
            covered = true;
            break;
          }
        }
        if (!covered) role.cloud->append(p + n, {170, 120, 60});
      }
    }

    // Objects.
    for (std::size_t i = 0; i < sc.objects.size(); ++i) {
      const ObjectSpec& obj = sc.objects[i];
      const bool present = role.target ? obj.in_target : obj.in_source;
      if (!present) continue;
      const TablePose& pose = role.target ? obj.target_pose : obj.source_pose;

      std::mt19937_64 rng(mix_seed(seed, kObjectElemBase + i));
      std::mt19937_64 noise(mix_seed(mix_seed(seed, (kObjectElemBase + i) ^ 0x5eedull),
                                     detail::pose_hash(pose)));
      const std::vector<Vec3> local = detail::sample_object_local(rng, obj, sc.density);
      const bool changed = std::find(sc.changed_ids.begin(), sc.changed_ids.end(),
                                     obj.id) != sc.changed_ids.end();
      for (const Vec3& lp : local) {
        Vec3 q = detail::pose_to_world(pose, sc.table_height, lp);
        if (sc.noise_sigma > 0)
          q += Vec3(truncated_gaussian(noise, sc.noise_sigma),
                    truncated_gaussian(noise, sc.noise_sigma),
                    truncated_gaussian(noise, sc.noise_sigma));
        role.cloud->append(q, {60, 140, 200});
        if (changed) {
          role.gt->points.push_back(q);
          role.gt->labels.push_back(obj.id);
        }
      }
    }
  }
  return pair;
}

// Seeded default scenario: a few boxes/cylinders with heights spanning the
// 5 cm - 35 cm range, placed without overlap, changed per the scenario kind.
inline SyntheticScenario make_tabletop_scenario(ScenarioKind kind, uint64_t seed,
                                                int object_count = 3,
                                                double noise_sigma = 0.0) {
  SyntheticScenario sc;
  sc.kind = kind;
  sc.noise_sigma = noise_sigma;

  std::mt19937_64 rng(mix_seed(seed, 0xabcdefull));
  const int n_pose = object_count + 1;  // one spare pose for move/swap room

  // Objects first: dims drive the placement radius.
  double max_r = 0.0;
  for (int i = 0; i < object_count; ++i) {
    ObjectSpec obj;
    obj.id = i;
    obj.shape = (uniform_index(rng, 2) == 0) ? ObjectShape::Box : ObjectShape::Cylinder;
    const double h = uniform(rng, 0.05, 0.35);
    if (obj.shape == ObjectShape::Box) {
      obj.dim_a = uniform(rng, 0.06, 0.18);
      obj.dim_b = uniform(rng, 0.06, 0.18);
      obj.dim_c = h;
    } else {
      obj.dim_a = uniform(rng, 0.03, 0.09);
      obj.dim_b = h;
    }
    max_r = std::max(max_r, obj.footprint_radius());
    sc.objects.push_back(obj);
  }

  // Poses: rejection-sample centers, uniform separation radius for all.
  const double margin = 0.03;
  const double lim_x = 0.5 * sc.table_width - max_r - 0.01;
  const double lim_y = 0.5 * sc.table_depth - max_r - 0.01;
  std::vector<TablePose> poses;
  int attempts = 0;
  while (static_cast<int>(poses.size()) < n_pose) {
    if (++attempts > 100000)
      throw ValidationError("make_tabletop_scenario: cannot place objects");
    TablePose p{uniform(rng, -lim_x, lim_x), uniform(rng, -lim_y, lim_y),
                uniform(rng, 0.0, 3.14159265358979323846)};
    bool ok = true;
    for (const auto& q : poses)
      if (std::hypot(p.x - q.x, p.y - q.y) < 2.0 * max_r + margin) ok = false;
    if (ok) poses.push_back(p);
  }
  for (int i = 0; i < object_count; ++i) {
    sc.objects[i].source_pose = poses[i];
    sc.objects[i].target_pose = poses[i];
  }

  switch (kind) {
    case ScenarioKind::Unchanged:
      break;
    case ScenarioKind::Add:
      sc.objects[0].in_source = false;
      sc.changed_ids = {0};
      break;
    case ScenarioKind::Remove:
      sc.objects[0].in_target = false;
      sc.changed_ids = {0};
      break;
    case ScenarioKind::Move:
      sc.objects[0].target_pose = poses[object_count];
      sc.changed_ids = {0};
      break;
    case ScenarioKind::Swap:
      if (object_count < 2)
        throw ValidationError("swap scenario needs at least two objects");
      sc.objects[0].target_pose = sc.objects[1].source_pose;
      sc.objects[1].target_pose = sc.objects[0].source_pose;
      sc.changed_ids = {0, 1};
      break;
  }
  return sc;
}

}  // namespace planesdf

#endif  // PLANESDF_SYNTHETIC_HPP
