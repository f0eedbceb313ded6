#include "rigkit/skeleton.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

#include "rigkit/rng.hpp"

namespace rigkit {

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool contains_ci(const std::string& haystack, const std::string& needle) {
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

// Joint visit order with every parent before its children.
std::vector<int> topological_order(const Skeleton& s) {
  const auto kids = s.children();
  std::vector<int> order;
  order.reserve(s.joint_count());
  std::vector<int> stack{s.root()};
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    order.push_back(j);
    for (auto it = kids[j].rbegin(); it != kids[j].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  return order;
}

std::vector<Vec3> compute_rest_global(const std::vector<int>& parent,
                                      const std::vector<Vec3>& offsets,
                                      const std::vector<int>& order) {
  std::vector<Vec3> g(parent.size());
  for (int j : order) {
    g[j] = parent[j] < 0 ? offsets[j] : g[parent[j]] + offsets[j];
  }
  return g;
}

}  // namespace

int Skeleton::root() const {
  for (size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] < 0) return static_cast<int>(j);
  }
  throw InvalidConfigError("skeleton has no root joint");
}

std::vector<std::vector<int>> Skeleton::children() const {
  std::vector<std::vector<int>> kids(joint_count());
  for (size_t j = 0; j < parent.size(); ++j) {
    if (parent[j] >= 0) kids[parent[j]].push_back(static_cast<int>(j));
  }
  return kids;
}

Skeleton make_skeleton(std::vector<std::string> names, std::vector<int> parent,
                       std::vector<Vec3> offsets,
                       std::optional<std::vector<int>> rho) {
  Skeleton s;
  s.names = std::move(names);
  s.parent = std::move(parent);
  s.offsets = std::move(offsets);
  if (s.names.size() != s.parent.size() || s.names.size() != s.offsets.size()) {
    throw InvalidConfigError("skeleton field sizes disagree");
  }
  if (s.names.empty()) {
    throw InvalidConfigError("skeleton must have at least one joint");
  }
  int roots = 0;
  for (size_t j = 0; j < s.parent.size(); ++j) {
    if (s.parent[j] < 0) {
      ++roots;
    } else if (s.parent[j] >= static_cast<int>(s.joint_count())) {
      throw InvalidConfigError("parent index out of range for joint " +
                               s.names[j]);
    }
  }
  if (roots != 1) {
    throw InvalidConfigError("skeleton must have exactly one root, found " +
                             std::to_string(roots));
  }
  const auto order = topological_order(s);
  if (order.size() != s.joint_count()) {
    throw InvalidConfigError("skeleton hierarchy contains a cycle");
  }
  s.rest_global = compute_rest_global(s.parent, s.offsets, order);
  s.rho = rho.has_value() ? std::move(*rho) : infer_symmetry_map(s);
  validate_skeleton(s);
  return s;
}

void validate_skeleton(const Skeleton& s) {
  const size_t n = s.joint_count();
  if (s.parent.size() != n || s.offsets.size() != n ||
      s.rest_global.size() != n || s.rho.size() != n) {
    throw InvalidConfigError("skeleton field sizes disagree");
  }
  const auto order = topological_order(s);
  if (order.size() != n) {
    throw InvalidConfigError("skeleton hierarchy contains a cycle");
  }
  const auto g = compute_rest_global(s.parent, s.offsets, order);
  for (size_t j = 0; j < n; ++j) {
    if (norm(g[j] - s.rest_global[j]) > 1e-9) {
      throw InvalidConfigError("rest_global inconsistent with offsets at " +
                               s.names[j]);
    }
    const int r = s.rho[j];
    if (r < 0 || r >= static_cast<int>(n) ||
        s.rho[r] != static_cast<int>(j)) {
      throw InvalidConfigError("rho is not an involution at " + s.names[j]);
    }
  }
}

double skeleton_height(const Skeleton& s) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Vec3& g : s.rest_global) {
    lo = std::min(lo, g.y);
    hi = std::max(hi, g.y);
  }
  return hi - lo;
}

std::vector<std::pair<int, int>> skeleton_bones(const Skeleton& s) {
  std::vector<std::pair<int, int>> bones;
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (s.parent[j] >= 0) bones.emplace_back(s.parent[j], static_cast<int>(j));
  }
  return bones;
}

double average_bone_length(const Skeleton& s) {
  const auto bones = skeleton_bones(s);
  if (bones.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [p, c] : bones) {
    total += norm(s.rest_global[c] - s.rest_global[p]);
  }
  return total / static_cast<double>(bones.size());
}

PoseTransforms forward_kinematics(const Skeleton& s,
                                  const std::vector<Mat3>& local_rotation,
                                  const Vec3& root_translation) {
  if (local_rotation.size() != s.joint_count()) {
    throw SizeMismatchError("rotation count does not match joint count");
  }
  for (size_t j = 0; j < local_rotation.size(); ++j) {
    if (!is_rotation(local_rotation[j], 1e-6)) {
      throw InvalidRotationError("local rotation of " + s.names[j] +
                                 " is not orthonormal");
    }
  }
  PoseTransforms pose;
  pose.local_rotation = local_rotation;
  pose.root_translation = root_translation;
  pose.global.resize(s.joint_count());
  for (int j : topological_order(s)) {
    if (s.parent[j] < 0) {
      pose.global[j] = {local_rotation[j], s.offsets[j] + root_translation};
    } else {
      const RigidTransform& gp = pose.global[s.parent[j]];
      pose.global[j] = {gp.rotation * local_rotation[j],
                        gp.translation + gp.rotation * s.offsets[j]};
    }
  }
  return pose;
}

PoseTransforms rest_pose(const Skeleton& s) {
  return forward_kinematics(
      s, std::vector<Mat3>(s.joint_count(), Mat3::identity()), Vec3{0, 0, 0});
}

std::vector<RigidTransform> skinning_transforms(const PoseTransforms& rest,
                                                const PoseTransforms& posed) {
  if (rest.global.size() != posed.global.size()) {
    throw SizeMismatchError("rest and posed joint counts differ");
  }
  std::vector<RigidTransform> out(rest.global.size());
  for (size_t j = 0; j < out.size(); ++j) {
    out[j] = posed.global[j].compose(rest.global[j].inverse());
  }
  return out;
}

std::vector<int> toe_joints(const Skeleton& s) {
  static const char* kToeTokens[] = {"toe", "foot_end", "toebase"};
  std::vector<int> toes;
  for (size_t j = 0; j < s.joint_count(); ++j) {
    for (const char* token : kToeTokens) {
      if (contains_ci(s.names[j], token)) {
        toes.push_back(static_cast<int>(j));
        break;
      }
    }
  }
  return toes;
}

Skeleton ground_skeleton(const Skeleton& s,
                         std::vector<std::string>* warnings) {
  std::vector<int> toes = toe_joints(s);
  if (toes.empty()) {
    if (warnings) {
      warnings->push_back(
          "no toe joint found; grounding on the lowest joint instead");
    }
    toes.resize(s.joint_count());
    std::iota(toes.begin(), toes.end(), 0);
  }
  double min_height = std::numeric_limits<double>::infinity();
  for (int j : toes) {
    min_height = std::min(min_height, s.rest_global[j].y);
  }
  Skeleton out = s;
  out.offsets[out.root()].y -= min_height;
  for (Vec3& g : out.rest_global) {
    g.y -= min_height;
  }
  return out;
}

namespace {

// Candidate counterpart names under the ordered pairing rules.
std::vector<std::string> mirror_name_candidates(const std::string& name) {
  std::vector<std::string> out;
  const auto swap_word = [&](const std::string& from, const std::string& to) {
    const size_t pos = name.find(from);
    if (pos != std::string::npos) {
      std::string swapped = name;
      swapped.replace(pos, from.size(), to);
      out.push_back(swapped);
    }
  };
  // Rule 1: exact Left/Right word swap in either direction and case style.
  swap_word("Left", "Right");
  swap_word("Right", "Left");
  swap_word("left", "right");
  swap_word("right", "left");
  swap_word("LEFT", "RIGHT");
  swap_word("RIGHT", "LEFT");
  // Rule 2: L_/R_ prefixes.
  const auto swap_prefix = [&](const std::string& from, const std::string& to) {
    if (name.rfind(from, 0) == 0) out.push_back(to + name.substr(from.size()));
  };
  swap_prefix("L_", "R_");
  swap_prefix("R_", "L_");
  swap_prefix("l_", "r_");
  swap_prefix("r_", "l_");
  // Rule 3: .L/.R and _l/_r suffixes.
  const auto swap_suffix = [&](const std::string& from, const std::string& to) {
    if (name.size() >= from.size() &&
        name.compare(name.size() - from.size(), from.size(), from) == 0) {
      out.push_back(name.substr(0, name.size() - from.size()) + to);
    }
  };
  swap_suffix(".L", ".R");
  swap_suffix(".R", ".L");
  swap_suffix("_l", "_r");
  swap_suffix("_r", "_l");
  swap_suffix("_L", "_R");
  swap_suffix("_R", "_L");
  return out;
}

}  // namespace

std::vector<int> infer_symmetry_map(const Skeleton& s) {
  const size_t n = s.joint_count();
  std::vector<int> rho(n);
  std::iota(rho.begin(), rho.end(), 0);
  std::vector<bool> claimed(n, false);

  const auto find_by_name = [&](const std::string& name) -> int {
    for (size_t k = 0; k < n; ++k) {
      if (!claimed[k] && s.names[k] == name) return static_cast<int>(k);
    }
    return -1;
  };

  // Name rules first, in joint order.
  for (size_t j = 0; j < n; ++j) {
    if (claimed[j]) continue;
    for (const std::string& candidate : mirror_name_candidates(s.names[j])) {
      if (candidate == s.names[j]) continue;
      const int k = find_by_name(candidate);
      if (k >= 0 && k != static_cast<int>(j)) {
        rho[j] = k;
        rho[k] = static_cast<int>(j);
        claimed[j] = claimed[k] = true;
        break;
      }
    }
  }

  // Geometric mirror matching as a last resort.
  const double tol = 1e-3 * std::max(average_bone_length(s), 1e-12);
  for (size_t j = 0; j < n; ++j) {
    if (claimed[j]) continue;
    const Vec3 mirrored{-s.rest_global[j].x, s.rest_global[j].y,
                        s.rest_global[j].z};
    int best = -1;
    double best_d = tol;
    for (size_t k = 0; k < n; ++k) {
      if (claimed[k] || k == j) continue;
      const double d = norm(s.rest_global[k] - mirrored);
      if (d <= best_d) {
        best_d = d;
        best = static_cast<int>(k);
      }
    }
    if (best >= 0) {
      rho[j] = best;
      rho[best] = static_cast<int>(j);
      claimed[j] = claimed[best] = true;
    }
  }
  return rho;
}

namespace {

std::string unique_name(const std::vector<std::string>& names,
                        const std::string& base) {
  std::string candidate = base;
  int suffix = 2;
  while (std::find(names.begin(), names.end(), candidate) != names.end()) {
    candidate = base + std::to_string(suffix++);
  }
  return candidate;
}

}  // namespace

Skeleton insert_joint(const Skeleton& s, int joint,
                      const std::string& name_hint) {
  if (joint < 0 || joint >= static_cast<int>(s.joint_count())) {
    throw IndexOutOfRangeError("insert_joint: joint index out of range");
  }
  if (s.parent[joint] < 0) {
    throw InvalidConfigError("insert_joint: cannot split above the root");
  }
  std::vector<std::string> names = s.names;
  std::vector<int> parent = s.parent;
  std::vector<Vec3> offsets = s.offsets;

  const int fresh = static_cast<int>(names.size());
  const Vec3 half = s.offsets[joint] * 0.5;
  names.push_back(unique_name(
      names, name_hint.empty() ? s.names[joint] + "_mid" : name_hint));
  parent.push_back(s.parent[joint]);
  offsets.push_back(half);
  parent[joint] = fresh;
  offsets[joint] = half;
  return make_skeleton(std::move(names), std::move(parent), std::move(offsets));
}

Skeleton remove_joint(const Skeleton& s, int joint) {
  if (joint < 0 || joint >= static_cast<int>(s.joint_count())) {
    throw IndexOutOfRangeError("remove_joint: joint index out of range");
  }
  if (s.parent[joint] < 0) {
    throw InvalidConfigError("remove_joint: cannot remove the root");
  }
  const auto kids = s.children();
  if (kids[joint].size() != 1) {
    throw InvalidConfigError(
        "remove_joint: only non-branching interior joints can be removed");
  }
  const int child = kids[joint][0];

  std::vector<std::string> names;
  std::vector<int> parent;
  std::vector<Vec3> offsets;
  std::vector<int> remap(s.joint_count(), -1);
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (static_cast<int>(j) == joint) continue;
    remap[j] = static_cast<int>(names.size());
    names.push_back(s.names[j]);
    offsets.push_back(static_cast<int>(j) == child
                          ? s.offsets[joint] + s.offsets[j]
                          : s.offsets[j]);
    parent.push_back(s.parent[j]);
  }
  for (int& p : parent) {
    if (p == joint) p = s.parent[joint];
    if (p >= 0) p = remap[p];
  }
  return make_skeleton(std::move(names), std::move(parent), std::move(offsets));
}

namespace {

bool hip_like(const std::string& name) {
  return contains_ci(name, "hip") || contains_ci(name, "pelvis") ||
         contains_ci(name, "upleg");
}

std::vector<int> canonical_reps(const Skeleton& s,
                                const std::vector<bool>& eligible) {
  std::vector<int> reps;
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (eligible[j] && static_cast<int>(j) <= s.rho[j]) {
      reps.push_back(static_cast<int>(j));
    }
  }
  return reps;
}

}  // namespace

Skeleton augment_skeleton(const Skeleton& s, uint64_t seed,
                          const AugmentConfig& cfg) {
  if (cfg.bone_scale_min <= 0.0 || cfg.bone_scale_max < cfg.bone_scale_min ||
      cfg.root_height_min <= 0.0 ||
      cfg.root_height_max < cfg.root_height_min || cfg.insert_joints < 0 ||
      cfg.remove_joints < 0 || cfg.min_bone_length < 0.0) {
    throw InvalidConfigError("augment_skeleton: invalid config ranges");
  }
  Rng rng(seed);
  Skeleton out = s;

  // Bone-length scaling, applied per rho pair so symmetry is preserved.
  {
    std::vector<bool> eligible(out.joint_count(), false);
    for (size_t j = 0; j < out.joint_count(); ++j) {
      eligible[j] = out.parent[j] >= 0;
    }
    for (int j : canonical_reps(out, eligible)) {
      double f = rng.range(cfg.bone_scale_min, cfg.bone_scale_max);
      const double len = norm(out.offsets[j]);
      if (len > 0.0 && len * f < cfg.min_bone_length) {
        f = cfg.min_bone_length / len;
      }
      out.offsets[j] *= f;
      const int m = out.rho[j];
      if (m != j && out.parent[m] >= 0) {
        out.offsets[m] *= f;
      }
    }
  }

  // Root height.
  out.offsets[out.root()].y *= rng.range(cfg.root_height_min, cfg.root_height_max);
  out = make_skeleton(out.names, out.parent, out.offsets, out.rho);

  // Midpoint insertions. insert_joints counts joints, not edit events; a
  // mirrored pair adds two, so when one slot remains only self-paired bones
  // are eligible.
  for (int remaining = cfg.insert_joints; remaining > 0;) {
    std::vector<bool> eligible(out.joint_count(), false);
    for (size_t j = 0; j < out.joint_count(); ++j) {
      eligible[j] = out.parent[j] >= 0 &&
                    norm(out.offsets[j]) >= 2.0 * cfg.min_bone_length &&
                    (remaining >= 2 || out.rho[j] == static_cast<int>(j));
    }
    const auto reps = canonical_reps(out, eligible);
    if (reps.empty()) break;
    const int j = reps[rng.index(reps.size())];
    const int m = out.rho[j];
    out = insert_joint(out, j);
    --remaining;
    if (m != j) {
      out = insert_joint(out, m);
      --remaining;
    }
  }

  // Interior removals, same joint-count semantics.
  for (int remaining = cfg.remove_joints; remaining > 0;) {
    const auto kids = out.children();
    std::vector<bool> eligible(out.joint_count(), false);
    for (size_t j = 0; j < out.joint_count(); ++j) {
      eligible[j] = out.parent[j] >= 0 && kids[j].size() == 1 &&
                    !hip_like(out.names[j]) &&
                    (remaining >= 2 || out.rho[j] == static_cast<int>(j));
    }
    const auto reps = canonical_reps(out, eligible);
    if (reps.empty()) break;
    const int j = reps[rng.index(reps.size())];
    int m = out.rho[j];
    out = remove_joint(out, j);
    --remaining;
    if (m != j) {
      if (m > j) --m;
      const auto kids2 = out.children();
      if (out.parent[m] >= 0 && kids2[m].size() == 1 &&
          !hip_like(out.names[m])) {
        out = remove_joint(out, m);
        --remaining;
      }
    }
  }

  validate_skeleton(out);
  return out;
}

FacingJoints find_facing_joints(const Skeleton& s) {
  static const char* kHipTokens[] = {"upleg", "hip", "thigh"};
  static const char* kShoulderTokens[] = {"shoulder", "clavicle", "collar",
                                          "arm"};
  FacingJoints out;

  const auto pick_pair = [&](const char* const* tokens, size_t token_count,
                             int& left, int& right) {
    for (size_t t = 0; t < token_count && left < 0; ++t) {
      for (size_t j = 0; j < s.joint_count(); ++j) {
        const int m = s.rho[j];
        if (m == static_cast<int>(j)) continue;
        if (!contains_ci(s.names[j], tokens[t])) continue;
        // Left member = larger rest x of the pair.
        const int l = s.rest_global[j].x >= s.rest_global[m].x
                          ? static_cast<int>(j)
                          : m;
        left = l;
        right = s.rho[l];
        break;
      }
    }
  };
  pick_pair(kHipTokens, 3, out.left_hip, out.right_hip);
  pick_pair(kShoulderTokens, 4, out.left_shoulder, out.right_shoulder);

  // Fallback: lowest and highest rho pairs.
  if (out.left_hip < 0 || out.left_shoulder < 0) {
    int lo_pair = -1;
    int hi_pair = -1;
    double lo_y = std::numeric_limits<double>::infinity();
    double hi_y = -lo_y;
    for (size_t j = 0; j < s.joint_count(); ++j) {
      const int m = s.rho[j];
      if (m <= static_cast<int>(j)) continue;
      const double y = 0.5 * (s.rest_global[j].y + s.rest_global[m].y);
      if (y < lo_y) {
        lo_y = y;
        lo_pair = static_cast<int>(j);
      }
      if (y > hi_y) {
        hi_y = y;
        hi_pair = static_cast<int>(j);
      }
    }
    const auto assign = [&](int pair, int& left, int& right) {
      if (pair < 0 || left >= 0) return;
      const int m = s.rho[pair];
      const int l =
          s.rest_global[pair].x >= s.rest_global[m].x ? pair : m;
      left = l;
      right = s.rho[l];
    };
    assign(lo_pair, out.left_hip, out.right_hip);
    assign(hi_pair, out.left_shoulder, out.right_shoulder);
  }
  return out;
}

}  // namespace rigkit
