#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigkit/math.hpp"

namespace rigkit {

// Joint hierarchy with rest-pose data. Offsets are parent-relative; the
// rest-pose global positions are always derived from them (identity rest
// rotations), so the two stay consistent by construction. rho maps each
// joint to its lateral-symmetric counterpart (itself when unpaired).
struct Skeleton {
  std::vector<std::string> names;
  std::vector<int> parent;       // -1 for the root
  std::vector<Vec3> offsets;     // o
  std::vector<Vec3> rest_global; // g, derived
  std::vector<int> rho;

  size_t joint_count() const { return names.size(); }
  int root() const;
  std::vector<std::vector<int>> children() const;
};

// Validates the tree (single root, no cycles, sizes agree), computes g, and
// infers rho when not supplied. Throws InvalidConfigError on a malformed
// hierarchy.
Skeleton make_skeleton(std::vector<std::string> names, std::vector<int> parent,
                       std::vector<Vec3> offsets,
                       std::optional<std::vector<int>> rho = std::nullopt);

// Checks every Skeleton invariant; throws InvalidConfigError with a message
// naming the first violation.
void validate_skeleton(const Skeleton& s);

// Vertical extent of the rest pose (max g.y - min g.y).
double skeleton_height(const Skeleton& s);

// Bones as (parent index, child index) pairs, child index ascending.
std::vector<std::pair<int, int>> skeleton_bones(const Skeleton& s);
double average_bone_length(const Skeleton& s);

struct PoseTransforms {
  std::vector<Mat3> local_rotation;  // the root entry is its world rotation
  Vec3 root_translation{0, 0, 0};    // added on top of the root offset
  std::vector<RigidTransform> global;
};

// global(j) = global(parent(j)) * Translate(o_j) * Rotate(local_j); the root
// additionally translates by root_translation. Identity rotations with zero
// root translation reproduce rest_global exactly.
PoseTransforms forward_kinematics(const Skeleton& s,
                                  const std::vector<Mat3>& local_rotation,
                                  const Vec3& root_translation);

PoseTransforms rest_pose(const Skeleton& s);

// Per-joint transforms relative to the rest pose: T_j = posed_j * rest_j^-1.
std::vector<RigidTransform> skinning_transforms(const PoseTransforms& rest,
                                                const PoseTransforms& posed);

// Joints counted as toes for grounding, by case-insensitive name substring
// ("toe", "foot_end", "toebase").
std::vector<int> toe_joints(const Skeleton& s);

// Translates the skeleton along the up axis so the lowest toe joint rests at
// height zero. Without any toe joint the lowest joint overall is used and a
// warning is appended.
Skeleton ground_skeleton(const Skeleton& s,
                         std::vector<std::string>* warnings = nullptr);

// Name-convention pairing: exact Left/Right word swap, L_/R_ prefixes,
// .L/.R and _l/_r suffixes, then geometric mirror matching across x = 0.
// Unpaired joints map to themselves; the result is an involution.
std::vector<int> infer_symmetry_map(const Skeleton& s);

// Single structural edits used by augmentation and directly testable:
// insert_joint splits the bone ending at `joint` at its midpoint (the new
// joint becomes joint's parent); remove_joint splices out a non-branching
// interior joint, folding its offset into its single child.
Skeleton insert_joint(const Skeleton& s, int joint,
                      const std::string& name_hint = "");
Skeleton remove_joint(const Skeleton& s, int joint);

struct AugmentConfig {
  int insert_joints = 0;  // joints to add (a mirrored pair counts two)
  int remove_joints = 0;  // joints to splice out, same counting
  double bone_scale_min = 0.8;
  double bone_scale_max = 1.25;
  double root_height_min = 0.9;
  double root_height_max = 1.1;
  double min_bone_length = 1e-4;
};

// Randomized configuration changes: symmetric bone-length scaling, root
// height scaling, midpoint joint insertions and interior joint removals.
// Edits are applied through rho pairs so lateral symmetry is preserved.
// Deterministic under seed.
Skeleton augment_skeleton(const Skeleton& s, uint64_t seed,
                          const AugmentConfig& cfg);

// Hip/shoulder pairs used to build the hip-and-shoulder facing frame on a
// skeleton. Resolution is by name (hip/upleg/thigh, shoulder/clavicle/arm)
// restricted to rho pairs, falling back to the lowest/highest rho-paired
// joints.
struct FacingJoints {
  int left_hip = -1;
  int right_hip = -1;
  int left_shoulder = -1;
  int right_shoulder = -1;
  bool valid() const {
    return left_hip >= 0 && right_hip >= 0 && left_shoulder >= 0 &&
           right_shoulder >= 0;
  }
};

FacingJoints find_facing_joints(const Skeleton& s);

}  // namespace rigkit
