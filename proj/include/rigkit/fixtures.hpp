#pragma once

#include <cstdint>
#include <vector>

#include "rigkit/mesh.hpp"
#include "rigkit/skeleton.hpp"

namespace rigkit {

enum class CharacterTemplate { BipedSimple, BipedBranchy, TwoBoneCylinder };
enum class ClipKind { Wave, Crouch, RandomSmooth };

struct CharacterParams {
  int ring_resolution = 8;  // vertices per tube ring
  int rings_per_bone = 3;   // interior rings along each bone
  double radius = 0.1;      // tube radius
  double falloff_width = 0.45;
};

struct ClipParams {
  double max_angle = M_PI / 4.0;  // per-joint rotation bound, radians
  double root_travel = 0.25;
};

// Synthetic character with ground-truth rig, weights and motion. Meshes are
// capped tubes, one per bone, mirrored exactly across x = 0 for rho pairs:
// vertex_mirror[i] is the vertex whose rest position is (-x, y, z) of i, and
// gt weight rows are rho-permuted mirrors of each other by construction.
struct SyntheticCharacter {
  Skeleton skeleton;
  Mesh mesh;
  DenseMatrix gt_weights;
  std::vector<std::vector<PoseTransforms>> gt_clips;
  std::vector<int> vertex_mirror;
};

// Deterministic under seed. Weights use a documented smoothstep falloff over
// the two nearest bones: with s = clamp(distance / falloff_width, 0, 1),
// the unnormalized weight is 1 - (3 s^2 - 2 s^3); rows renormalize, and a
// vertex beyond the falloff of both bones snaps to its nearest joint.
SyntheticCharacter make_character(CharacterTemplate tmpl, uint64_t seed,
                                  const CharacterParams& params = {});

// Smooth seeded clips; frame 0 is always the rest pose and every joint angle
// stays within params.max_angle.
std::vector<PoseTransforms> make_clip(const Skeleton& s, ClipKind kind,
                                      int frames, uint64_t seed,
                                      const ClipParams& params = {});

const char* character_template_name(CharacterTemplate tmpl);
const char* clip_kind_name(ClipKind kind);

}  // namespace rigkit
