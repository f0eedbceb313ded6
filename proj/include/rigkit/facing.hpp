#pragma once

#include <optional>

#include "rigkit/math.hpp"

namespace rigkit {

// Character-centric ground frame. lateral points from the character's right
// to its left, facing = normalize(up x lateral), origin is the root joint
// projected onto the ground plane. The axes satisfy up = lateral x facing
// and lateral = facing x up. Canonical rest characters (left side at +x)
// have lateral = +x and facing = -z.
struct FacingFrame {
  Vec3 origin{0, 0, 0};
  Vec3 lateral{1, 0, 0};
  Vec3 up{0, 1, 0};
  Vec3 facing{0, 0, -1};

  // Coordinates of a world point in this frame: (dot lateral, dot up,
  // dot facing).
  Vec3 to_local(const Vec3& world) const {
    const Vec3 d = world - origin;
    return {dot(d, lateral), dot(d, up), dot(d, facing)};
  }

  Vec3 to_world(const Vec3& local) const {
    return origin + lateral * local.x + up * local.y + facing * local.z;
  }

  // Signed yaw of this frame relative to the canonical rest frame.
  double yaw() const;
};

// Builds the frame from hip and shoulder joint positions: the lateral vector
// averages the right-to-left hip and shoulder vectors, the facing direction
// is up x lateral, and lateral is re-orthogonalized against up and facing.
// When the averaged lateral is (anti)parallel to up, falls back to
// prev_facing if given, else world +z; both fallbacks keep the frame usable
// rather than throwing.
FacingFrame compute_facing_frame(const Vec3& left_hip, const Vec3& right_hip,
                                 const Vec3& left_shoulder,
                                 const Vec3& right_shoulder, const Vec3& root,
                                 std::optional<Vec3> prev_facing = std::nullopt);

// Frame derived from a root rigid transform alone: rotation reduced to its
// yaw component, origin = translation projected to the ground. This variant
// is exactly invertible from (yaw, origin), which the motion feature
// round-trip relies on.
FacingFrame facing_frame_from_root(const Mat3& root_rotation,
                                   const Vec3& root_position);

FacingFrame facing_frame_from_yaw(double yaw, const Vec3& origin_on_ground);

}  // namespace rigkit
