#include "rigkit/facing.hpp"

#include <cmath>

#include "rigkit/rotation.hpp"

namespace rigkit {

namespace {
const Vec3 kUp{0, 1, 0};
}

double FacingFrame::yaw() const {
  return wrap_angle(std::atan2(facing.x, facing.z) - M_PI);
}

FacingFrame compute_facing_frame(const Vec3& left_hip, const Vec3& right_hip,
                                 const Vec3& left_shoulder,
                                 const Vec3& right_shoulder, const Vec3& root,
                                 std::optional<Vec3> prev_facing) {
  const Vec3 hip_vec = left_hip - right_hip;
  const Vec3 shoulder_vec = left_shoulder - right_shoulder;
  // Hips and shoulders weighted equally.
  const Vec3 lateral_avg = (hip_vec + shoulder_vec) * 0.5;

  FacingFrame frame;
  frame.up = kUp;
  frame.origin = {root.x, 0.0, root.z};

  Vec3 facing = cross(kUp, lateral_avg);
  const double fn = norm(facing);
  if (fn < 1e-12 * std::max(1.0, norm(lateral_avg))) {
    // Lateral collapsed onto the up axis.
    facing = prev_facing.has_value() ? *prev_facing : Vec3{0, 0, 1};
    facing.y = 0.0;
    const double n = norm(facing);
    if (n < 1e-12) {
      facing = {0, 0, 1};
    } else {
      facing = facing / n;
    }
  } else {
    facing = facing / fn;
  }
  frame.facing = facing;

  // Gram-Schmidt the lateral against up and facing.
  Vec3 lateral = lateral_avg - kUp * dot(kUp, lateral_avg) -
                 facing * dot(facing, lateral_avg);
  const double ln = norm(lateral);
  if (ln < 1e-12) {
    lateral = cross(facing, kUp);
  } else {
    lateral = lateral / ln;
  }
  frame.lateral = lateral;
  return frame;
}

FacingFrame facing_frame_from_root(const Mat3& root_rotation,
                                   const Vec3& root_position) {
  return facing_frame_from_yaw(yaw_of(root_rotation),
                               {root_position.x, 0.0, root_position.z});
}

FacingFrame facing_frame_from_yaw(double yaw, const Vec3& origin_on_ground) {
  const Mat3 r = rotation_about_y(yaw);
  FacingFrame frame;
  frame.origin = {origin_on_ground.x, 0.0, origin_on_ground.z};
  frame.lateral = r * Vec3{1, 0, 0};
  frame.up = kUp;
  frame.facing = r * Vec3{0, 0, -1};
  return frame;
}

}  // namespace rigkit
