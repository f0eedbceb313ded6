#include "rigkit/rotation.hpp"

#include <algorithm>
#include <cmath>

namespace rigkit {

Mat3 rotation_about_axis(const Vec3& axis, double angle) {
  const Vec3 u = normalized(axis);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double ic = 1.0 - c;
  return Mat3::from_rows(
      {c + u.x * u.x * ic, u.x * u.y * ic - u.z * s, u.x * u.z * ic + u.y * s},
      {u.y * u.x * ic + u.z * s, c + u.y * u.y * ic, u.y * u.z * ic - u.x * s},
      {u.z * u.x * ic - u.y * s, u.z * u.y * ic + u.x * s, c + u.z * u.z * ic});
}

Mat3 decode_rotation6d(const Rotation6D& r) {
  if (!finite(r.a) || !finite(r.b)) {
    throw DegenerateRotationError("rotation6d components must be finite");
  }
  const double na = norm(r.a);
  if (na < 1e-12) {
    throw DegenerateRotationError("rotation6d first column is near zero");
  }
  const Vec3 c0 = r.a / na;
  Vec3 c1 = r.b - c0 * dot(c0, r.b);
  const double n1 = norm(c1);
  // sin of the angle between a and b bounds the residual norm from below.
  if (n1 < 1e-6 * std::max(norm(r.b), 1e-300)) {
    throw DegenerateRotationError("rotation6d columns are near parallel");
  }
  if (n1 < 1e-12) {
    throw DegenerateRotationError("rotation6d second column is degenerate");
  }
  c1 = c1 / n1;
  const Vec3 c2 = cross(c0, c1);
  return Mat3::from_columns(c0, c1, c2);
}

Rotation6D encode_rotation6d(const Mat3& m) {
  if (!is_rotation(m, 1e-9)) {
    throw NotARotationError("matrix is not orthonormal with det +1");
  }
  return {m.column(0), m.column(1)};
}

static Mat3 axis_rotation(Axis axis, double angle) {
  switch (axis) {
    case Axis::X:
      return rotation_about_x(angle);
    case Axis::Y:
      return rotation_about_y(angle);
    default:
      return rotation_about_z(angle);
  }
}

Mat3 euler_to_matrix(const std::array<Axis, 3>& order,
                     const std::array<double, 3>& angles_rad) {
  return axis_rotation(order[0], angles_rad[0]) *
         axis_rotation(order[1], angles_rad[1]) *
         axis_rotation(order[2], angles_rad[2]);
}

std::array<double, 3> matrix_to_euler_zxy(const Mat3& r) {
  // R = Rz(a) Rx(b) Ry(c); R(2,1) = sin(b).
  const double sb = std::clamp(r(2, 1), -1.0, 1.0);
  const double b = std::asin(sb);
  const double cb = std::cos(b);
  if (cb > 1e-9) {
    const double a = std::atan2(-r(0, 1), r(1, 1));
    const double c = std::atan2(-r(2, 0), r(2, 2));
    return {a, b, c};
  }
  // Gimbal: fold the y rotation into z.
  const double a = std::atan2(r(1, 0), r(0, 0));
  return {a, b, 0.0};
}

double yaw_of(const Mat3& r) {
  // Horizontal direction of the rest facing image R * (0,0,-1).
  const Vec3 f = r * Vec3{0, 0, -1};
  double x = f.x;
  double z = f.z;
  if (x * x + z * z < 1e-18) {
    // Facing image is vertical; use the lateral image R * (1,0,0) instead.
    const Vec3 l = r * Vec3{1, 0, 0};
    x = l.x;
    z = l.z;
    if (x * x + z * z < 1e-18) {
      return 0.0;
    }
    return wrap_angle(std::atan2(x, z) - M_PI / 2.0);
  }
  return wrap_angle(std::atan2(x, z) - M_PI);
}

}  // namespace rigkit
