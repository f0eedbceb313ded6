#pragma once

#include "rigkit/math.hpp"

namespace rigkit {

// Continuous 6D rotation representation: the first two columns of a rotation
// matrix. Decoding runs Gram-Schmidt on (a, b) and completes the third column
// by cross product, so any pair of non-degenerate vectors maps onto SO(3).
// decode(encode(R)) == R on rotations; encode(decode(x)) returns the
// Gram-Schmidt representative of x, not x itself.
struct Rotation6D {
  Vec3 a;  // first matrix column (before orthonormalization)
  Vec3 b;  // second matrix column

  static Rotation6D identity() { return {{1, 0, 0}, {0, 1, 0}}; }
};

// Gram-Schmidt decode. Throws DegenerateRotationError when a is near zero or
// b is (anti)parallel to a within ~1e-6 rad.
Mat3 decode_rotation6d(const Rotation6D& r);

// Takes the first two columns of m. Throws NotARotationError unless m is
// orthonormal with det +1 within 1e-9.
Rotation6D encode_rotation6d(const Mat3& m);

// Intrinsic Euler composition: rotations applied in the listed order about
// the body axes, i.e. the matrices multiply left to right.
enum class Axis { X, Y, Z };

Mat3 euler_to_matrix(const std::array<Axis, 3>& order,
                     const std::array<double, 3>& angles_rad);

// Inverse of euler_to_matrix for the ZXY order (the order this project writes
// to BVH). asin input is clamped, so gimbal configurations pick the branch
// with zero third angle.
std::array<double, 3> matrix_to_euler_zxy(const Mat3& r);

// Yaw decomposition about +y: returns theta such that
// rotation_about_y(-theta) * r has its rest facing image (-z) in the x=0
// half-plane. Falls back to the lateral image (+x) when the facing image is
// near vertical.
double yaw_of(const Mat3& r);

}  // namespace rigkit
