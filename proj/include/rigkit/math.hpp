#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rigkit/errors.hpp"

namespace rigkit {

// World conventions used throughout: up axis is +y, the ground plane is y = 0.
inline constexpr int kUpAxis = 1;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm_sq(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm_sq(v)); }

inline Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (n <= 0.0) {
    throw DegenerateRotationError("cannot normalize zero vector");
  }
  return v / n;
}

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }

  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    Mat3 out;
    out.m = {r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z};
    return out;
  }

  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    Mat3 out;
    out.m = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
    return out;
  }

  double& operator()(int r, int c) { return m[static_cast<size_t>(r) * 3 + c]; }
  double operator()(int r, int c) const {
    return m[static_cast<size_t>(r) * 3 + c];
  }

  Vec3 column(int c) const { return {m[c], m[3 + c], m[6 + c]}; }
  Vec3 row(int r) const {
    return {m[static_cast<size_t>(r) * 3], m[static_cast<size_t>(r) * 3 + 1],
            m[static_cast<size_t>(r) * 3 + 2]};
  }

  Mat3 transposed() const {
    return from_columns(row(0), row(1), row(2));
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 out;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out(r, c) = (*this)(r, 0) * o(0, c) + (*this)(r, 1) * o(1, c) +
                    (*this)(r, 2) * o(2, c);
      }
    }
    return out;
  }

  Mat3 operator-(const Mat3& o) const {
    Mat3 out;
    for (size_t i = 0; i < 9; ++i) out.m[i] = m[i] - o.m[i];
    return out;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
};

inline double max_abs(const Mat3& a) {
  double mx = 0.0;
  for (double v : a.m) mx = std::max(mx, std::abs(v));
  return mx;
}

// Largest absolute deviation of M^T M from identity.
inline double orthonormality_error(const Mat3& r) {
  const Mat3 g = r.transposed() * r;
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      err = std::max(err, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return err;
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  return orthonormality_error(r) <= tol && std::abs(r.det() - 1.0) <= tol;
}

inline Mat3 rotation_about_y(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Mat3::from_rows({c, 0, s}, {0, 1, 0}, {-s, 0, c});
}

inline Mat3 rotation_about_x(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Mat3::from_rows({1, 0, 0}, {0, c, -s}, {0, s, c});
}

inline Mat3 rotation_about_z(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return Mat3::from_rows({c, -s, 0}, {s, c, 0}, {0, 0, 1});
}

// Rotation by `angle` around an arbitrary unit axis (Rodrigues).
Mat3 rotation_about_axis(const Vec3& axis, double angle);

// Rigid transform x -> R x + t.
struct RigidTransform {
  Mat3 rotation;
  Vec3 translation;

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  RigidTransform compose(const RigidTransform& inner) const {
    // (R1,t1) ∘ (R2,t2): x -> R1 (R2 x + t2) + t1
    return {rotation * inner.rotation, rotation * inner.translation + translation};
  }

  RigidTransform inverse() const {
    const Mat3 rt = rotation.transposed();
    return {rt, -(rt * translation)};
  }
};

// Dense row-major matrix of doubles. Minimal interface: this project only
// needs storage, indexing and shape checks.
struct DenseMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(size_t r, size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(size_t r, size_t c) { return data[r * cols + c]; }
  double operator()(size_t r, size_t c) const { return data[r * cols + c]; }

  const double* row_ptr(size_t r) const { return data.data() + r * cols; }
  double* row_ptr(size_t r) { return data.data() + r * cols; }
};

inline double wrap_angle(double a) {
  // Wrap to (-pi, pi].
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

}  // namespace rigkit
