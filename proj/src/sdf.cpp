#include <cmath>
#include <limits>

#include "rigkit/solvers.hpp"

namespace rigkit {

namespace {

// Closest-point distance squared from p to triangle (a, b, c), computed by
// Voronoi region classification (Ericson, Real-Time Collision Detection).
double point_triangle_dist_sq(const Vec3& p, const Vec3& a, const Vec3& b,
                              const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return norm_sq(p - a);

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return norm_sq(p - b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return norm_sq(p - (a + ab * t));
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return norm_sq(p - c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return norm_sq(p - (a + ac * t));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return norm_sq(p - (b + (c - b) * t));
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return norm_sq(p - (a + ab * v + ac * w));
}

// Moller-Trumbore; counts a crossing for t > 1e-12. Parallel rays miss.
bool ray_hits_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                       const Vec3& b, const Vec3& c) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 pv = cross(dir, e2);
  const double det = dot(e1, pv);
  if (std::abs(det) < 1e-14) return false;
  const double inv = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = dot(tv, pv) * inv;
  if (u < 0.0 || u > 1.0) return false;
  const Vec3 qv = cross(tv, e1);
  const double v = dot(dir, qv) * inv;
  if (v < 0.0 || u + v > 1.0) return false;
  const double t = dot(e2, qv) * inv;
  return t > 1e-12;
}

// 13 fixed directions on a Fibonacci spiral; no axis-aligned members, so
// axis-aligned geometry (unit cubes, flat caps) does not produce grazing
// hits.
const std::array<Vec3, 13>& ray_directions() {
  static const std::array<Vec3, 13> dirs = [] {
    std::array<Vec3, 13> out;
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < 13; ++k) {
      const double y = 1.0 - 2.0 * (k + 0.5) / 13.0;
      const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
      const double phi = golden * k + 0.35;
      out[static_cast<size_t>(k)] = {r * std::cos(phi), y, r * std::sin(phi)};
    }
    return out;
  }();
  return dirs;
}

bool point_inside(const Mesh& m, const Vec3& p) {
  int inside_votes = 0;
  for (const Vec3& dir : ray_directions()) {
    int crossings = 0;
    for (const auto& f : m.faces) {
      if (ray_hits_triangle(p, dir, m.vertices[f[0]], m.vertices[f[1]],
                            m.vertices[f[2]])) {
        ++crossings;
      }
    }
    if (crossings % 2 == 1) ++inside_votes;
  }
  // Majority of 13; ties cannot occur, but < half counts as outside.
  return inside_votes * 2 > 13;
}

}  // namespace

double sdf_eval_point(const Mesh& m, const Vec3& point) {
  if (m.faces.empty()) {
    throw EmptyMeshError("sdf_eval requires a mesh with faces");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : m.faces) {
    best = std::min(best, point_triangle_dist_sq(point, m.vertices[f[0]],
                                                 m.vertices[f[1]],
                                                 m.vertices[f[2]]));
  }
  const double dist = std::sqrt(best);
  return point_inside(m, point) ? -dist : dist;
}

std::vector<double> sdf_eval(const Mesh& m, const std::vector<Vec3>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Vec3& p : points) {
    out.push_back(sdf_eval_point(m, p));
  }
  return out;
}

double loss_sdf(const Mesh& m, const std::vector<Vec3>& points) {
  if (points.empty()) {
    throw EmptySetError("loss_sdf requires at least one point");
  }
  const auto values = sdf_eval(m, points);
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double hinge_loss_sdf(const Mesh& m, const std::vector<Vec3>& points,
                      double margin) {
  if (points.empty()) {
    throw EmptySetError("hinge_loss_sdf requires at least one point");
  }
  const auto values = sdf_eval(m, points);
  double total = 0.0;
  for (double v : values) total += std::max(0.0, v + margin);
  return total / static_cast<double>(values.size());
}

}  // namespace rigkit
