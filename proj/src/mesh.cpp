#include "rigkit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rigkit {

std::vector<Edge> extract_edges(const std::vector<std::array<int, 3>>& faces,
                                int vertex_count) {
  std::vector<Edge> edges;
  edges.reserve(faces.size() * 3);
  for (const auto& f : faces) {
    for (int k = 0; k < 3; ++k) {
      int a = f[k];
      int b = f[(k + 1) % 3];
      if (a < 0 || b < 0 ||
          (vertex_count >= 0 && (a >= vertex_count || b >= vertex_count))) {
        throw IndexOutOfRangeError("face references vertex out of range");
      }
      if (a > b) std::swap(a, b);
      edges.emplace_back(a, b);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

Mesh make_mesh(std::vector<Vec3> vertices,
               std::vector<std::array<int, 3>> faces,
               std::vector<std::string>* warnings) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.faces.reserve(faces.size());
  for (const auto& f : faces) {
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      if (warnings) {
        warnings->push_back("dropping degenerate face (" +
                            std::to_string(f[0]) + ", " + std::to_string(f[1]) +
                            ", " + std::to_string(f[2]) + ")");
      }
      continue;
    }
    m.faces.push_back(f);
  }
  m.edges = extract_edges(m.faces, static_cast<int>(m.vertices.size()));
  return m;
}

std::pair<Vec3, Vec3> mesh_bounds(const Mesh& m) {
  if (m.vertices.empty()) {
    throw EmptyMeshError("mesh_bounds requires at least one vertex");
  }
  Vec3 lo = m.vertices[0];
  Vec3 hi = m.vertices[0];
  for (const Vec3& v : m.vertices) {
    for (int c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], v[c]);
      hi[c] = std::max(hi[c], v[c]);
    }
  }
  return {lo, hi};
}

double bounds_diagonal(const Mesh& m) {
  const auto [lo, hi] = mesh_bounds(m);
  return norm(hi - lo);
}

void validate_descriptors(const Mesh& m, const DescriptorField& d) {
  if (d.values.rows != m.vertices.size()) {
    throw ShapeMismatchError("descriptor rows (" +
                             std::to_string(d.values.rows) +
                             ") do not match mesh vertices (" +
                             std::to_string(m.vertices.size()) + ")");
  }
  for (double v : d.values.data) {
    if (!std::isfinite(v)) {
      throw ShapeMismatchError("descriptor field contains non-finite entries");
    }
  }
}

}  // namespace rigkit
