#pragma once

#include <string>
#include <vector>

#include "rigkit/math.hpp"

namespace rigkit {

using Edge = std::pair<int, int>;  // sorted vertex index pair, first < second

// Triangle mesh at rest pose. Non-watertight and multi-component meshes are
// legal; degenerate faces (repeated indices) are dropped at construction.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Edge> edges;  // derived, deduplicated, sorted
};

// Sorted unique undirected edges of a triangle list. Throws
// IndexOutOfRangeError when an index exceeds vertex_count (pass a negative
// vertex_count to skip the range check).
std::vector<Edge> extract_edges(const std::vector<std::array<int, 3>>& faces,
                                int vertex_count = -1);

// Builds a mesh, dropping degenerate faces (warning appended per face) and
// deriving the edge set.
Mesh make_mesh(std::vector<Vec3> vertices,
               std::vector<std::array<int, 3>> faces,
               std::vector<std::string>* warnings = nullptr);

std::pair<Vec3, Vec3> mesh_bounds(const Mesh& m);

double bounds_diagonal(const Mesh& m);

// Optional per-vertex descriptor field (row per vertex).
struct DescriptorField {
  DenseMatrix values;
  size_t feature_dim() const { return values.cols; }
};

// Throws ShapeMismatchError unless rows match the mesh vertex count and all
// entries are finite.
void validate_descriptors(const Mesh& m, const DescriptorField& d);

// Per-frame deformed vertex positions; always the same count as the source.
struct DeformedMesh {
  std::vector<Vec3> vertices;
};

}  // namespace rigkit
