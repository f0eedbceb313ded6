#include <cmath>
#include <limits>

#include "rigkit/kernels.hpp"
#include "rigkit/solvers.hpp"

namespace rigkit {

double loss_vtx(const DeformedMesh& pred, const DeformedMesh& gt) {
  if (pred.vertices.size() != gt.vertices.size()) {
    throw ShapeMismatchError("deformed meshes have different vertex counts");
  }
  const size_t n = pred.vertices.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    total += norm_sq(gt.vertices[i] - pred.vertices[i]);
  }
  return total / static_cast<double>(n);
}

double loss_edge(const DeformedMesh& pred, const DeformedMesh& gt,
                 const std::vector<Edge>& edges) {
  if (pred.vertices.size() != gt.vertices.size()) {
    throw ShapeMismatchError("deformed meshes have different vertex counts");
  }
  if (edges.empty()) return 0.0;
  const int n = static_cast<int>(pred.vertices.size());
  double total = 0.0;
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw IndexOutOfRangeError("edge references vertex out of range");
    }
    const Vec3 ge = gt.vertices[i] - gt.vertices[j];
    const Vec3 pe = pred.vertices[i] - pred.vertices[j];
    total += norm_sq(ge - pe);
  }
  return total / static_cast<double>(edges.size());
}

namespace {

std::vector<double> flatten(const std::vector<Vec3>& points) {
  std::vector<double> flat(points.size() * 3);
  for (size_t i = 0; i < points.size(); ++i) {
    flat[i * 3 + 0] = points[i].x;
    flat[i * 3 + 1] = points[i].y;
    flat[i * 3 + 2] = points[i].z;
  }
  return flat;
}

double directional_mean_sq(const std::vector<Vec3>& from,
                           const std::vector<Vec3>& to) {
  const auto a = flatten(from);
  const auto b = flatten(to);
  std::vector<double> mins(from.size());
  kernels::min_dist_sq(a.data(), from.size(), b.data(), to.size(), mins.data());
  double total = 0.0;
  for (double d : mins) total += d;
  return total / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) {
    throw EmptySetError("chamfer requires two non-empty point sets");
  }
  return directional_mean_sq(a, b) + directional_mean_sq(b, a);
}

double loss_skel(const std::vector<Vec3>& g_gt,
                 const std::vector<Vec3>& g_tgt) {
  return chamfer(g_gt, g_tgt);
}

std::vector<Vec3> symmetrize_residual(const std::vector<Vec3>& delta,
                                      const std::vector<int>& rho) {
  if (delta.size() != rho.size()) {
    throw SizeMismatchError("residual count does not match rho");
  }
  std::vector<Vec3> out(delta.size());
  for (size_t j = 0; j < delta.size(); ++j) {
    const int m = rho[j];
    if (m < 0 || m >= static_cast<int>(delta.size()) ||
        rho[m] != static_cast<int>(j)) {
      throw SizeMismatchError("rho is not an involution");
    }
    const Vec3& d = delta[j];
    const Vec3& dm = delta[m];
    out[j] = {0.5 * (d.x - dm.x), 0.5 * (d.y + dm.y), 0.5 * (d.z + dm.z)};
  }
  return out;
}

DenseMatrix row_softmax(const DenseMatrix& logits, double n_d) {
  if (!(n_d > 0.0)) {
    throw InvalidConfigError("softmax scale n_d must be positive");
  }
  const double inv_scale = 1.0 / std::sqrt(n_d);
  DenseMatrix out(logits.rows, logits.cols);
  for (size_t r = 0; r < logits.rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (size_t c = 0; c < logits.cols; ++c) {
      mx = std::max(mx, logits(r, c) * inv_scale);
    }
    double denom = 0.0;
    for (size_t c = 0; c < logits.cols; ++c) {
      const double e = std::exp(logits(r, c) * inv_scale - mx);
      out(r, c) = e;
      denom += e;
    }
    for (size_t c = 0; c < logits.cols; ++c) {
      out(r, c) /= denom;
    }
  }
  return out;
}

SkinningWeights skinning_weights_from_logits(DenseMatrix logits, double n_d) {
  SkinningWeights w;
  w.weights = row_softmax(logits, n_d);
  w.logits = std::move(logits);
  w.n_d = n_d;
  return w;
}

}  // namespace rigkit
