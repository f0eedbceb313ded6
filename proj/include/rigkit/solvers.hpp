#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rigkit/animation.hpp"
#include "rigkit/mesh.hpp"
#include "rigkit/skeleton.hpp"

namespace rigkit {

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

// Mean squared vertex error.
double loss_vtx(const DeformedMesh& pred, const DeformedMesh& gt);

// Mean squared difference of edge vectors; invariant to a common translation.
double loss_edge(const DeformedMesh& pred, const DeformedMesh& gt,
                 const std::vector<Edge>& edges);

// Symmetric Chamfer distance: sum of the two directional means of squared
// nearest distances.
double chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

// Chamfer over joint position sets; supports differing joint counts.
double loss_skel(const std::vector<Vec3>& g_gt, const std::vector<Vec3>& g_tgt);

// ---------------------------------------------------------------------------
// Signed distance to a triangle mesh
// ---------------------------------------------------------------------------

// Exact point-to-triangle-set distance; sign from parity of triangle
// crossings along 13 fixed ray directions with majority vote (ties count as
// outside), which tolerates non-watertight meshes.
std::vector<double> sdf_eval(const Mesh& m, const std::vector<Vec3>& points);
double sdf_eval_point(const Mesh& m, const Vec3& point);

// Mean signed distance over the points (reporting form; lower = deeper
// inside).
double loss_sdf(const Mesh& m, const std::vector<Vec3>& points);

// Optimization form: mean of max(0, sdf + margin); zero once every point is
// at least `margin` inside the surface.
double hinge_loss_sdf(const Mesh& m, const std::vector<Vec3>& points,
                      double margin);

// ---------------------------------------------------------------------------
// Symmetry projection
// ---------------------------------------------------------------------------

// delta_j <- (delta_j + mirror(delta_rho(j))) / 2 with mirror = (-x, y, z).
// Idempotent; self-paired joints get their x component zeroed.
std::vector<Vec3> symmetrize_residual(const std::vector<Vec3>& delta,
                                      const std::vector<int>& rho);

// ---------------------------------------------------------------------------
// Skinning weights
// ---------------------------------------------------------------------------

// Row-stochastic skinning weights stored with their logits. weights =
// row_softmax(logits / sqrt(n_d)); log-sum-exp stabilized, so rows stay
// finite and sum to one for arbitrary finite logits.
struct SkinningWeights {
  DenseMatrix logits;
  double n_d = 32.0;
  DenseMatrix weights;
};

DenseMatrix row_softmax(const DenseMatrix& logits, double n_d);
SkinningWeights skinning_weights_from_logits(DenseMatrix logits, double n_d);

// One supervision frame: the ground-truth deformed vertices and the pose
// that produced them. All samples passed to solve_skinning must come from
// the same mesh and skeleton.
struct TrainingSample {
  DeformedMesh gt_deformed;
  PoseTransforms pose;
};

struct SkinningSolveConfig {
  uint64_t seed = 0;
  int max_iterations = 2000;
  double rel_tolerance = 1e-8;
  double n_d = 32.0;
  double lambda_vtx = 1.0;
  double lambda_edge = 1.0;
  double init_step = 1.0;
  double step_growth = 1.3;
  int max_backoffs = 20;
  double init_beta_scale = 4.0;  // beta = scale / average bone length
  double init_noise = 1e-3;
  // Initialization smoothing across descriptor-similar vertices, used only
  // when a descriptor field is supplied.
  int descriptor_knn = 4;
  double descriptor_blend = 0.5;
};

struct SkinningSolution {
  SkinningWeights weights;
  std::vector<double> loss_trace;  // accepted losses, non-increasing
  int iterations = 0;
  bool identifiable = true;
  std::vector<std::string> warnings;
};

// Full-batch gradient descent on the logits with backtracking line search
// (step halves on loss increase, up to max_backoffs). Gradients are analytic:
// chain rule through the LBS linearity in the weights and the softmax
// Jacobian. Deterministic under cfg.seed. An optional per-vertex descriptor
// field smooths the initialization across semantically similar vertices;
// without one the solver runs on geometry alone.
SkinningSolution solve_skinning(const Mesh& m,
                                const std::vector<TrainingSample>& samples,
                                const Skeleton& s,
                                const SkinningSolveConfig& cfg,
                                const DescriptorField* descriptors = nullptr);

// Objective + analytic gradient at the given logits, for gradient checks and
// the solver itself. Returns the loss; fills grad (same shape as logits)
// when non-null.
double skinning_objective(const Mesh& m,
                          const std::vector<TrainingSample>& samples,
                          const Skeleton& s, const DenseMatrix& logits,
                          const SkinningSolveConfig& cfg,
                          DenseMatrix* grad = nullptr);

// Distance-based warm start: logit = -beta * distance(vertex, bones of
// joint) plus a small seeded perturbation. With descriptors, each row is
// blended with the mean over its descriptor_knn nearest neighbors.
DenseMatrix init_skinning_logits(const Mesh& m, const Skeleton& s,
                                 const SkinningSolveConfig& cfg,
                                 const DescriptorField* descriptors = nullptr);

// ---------------------------------------------------------------------------
// Rig fitting
// ---------------------------------------------------------------------------

struct RigSolveConfig {
  uint64_t seed = 0;
  int max_iterations = 2000;
  double rel_tolerance = 1e-8;
  double lambda_skel = 1.0;
  double lambda_sdf = 1.0;
  double sdf_margin_fraction = 0.02;    // of skeleton height
  double sdf_fd_step_fraction = 1e-4;   // of mesh bounds diagonal
  double init_step = 0.1;
  double step_growth = 1.3;
  int max_backoffs = 20;
};

struct RigSolution {
  std::vector<Vec3> delta_o;  // symmetry fixed point
  Skeleton target_skeleton;   // offsets composed with delta_o, grounded
  std::vector<double> loss_trace;
  int iterations = 0;
  std::vector<std::string> warnings;
};

// Optimizes the offset residual, re-symmetrized after every step, to
// minimize lambda_skel * L_skel(g_gt, g(delta)) + lambda_sdf * hinge SDF
// when g_gt is given; without g_gt, a height-scale heuristic initializes the
// residual and only the SDF term is refined. The returned skeleton is
// grounded.
RigSolution solve_rig(const Mesh& m, const Skeleton& s_src,
                      const RigSolveConfig& cfg,
                      const std::optional<std::vector<Vec3>>& g_gt);

// Objective + gradient w.r.t. the raw (unprojected) residual.
double rig_objective(const Mesh& m, const Skeleton& s_src,
                     const std::vector<Vec3>& delta,
                     const std::optional<std::vector<Vec3>>& g_gt,
                     const RigSolveConfig& cfg,
                     std::vector<Vec3>* grad = nullptr);

}  // namespace rigkit
