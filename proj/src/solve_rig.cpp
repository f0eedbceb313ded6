#include <cmath>
#include <limits>

#include "rigkit/solvers.hpp"

namespace rigkit {

namespace {

// Rest-pose joint positions for offsets o_src + delta.
std::vector<Vec3> residual_globals(const Skeleton& s,
                                   const std::vector<Vec3>& delta) {
  std::vector<Vec3> g(s.joint_count());
  const auto kids = s.children();
  std::vector<int> stack{s.root()};
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    const Vec3 local = s.offsets[j] + delta[j];
    g[j] = s.parent[j] < 0 ? local : g[s.parent[j]] + local;
    for (int c : kids[j]) stack.push_back(c);
  }
  return g;
}

int nearest_point(const Vec3& p, const std::vector<Vec3>& set) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < set.size(); ++k) {
    const double d = norm_sq(p - set[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace

double rig_objective(const Mesh& m, const Skeleton& s_src,
                     const std::vector<Vec3>& delta,
                     const std::optional<std::vector<Vec3>>& g_gt,
                     const RigSolveConfig& cfg, std::vector<Vec3>* grad) {
  const size_t nj = s_src.joint_count();
  if (delta.size() != nj) {
    throw SizeMismatchError("residual count does not match joint count");
  }
  const std::vector<Vec3> g = residual_globals(s_src, delta);
  const double margin = cfg.sdf_margin_fraction * skeleton_height(s_src);

  std::vector<Vec3> dg(nj, Vec3{0, 0, 0});
  double loss = 0.0;

  if (g_gt.has_value()) {
    if (g_gt->empty()) {
      throw EmptySetError("g_gt must be non-empty when provided");
    }
    loss += cfg.lambda_skel * loss_skel(*g_gt, g);
    if (grad) {
      const double inv_gt = 1.0 / static_cast<double>(g_gt->size());
      const double inv_tgt = 1.0 / static_cast<double>(g.size());
      for (const Vec3& x : *g_gt) {
        const int k = nearest_point(x, g);
        dg[k] += (g[k] - x) * (2.0 * cfg.lambda_skel * inv_gt);
      }
      for (size_t j = 0; j < nj; ++j) {
        const int k = nearest_point(g[j], *g_gt);
        dg[j] += (g[j] - (*g_gt)[k]) * (2.0 * cfg.lambda_skel * inv_tgt);
      }
    }
  }

  if (cfg.lambda_sdf != 0.0) {
    const auto sdf = sdf_eval(m, g);
    double hinge = 0.0;
    for (double v : sdf) hinge += std::max(0.0, v + margin);
    hinge /= static_cast<double>(nj);
    loss += cfg.lambda_sdf * hinge;
    if (grad) {
      // SDF gradient by central differences; exact triangle-distance
      // gradients are piecewise and not needed at this scale.
      const double h = cfg.sdf_fd_step_fraction * bounds_diagonal(m);
      const double scale = cfg.lambda_sdf / static_cast<double>(nj);
      for (size_t j = 0; j < nj; ++j) {
        if (sdf[j] + margin <= 0.0) continue;
        for (int c = 0; c < 3; ++c) {
          Vec3 hi = g[j];
          Vec3 lo = g[j];
          hi[c] += h;
          lo[c] -= h;
          dg[j][c] += scale * (sdf_eval_point(m, hi) - sdf_eval_point(m, lo)) /
                      (2.0 * h);
        }
      }
    }
  }

  if (grad) {
    // d g_j / d delta_k = I for every k on the root->j path, so each joint's
    // residual gradient is the subtree sum of dg. Accumulate children into
    // parents in reverse topological order.
    grad->assign(nj, Vec3{0, 0, 0});
    const auto kids = s_src.children();
    std::vector<int> order;
    order.reserve(nj);
    std::vector<int> stack{s_src.root()};
    while (!stack.empty()) {
      const int j = stack.back();
      stack.pop_back();
      order.push_back(j);
      for (int c : kids[j]) stack.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int j = *it;
      (*grad)[j] = dg[j];
      for (int c : kids[j]) {
        (*grad)[j] += (*grad)[c];
      }
    }
  }
  return loss;
}

RigSolution solve_rig(const Mesh& m, const Skeleton& s_src,
                      const RigSolveConfig& cfg,
                      const std::optional<std::vector<Vec3>>& g_gt) {
  if (m.vertices.empty()) {
    throw EmptyMeshError("solve_rig requires a non-empty mesh");
  }
  validate_skeleton(s_src);
  const size_t nj = s_src.joint_count();

  RigSolution solution;
  std::vector<Vec3> delta(nj, Vec3{0, 0, 0});
  if (g_gt.has_value()) {
    // Correspondence-free warm start: match the vertical extent and centroid
    // of the target joint set. Chamfer descent alone locks onto wrong
    // nearest-neighbor assignments under large scale mismatches; for a
    // uniform scale difference this start is already the global optimum.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    Vec3 gt_centroid{0, 0, 0};
    for (const Vec3& g : *g_gt) {
      lo = std::min(lo, g.y);
      hi = std::max(hi, g.y);
      gt_centroid += g;
    }
    gt_centroid = gt_centroid / static_cast<double>(g_gt->size());
    const double src_height = skeleton_height(s_src);
    if (src_height > 1e-12 && hi > lo) {
      const double k = (hi - lo) / src_height;
      Vec3 src_centroid{0, 0, 0};
      for (const Vec3& g : s_src.rest_global) src_centroid += g;
      src_centroid = src_centroid / static_cast<double>(nj);
      for (size_t j = 0; j < nj; ++j) {
        delta[j] = s_src.offsets[j] * (k - 1.0);
      }
      delta[s_src.root()] += gt_centroid - src_centroid * k;
    }
  } else {
    // Height-scale heuristic: match the mesh vertical extent and center the
    // root horizontally over the vertices, then let the SDF term refine.
    const auto [lo, hi] = mesh_bounds(m);
    const double mesh_height = hi.y - lo.y;
    const double skel_height = std::max(skeleton_height(s_src), 1e-12);
    const double k = mesh_height / skel_height;
    for (size_t j = 0; j < nj; ++j) {
      delta[j] = s_src.offsets[j] * (k - 1.0);
    }
    Vec3 centroid{0, 0, 0};
    for (const Vec3& v : m.vertices) centroid += v;
    centroid = centroid / static_cast<double>(m.vertices.size());
    const int root = s_src.root();
    delta[root].x += centroid.x - s_src.offsets[root].x * k;
    delta[root].z += centroid.z - s_src.offsets[root].z * k;
    solution.warnings.push_back(
        "no ground-truth joints given; using height-scale initialization "
        "with SDF refinement only");
  }
  delta = symmetrize_residual(delta, s_src.rho);

  double loss = rig_objective(m, s_src, delta, g_gt, cfg, nullptr);
  if (!std::isfinite(loss)) {
    throw NonFiniteError("rig objective is not finite at initialization");
  }
  solution.loss_trace.push_back(loss);

  double step = cfg.init_step;
  std::vector<Vec3> grad;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    rig_objective(m, s_src, delta, g_gt, cfg, &grad);
    double gnorm_sq = 0.0;
    for (const Vec3& gv : grad) gnorm_sq += norm_sq(gv);
    if (!std::isfinite(gnorm_sq)) {
      throw NonFiniteError("rig gradient is not finite");
    }
    if (gnorm_sq < 1e-30 || loss == 0.0) break;

    bool accepted = false;
    std::vector<Vec3> trial;
    double trial_loss = 0.0;
    for (int backoff = 0; backoff <= cfg.max_backoffs; ++backoff) {
      trial = delta;
      for (size_t j = 0; j < nj; ++j) {
        trial[j] -= grad[j] * step;
      }
      trial = symmetrize_residual(trial, s_src.rho);
      trial_loss = rig_objective(m, s_src, trial, g_gt, cfg, nullptr);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    delta = std::move(trial);
    const double prev = loss;
    loss = trial_loss;
    solution.loss_trace.push_back(loss);
    solution.iterations = iter + 1;
    step *= cfg.step_growth;
    if (prev - loss <= cfg.rel_tolerance * std::max(prev, 1e-300)) break;
  }

  solution.delta_o = delta;
  std::vector<Vec3> offsets(nj);
  for (size_t j = 0; j < nj; ++j) {
    offsets[j] = s_src.offsets[j] + delta[j];
  }
  Skeleton target = make_skeleton(s_src.names, s_src.parent, offsets, s_src.rho);
  solution.target_skeleton = ground_skeleton(target, &solution.warnings);
  return solution;
}

}  // namespace rigkit
