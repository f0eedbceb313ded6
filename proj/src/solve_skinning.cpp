#include <algorithm>
#include <cmath>
#include <limits>

#include "rigkit/rng.hpp"
#include "rigkit/solvers.hpp"

namespace rigkit {

namespace {

// Minimum distance from a point to the bones owned by a joint: the segments
// from the joint to each child, or the joint position itself for leaves.
double joint_bone_distance(const Skeleton& s,
                           const std::vector<std::vector<int>>& kids,
                           int joint, const Vec3& p) {
  const Vec3& a = s.rest_global[joint];
  if (kids[joint].empty()) {
    return norm(p - a);
  }
  double best = std::numeric_limits<double>::infinity();
  for (int child : kids[joint]) {
    const Vec3& b = s.rest_global[child];
    const Vec3 ab = b - a;
    const double den = norm_sq(ab);
    double t = den > 0.0 ? dot(p - a, ab) / den : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, norm(p - (a + ab * t)));
  }
  return best;
}

struct PreparedSample {
  // u[i * joint_count + j] = T_j applied to vertex i.
  std::vector<Vec3> u;
  const DeformedMesh* gt = nullptr;
  bool rest = true;
};

class Evaluator {
 public:
  Evaluator(const Mesh& m, const std::vector<TrainingSample>& samples,
            const Skeleton& s, const SkinningSolveConfig& cfg)
      : mesh_(m), cfg_(cfg) {
    if (samples.empty()) {
      throw UnidentifiableError("solve_skinning requires at least one sample");
    }
    const size_t nv = m.vertices.size();
    const size_t nj = s.joint_count();
    const PoseTransforms rest = rest_pose(s);
    prepared_.reserve(samples.size());
    for (const TrainingSample& sample : samples) {
      if (sample.gt_deformed.vertices.size() != nv) {
        throw ShapeMismatchError(
            "sample deformed vertex count does not match mesh");
      }
      if (sample.pose.global.size() != nj) {
        throw SizeMismatchError("sample pose joint count does not match");
      }
      const auto transforms = skinning_transforms(rest, sample.pose);
      PreparedSample prep;
      prep.gt = &sample.gt_deformed;
      prep.u.resize(nv * nj);
      for (const RigidTransform& t : transforms) {
        const Mat3 d = t.rotation - Mat3::identity();
        if (max_abs(d) > 1e-9 || norm(t.translation) > 1e-9) {
          prep.rest = false;
          break;
        }
      }
      for (size_t i = 0; i < nv; ++i) {
        for (size_t j = 0; j < nj; ++j) {
          prep.u[i * nj + j] = transforms[j].apply(m.vertices[i]);
        }
      }
      prepared_.push_back(std::move(prep));
    }
    joint_count_ = nj;
  }

  bool all_rest() const {
    for (const auto& p : prepared_) {
      if (!p.rest) return false;
    }
    return true;
  }

  // Loss (and gradient w.r.t. logits when grad != nullptr).
  double evaluate(const DenseMatrix& logits, DenseMatrix* grad) const {
    const size_t nv = mesh_.vertices.size();
    const size_t nj = joint_count_;
    if (logits.rows != nv || logits.cols != nj) {
      throw ShapeMismatchError("logit shape does not match vertices x joints");
    }
    const DenseMatrix weights = row_softmax(logits, cfg_.n_d);
    const double sample_norm = 1.0 / static_cast<double>(prepared_.size());
    const double edge_count = static_cast<double>(mesh_.edges.size());

    DenseMatrix grad_a;  // dL/dA
    if (grad) {
      grad_a = DenseMatrix(nv, nj, 0.0);
    }

    double total = 0.0;
    std::vector<Vec3> pred(nv);
    std::vector<Vec3> dpred(nv);
    for (const PreparedSample& sample : prepared_) {
      for (size_t i = 0; i < nv; ++i) {
        Vec3 acc{0, 0, 0};
        const double* wrow = weights.row_ptr(i);
        const Vec3* urow = sample.u.data() + i * nj;
        for (size_t j = 0; j < nj; ++j) {
          acc += urow[j] * wrow[j];
        }
        pred[i] = acc;
      }

      double vtx = 0.0;
      for (size_t i = 0; i < nv; ++i) {
        vtx += norm_sq(sample.gt->vertices[i] - pred[i]);
      }
      vtx /= static_cast<double>(nv);

      double edge = 0.0;
      for (const auto& [i, j] : mesh_.edges) {
        const Vec3 ge = sample.gt->vertices[i] - sample.gt->vertices[j];
        const Vec3 pe = pred[i] - pred[j];
        edge += norm_sq(ge - pe);
      }
      if (!mesh_.edges.empty()) edge /= edge_count;

      total += sample_norm * (cfg_.lambda_vtx * vtx + cfg_.lambda_edge * edge);

      if (!grad) continue;
      const double vtx_scale =
          sample_norm * cfg_.lambda_vtx * 2.0 / static_cast<double>(nv);
      for (size_t i = 0; i < nv; ++i) {
        dpred[i] = (pred[i] - sample.gt->vertices[i]) * vtx_scale;
      }
      if (!mesh_.edges.empty()) {
        const double edge_scale =
            sample_norm * cfg_.lambda_edge * 2.0 / edge_count;
        for (const auto& [i, j] : mesh_.edges) {
          const Vec3 ge = sample.gt->vertices[i] - sample.gt->vertices[j];
          const Vec3 pe = pred[i] - pred[j];
          const Vec3 e = (pe - ge) * edge_scale;
          dpred[i] += e;
          dpred[j] -= e;
        }
      }
      for (size_t i = 0; i < nv; ++i) {
        const Vec3* urow = sample.u.data() + i * nj;
        double* garow = grad_a.row_ptr(i);
        for (size_t j = 0; j < nj; ++j) {
          garow[j] += dot(dpred[i], urow[j]);
        }
      }
    }

    if (grad) {
      // Softmax Jacobian, row by row: dL/dz = A .* (dL/dA - sum_j A dL/dA)
      // scaled by 1/sqrt(n_d).
      *grad = DenseMatrix(nv, nj, 0.0);
      const double inv_scale = 1.0 / std::sqrt(cfg_.n_d);
      for (size_t i = 0; i < nv; ++i) {
        const double* arow = weights.row_ptr(i);
        const double* garow = grad_a.row_ptr(i);
        double mix = 0.0;
        for (size_t j = 0; j < nj; ++j) mix += arow[j] * garow[j];
        double* out = grad->row_ptr(i);
        for (size_t j = 0; j < nj; ++j) {
          out[j] = arow[j] * (garow[j] - mix) * inv_scale;
        }
      }
    }
    return total;
  }

 private:
  const Mesh& mesh_;
  SkinningSolveConfig cfg_;
  std::vector<PreparedSample> prepared_;
  size_t joint_count_ = 0;
};

}  // namespace

DenseMatrix init_skinning_logits(const Mesh& m, const Skeleton& s,
                                 const SkinningSolveConfig& cfg,
                                 const DescriptorField* descriptors) {
  const size_t nv = m.vertices.size();
  const size_t nj = s.joint_count();
  const double avg = average_bone_length(s);
  const double beta = cfg.init_beta_scale / std::max(avg, 1e-9);
  const auto kids = s.children();

  Rng rng(cfg.seed);
  DenseMatrix logits(nv, nj);
  for (size_t i = 0; i < nv; ++i) {
    for (size_t j = 0; j < nj; ++j) {
      const double d =
          joint_bone_distance(s, kids, static_cast<int>(j), m.vertices[i]);
      logits(i, j) =
          -beta * d + cfg.init_noise * (2.0 * rng.unit() - 1.0);
    }
  }
  if (!descriptors || cfg.descriptor_knn < 1 || cfg.descriptor_blend <= 0.0) {
    return logits;
  }

  // Semantic smoothing: average each row with its descriptor-space nearest
  // neighbors so split body parts with similar descriptors start alike.
  validate_descriptors(m, *descriptors);
  const DenseMatrix& f = descriptors->values;
  const size_t k = std::min<size_t>(cfg.descriptor_knn, nv - 1);
  DenseMatrix smoothed(nv, nj, 0.0);
  std::vector<std::pair<double, size_t>> dist(nv);
  for (size_t i = 0; i < nv; ++i) {
    for (size_t o = 0; o < nv; ++o) {
      double d2 = 0.0;
      for (size_t c = 0; c < f.cols; ++c) {
        const double diff = f(i, c) - f(o, c);
        d2 += diff * diff;
      }
      dist[o] = {d2, o};
    }
    dist[i].first = std::numeric_limits<double>::infinity();
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (size_t j = 0; j < nj; ++j) {
      double acc = 0.0;
      for (size_t n = 0; n < k; ++n) {
        acc += logits(dist[n].second, j);
      }
      smoothed(i, j) = (1.0 - cfg.descriptor_blend) * logits(i, j) +
                       cfg.descriptor_blend * acc / static_cast<double>(k);
    }
  }
  return smoothed;
}

double skinning_objective(const Mesh& m,
                          const std::vector<TrainingSample>& samples,
                          const Skeleton& s, const DenseMatrix& logits,
                          const SkinningSolveConfig& cfg, DenseMatrix* grad) {
  return Evaluator(m, samples, s, cfg).evaluate(logits, grad);
}

SkinningSolution solve_skinning(const Mesh& m,
                                const std::vector<TrainingSample>& samples,
                                const Skeleton& s,
                                const SkinningSolveConfig& cfg,
                                const DescriptorField* descriptors) {
  const Evaluator eval(m, samples, s, cfg);
  SkinningSolution solution;

  DenseMatrix logits = init_skinning_logits(m, s, cfg, descriptors);
  if (eval.all_rest()) {
    solution.identifiable = false;
    solution.warnings.push_back(
        "all training samples are rest poses; skinning weights are "
        "unidentifiable and the distance-based initialization is returned");
  }

  double loss = eval.evaluate(logits, nullptr);
  if (!std::isfinite(loss)) {
    throw NonFiniteError("skinning objective is not finite at initialization");
  }
  solution.loss_trace.push_back(loss);

  if (!solution.identifiable) {
    solution.weights = skinning_weights_from_logits(std::move(logits), cfg.n_d);
    return solution;
  }

  double step = cfg.init_step;
  DenseMatrix grad;
  DenseMatrix trial(logits.rows, logits.cols);
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    eval.evaluate(logits, &grad);
    double gnorm_sq = 0.0;
    for (double g : grad.data) gnorm_sq += g * g;
    if (!std::isfinite(gnorm_sq)) {
      throw NonFiniteError("skinning gradient is not finite");
    }
    if (gnorm_sq < 1e-30 || loss == 0.0) break;

    bool accepted = false;
    double trial_loss = 0.0;
    for (int backoff = 0; backoff <= cfg.max_backoffs; ++backoff) {
      for (size_t k = 0; k < logits.data.size(); ++k) {
        trial.data[k] = logits.data[k] - step * grad.data[k];
      }
      trial_loss = eval.evaluate(trial, nullptr);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled against the backoff cap

    std::swap(logits.data, trial.data);
    const double prev = loss;
    loss = trial_loss;
    solution.loss_trace.push_back(loss);
    solution.iterations = iter + 1;
    step *= cfg.step_growth;
    if (prev - loss <= cfg.rel_tolerance * std::max(prev, 1e-300)) break;
  }

  solution.weights = skinning_weights_from_logits(std::move(logits), cfg.n_d);
  return solution;
}

}  // namespace rigkit
