#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rigkit/fixtures.hpp"
#include "rigkit/io.hpp"
#include "rigkit/rng.hpp"
#include "rigkit/rotation.hpp"
#include "rigkit/solvers.hpp"

using namespace rigkit;

namespace {

std::string data_file(const std::string& name) {
  return std::string(RIGKIT_TEST_DATA_DIR) + "/" + name;
}

// Independent O(nm) chamfer oracle; must stay a plain loop so the kernel
// path is checked against straight-line arithmetic.
double chamfer_oracle(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  double total_ab = 0.0;
  for (const Vec3& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& y : b) {
      const double dx = x.x - y.x;
      const double dy = x.y - y.y;
      const double dz = x.z - y.z;
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      best = d2 < best ? d2 : best;
    }
    total_ab += best;
  }
  double total_ba = 0.0;
  for (const Vec3& y : b) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& x : a) {
      const double dx = y.x - x.x;
      const double dy = y.y - x.y;
      const double dz = y.z - x.z;
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      best = d2 < best ? d2 : best;
    }
    total_ba += best;
  }
  return total_ab / static_cast<double>(a.size()) +
         total_ba / static_cast<double>(b.size());
}

std::vector<Vec3> random_points(Rng& rng, size_t count) {
  std::vector<Vec3> out(count);
  for (Vec3& p : out) {
    p = {rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)};
  }
  return out;
}

Mat3 random_rotation(Rng& rng, double scale) {
  const double z = 2.0 * rng.unit() - 1.0;
  const double phi = 2.0 * M_PI * rng.unit();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return rotation_about_axis({r * std::cos(phi), z, r * std::sin(phi)},
                             rng.range(-scale, scale));
}

}  // namespace

TEST_CASE("loss_vtx hand cases") {
  const DeformedMesh gt{{{0, 0, 0}, {1, 0, 0}}};
  CHECK(loss_vtx(gt, gt) == 0.0);
  const DeformedMesh off{{{0, 0, 0}, {2, 0, 0}}};
  CHECK(loss_vtx(off, gt) == doctest::Approx(0.5));
  const Vec3 t{0.3, -0.4, 1.0};
  const DeformedMesh shifted{{gt.vertices[0] + t, gt.vertices[1] + t}};
  CHECK(loss_vtx(shifted, gt) == doctest::Approx(norm_sq(t)));
  CHECK_THROWS_AS(loss_vtx(DeformedMesh{{{0, 0, 0}}}, gt), ShapeMismatchError);
}

TEST_CASE("loss_edge hand cases") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const DeformedMesh gt{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}};
  CHECK(loss_edge(gt, gt, edges) == 0.0);
  const Vec3 t{5, 5, 5};
  const DeformedMesh shifted{
      {gt.vertices[0] + t, gt.vertices[1] + t, gt.vertices[2] + t}};
  CHECK(loss_edge(shifted, gt, edges) == 0.0);
  // One of two edge vectors off by (1,0,0).
  const DeformedMesh bent{{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}}};
  CHECK(loss_edge(bent, gt, edges) == doctest::Approx(0.5));
  CHECK_THROWS_AS(loss_edge(gt, gt, {{0, 7}}), IndexOutOfRangeError);
}

TEST_CASE("chamfer hand cases and symmetry") {
  CHECK(chamfer({{0, 0, 0}}, {{1, 0, 0}}) == doctest::Approx(2.0));
  const std::vector<Vec3> same{{1, 2, 3}, {-1, 0, 2}};
  CHECK(chamfer(same, same) == 0.0);
  CHECK_THROWS_AS(chamfer({}, same), EmptySetError);
}

TEST_CASE("chamfer matches the brute-force oracle exactly") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_points(rng, 5 + rng.index(5));
    const auto b = random_points(rng, 5 + rng.index(7));
    CHECK(chamfer(a, b) == chamfer_oracle(a, b));
    CHECK(chamfer(a, b) == chamfer(b, a));
  }
}

TEST_CASE("loss_skel supports differing joint counts") {
  // An added midpoint joint costs strictly less than a removed limb joint.
  const std::vector<Vec3> original{{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {1, 2, 0}};
  std::vector<Vec3> with_midpoint = original;
  with_midpoint.push_back({0, 0.5, 0});
  std::vector<Vec3> missing_limb(original.begin(), original.end() - 1);
  const double mid = loss_skel(original, with_midpoint);
  const double missing = loss_skel(original, missing_limb);
  CHECK(mid == doctest::Approx(chamfer_oracle(original, with_midpoint)));
  CHECK(missing == doctest::Approx(chamfer_oracle(original, missing_limb)));
  CHECK(mid < missing);
}

TEST_CASE("sdf_eval on the unit cube") {
  const Mesh cube = parse_obj(read_text_file(data_file("cube.obj")));
  CHECK(sdf_eval_point(cube, {0.5, 0.5, 0.5}) == doctest::Approx(-0.5));
  CHECK(sdf_eval_point(cube, {2.0, 0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(std::abs(sdf_eval_point(cube, {1.0, 0.5, 0.5})) < 1e-6);
  CHECK_THROWS_AS(sdf_eval_point(Mesh{}, {0, 0, 0}), EmptyMeshError);
}

TEST_CASE("loss_sdf raw mean and hinge variant") {
  const Mesh cube = parse_obj(read_text_file(data_file("cube.obj")));
  // All joints deep inside -> negative.
  CHECK(loss_sdf(cube, {{0.5, 0.5, 0.5}, {0.4, 0.5, 0.5}}) < 0.0);
  // One joint outside at +1, one inside at -0.5, and a matched pair -> mean.
  const double mean = loss_sdf(cube, {{2.0, 0.5, 0.5}, {0.5, 0.5, 0.5}});
  CHECK(mean == doctest::Approx((1.0 - 0.5) / 2.0));
  // Hinge with margin 0 and all joints inside -> 0.
  CHECK(hinge_loss_sdf(cube, {{0.5, 0.5, 0.5}}, 0.0) == 0.0);
  CHECK(hinge_loss_sdf(cube, {{2.0, 0.5, 0.5}}, 0.0) ==
        doctest::Approx(1.0));
}

TEST_CASE("symmetrize_residual examples and properties") {
  const std::vector<int> rho{1, 0, 2};
  {
    // Fixed point stays put.
    const std::vector<Vec3> delta{{1, 2, 3}, {-1, 2, 3}, {0, 1, 1}};
    const auto out = symmetrize_residual(delta, rho);
    CHECK(norm(out[0] - delta[0]) == 0.0);
    CHECK(norm(out[1] - delta[1]) == 0.0);
  }
  {
    // Identical pair collapses its lateral component.
    const std::vector<Vec3> delta{{1, 0, 0}, {1, 0, 0}, {0, 0, 0}};
    const auto out = symmetrize_residual(delta, rho);
    CHECK(norm(out[0]) == 0.0);
    CHECK(norm(out[1]) == 0.0);
  }
  {
    // Self-paired joints get x zeroed.
    const std::vector<Vec3> delta{{0, 0, 0}, {0, 0, 0}, {1, 2, 3}};
    const auto out = symmetrize_residual(delta, rho);
    CHECK(norm(out[2] - Vec3{0, 2, 3}) == 0.0);
  }
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<int> rho4{2, 1, 0, 3};
    std::vector<Vec3> delta(4);
    for (Vec3& d : delta) {
      d = {rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)};
    }
    const auto once = symmetrize_residual(delta, rho4);
    const auto twice = symmetrize_residual(once, rho4);
    for (size_t j = 0; j < 4; ++j) {
      CHECK(norm(twice[j] - once[j]) == 0.0);
      // Mirror identity holds exactly.
      const Vec3 mirrored{-once[rho4[j]].x, once[rho4[j]].y, once[rho4[j]].z};
      CHECK(norm(once[j] - mirrored) == 0.0);
    }
  }
}

TEST_CASE("row_softmax is stochastic and finite for extreme logits") {
  Rng rng(6);
  DenseMatrix logits(64, 7, 0.0);
  for (double& v : logits.data) v = rng.range(-50.0, 50.0);
  logits(0, 0) = 50.0;
  logits(0, 1) = -50.0;
  const DenseMatrix w = row_softmax(logits, 32.0);
  for (size_t r = 0; r < w.rows; ++r) {
    double sum = 0.0;
    for (size_t c = 0; c < w.cols; ++c) {
      CHECK(std::isfinite(w(r, c)));
      CHECK(w(r, c) > 0.0);
      sum += w(r, c);
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("skinning gradient matches central finite differences") {
  Rng rng(7);
  // 10-vertex, 3-joint random instance as the module example prescribes.
  const Mesh mesh = make_mesh(random_points(rng, 10),
                              {{0, 1, 2}, {2, 3, 4}, {4, 5, 6}, {6, 7, 8}});
  const Skeleton s = make_skeleton(
      {"A", "B", "C"}, {-1, 0, 1}, {{0, 0, 0}, {0, 1, 0}, {0, 1, 0}});
  SkinningSolveConfig cfg;
  cfg.n_d = 32.0;

  std::vector<TrainingSample> samples;
  for (int k = 0; k < 2; ++k) {
    std::vector<Mat3> locals(3);
    for (auto& m : locals) m = random_rotation(rng, 0.7);
    const PoseTransforms pose =
        forward_kinematics(s, locals, {rng.range(-1, 1), 0, rng.range(-1, 1)});
    samples.push_back({DeformedMesh{random_points(rng, 10)}, pose});
  }

  DenseMatrix logits(10, 3, 0.0);
  for (double& v : logits.data) v = rng.range(-1.0, 1.0);

  DenseMatrix grad;
  skinning_objective(mesh, samples, s, logits, cfg, &grad);

  const double eps = 1e-4;
  double max_rel = 0.0;
  for (size_t k = 0; k < logits.data.size(); ++k) {
    DenseMatrix hi = logits;
    DenseMatrix lo = logits;
    hi.data[k] += eps;
    lo.data[k] -= eps;
    const double fd = (skinning_objective(mesh, samples, s, hi, cfg) -
                       skinning_objective(mesh, samples, s, lo, cfg)) /
                      (2.0 * eps);
    const double denom = std::max(std::abs(fd), 1e-8);
    max_rel = std::max(max_rel, std::abs(grad.data[k] - fd) / denom);
  }
  CHECK(max_rel < 1e-3);
}

TEST_CASE("rig gradient matches central finite differences") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::TwoBoneCylinder, 3);
  RigSolveConfig cfg;
  const double height = skeleton_height(c.skeleton);
  Rng rng(8);
  std::vector<Vec3> g_gt = c.skeleton.rest_global;
  for (Vec3& g : g_gt) {
    g += Vec3{rng.range(-0.1, 0.1), rng.range(-0.1, 0.1), rng.range(-0.1, 0.1)};
  }

  std::vector<Vec3> delta(c.skeleton.joint_count());
  for (Vec3& d : delta) {
    d = {rng.range(-0.05, 0.05), rng.range(-0.05, 0.05),
         rng.range(-0.05, 0.05)};
  }

  std::vector<Vec3> grad;
  rig_objective(c.mesh, c.skeleton, delta, g_gt, cfg, &grad);

  // Gate: keep away from SDF sign flips and hinge kinks.
  const double margin = cfg.sdf_margin_fraction * height;
  {
    std::vector<Vec3> g(c.skeleton.joint_count());
    for (size_t j = 0; j < g.size(); ++j) g[j] = c.skeleton.rest_global[j];
    const auto sdf = sdf_eval(c.mesh, g);
    for (double v : sdf) {
      CHECK(std::abs(v) > 1e-3);
    }
    (void)margin;
  }

  const double eps = 1e-4;
  double max_rel = 0.0;
  for (size_t j = 0; j < delta.size(); ++j) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<Vec3> hi = delta;
      std::vector<Vec3> lo = delta;
      hi[j][axis] += eps;
      lo[j][axis] -= eps;
      const double fd = (rig_objective(c.mesh, c.skeleton, hi, g_gt, cfg) -
                         rig_objective(c.mesh, c.skeleton, lo, g_gt, cfg)) /
                        (2.0 * eps);
      const double denom = std::max(std::abs(fd), 1e-6);
      max_rel = std::max(max_rel, std::abs(grad[j][axis] - fd) / denom);
    }
  }
  CHECK(max_rel < 1e-3);
}

TEST_CASE("solve_skinning single joint gives all-ones weights") {
  const Mesh m = make_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
  const Skeleton s = make_skeleton({"Solo"}, {-1}, {{0, 0, 0}});
  std::vector<TrainingSample> samples;
  const PoseTransforms posed =
      forward_kinematics(s, {rotation_about_y(0.5)}, {0.2, 0, 0});
  const auto ts = skinning_transforms(rest_pose(s), posed);
  DeformedMesh gt;
  for (const Vec3& v : m.vertices) gt.vertices.push_back(ts[0].apply(v));
  samples.push_back({gt, posed});
  const SkinningSolution sol = solve_skinning(m, samples, s, {});
  for (double w : sol.weights.weights.data) {
    CHECK(w == 1.0);
  }
  CHECK(sol.loss_trace.back() < 1e-18);
}

TEST_CASE("solve_skinning warns when every sample is a rest pose") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::TwoBoneCylinder, 4);
  std::vector<TrainingSample> samples;
  samples.push_back(
      {DeformedMesh{c.mesh.vertices}, rest_pose(c.skeleton)});
  const SkinningSolution sol = solve_skinning(c.mesh, samples, c.skeleton, {});
  CHECK_FALSE(sol.identifiable);
  REQUIRE(sol.warnings.size() == 1);
  CHECK(sol.loss_trace.back() < 1e-18);
}

TEST_CASE("solve_skinning recovers ground-truth weights on the cylinder") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::TwoBoneCylinder, 11);
  REQUIRE(c.mesh.vertices.size() >= 64);
  const auto clip = make_clip(c.skeleton, ClipKind::RandomSmooth, 8, 21);
  const auto frames = deform_clip(c.mesh, c.gt_weights, c.skeleton, clip);
  std::vector<TrainingSample> samples;
  for (size_t f = 0; f < clip.size(); ++f) {
    samples.push_back({frames[f], clip[f]});
  }
  SkinningSolveConfig cfg;
  cfg.seed = 0;
  const SkinningSolution sol = solve_skinning(c.mesh, samples, c.skeleton, cfg);

  double l1 = 0.0;
  for (size_t i = 0; i < c.gt_weights.rows; ++i) {
    for (size_t j = 0; j < c.gt_weights.cols; ++j) {
      l1 += std::abs(sol.weights.weights(i, j) - c.gt_weights(i, j));
    }
  }
  l1 /= static_cast<double>(c.gt_weights.rows);
  CHECK(l1 <= 0.05);

  // Loss trace is monotone non-increasing.
  for (size_t k = 1; k < sol.loss_trace.size(); ++k) {
    CHECK(sol.loss_trace[k] <= sol.loss_trace[k - 1]);
  }
}

TEST_CASE("descriptor-guided initialization stays deterministic and valid") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::TwoBoneCylinder, 29);
  // Positions double as a 3-feature descriptor field for this check.
  DescriptorField d;
  d.values = DenseMatrix(c.mesh.vertices.size(), 3, 0.0);
  for (size_t i = 0; i < c.mesh.vertices.size(); ++i) {
    d.values(i, 0) = c.mesh.vertices[i].x;
    d.values(i, 1) = c.mesh.vertices[i].y;
    d.values(i, 2) = c.mesh.vertices[i].z;
  }
  const auto clip = make_clip(c.skeleton, ClipKind::RandomSmooth, 8, 33);
  const auto frames = deform_clip(c.mesh, c.gt_weights, c.skeleton, clip);
  std::vector<TrainingSample> samples;
  for (size_t f = 0; f < clip.size(); ++f) {
    samples.push_back({frames[f], clip[f]});
  }
  SkinningSolveConfig cfg;
  const SkinningSolution a = solve_skinning(c.mesh, samples, c.skeleton, cfg, &d);
  const SkinningSolution b = solve_skinning(c.mesh, samples, c.skeleton, cfg, &d);
  CHECK(a.weights.weights.data == b.weights.weights.data);

  double l1 = 0.0;
  for (size_t i = 0; i < c.gt_weights.rows; ++i) {
    for (size_t j = 0; j < c.gt_weights.cols; ++j) {
      l1 += std::abs(a.weights.weights(i, j) - c.gt_weights(i, j));
    }
  }
  l1 /= static_cast<double>(c.gt_weights.rows);
  CHECK(l1 <= 0.05);  // smoothing must not break recovery

  DescriptorField wrong;
  wrong.values = DenseMatrix(3, 2, 0.0);
  CHECK_THROWS_AS(init_skinning_logits(c.mesh, c.skeleton, cfg, &wrong),
                  ShapeMismatchError);
}

TEST_CASE("solve_skinning is invariant to sample order") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::TwoBoneCylinder, 13);
  const auto clip = make_clip(c.skeleton, ClipKind::RandomSmooth, 6, 5);
  const auto frames = deform_clip(c.mesh, c.gt_weights, c.skeleton, clip);
  std::vector<TrainingSample> samples;
  for (size_t f = 0; f < clip.size(); ++f) {
    samples.push_back({frames[f], clip[f]});
  }
  SkinningSolveConfig cfg;
  cfg.max_iterations = 200;
  const double a = solve_skinning(c.mesh, samples, c.skeleton, cfg)
                       .loss_trace.back();
  std::reverse(samples.begin(), samples.end());
  const double b = solve_skinning(c.mesh, samples, c.skeleton, cfg)
                       .loss_trace.back();
  CHECK(std::abs(a - b) < 1e-6 * std::max(1.0, std::abs(a)));
}

TEST_CASE("solve_rig recovers a half-scaled skeleton") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::BipedSimple, 17);
  const Skeleton gt = ground_skeleton(c.skeleton);

  std::vector<Vec3> scaled_offsets;
  for (const Vec3& o : gt.offsets) scaled_offsets.push_back(o * 0.5);
  const Skeleton src =
      make_skeleton(gt.names, gt.parent, scaled_offsets, gt.rho);

  RigSolveConfig cfg;
  const RigSolution sol = solve_rig(c.mesh, src, cfg, gt.rest_global);

  const double height = skeleton_height(gt);
  const double cd = chamfer_oracle(sol.target_skeleton.rest_global,
                                   gt.rest_global);
  CHECK(cd < 1e-3 * height * height);

  // Symmetry fixed point and grounding hold exactly.
  const auto sym = symmetrize_residual(sol.delta_o, src.rho);
  for (size_t j = 0; j < sym.size(); ++j) {
    CHECK(norm(sym[j] - sol.delta_o[j]) == 0.0);
  }
  const auto toes = toe_joints(sol.target_skeleton);
  double min_toe = std::numeric_limits<double>::infinity();
  for (int toe : toes) {
    min_toe = std::min(min_toe, sol.target_skeleton.rest_global[toe].y);
  }
  CHECK(std::abs(min_toe) < 1e-9);
}

TEST_CASE("solve_rig leaves an already-aligned skeleton in place") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::BipedSimple, 19);
  const Skeleton gt = ground_skeleton(c.skeleton);
  RigSolveConfig cfg;
  const RigSolution sol = solve_rig(c.mesh, gt, cfg, gt.rest_global);
  const double height = skeleton_height(gt);
  for (const Vec3& d : sol.delta_o) {
    CHECK(std::abs(d.x) < 1e-4 * height);
    CHECK(std::abs(d.y) < 1e-4 * height);
    CHECK(std::abs(d.z) < 1e-4 * height);
  }
}

TEST_CASE("solve_rig without ground truth embeds joints in the mesh") {
  const SyntheticCharacter c =
      make_character(CharacterTemplate::BipedSimple, 23);
  // Shrunken copy of the skeleton as source.
  std::vector<Vec3> scaled;
  for (const Vec3& o : c.skeleton.offsets) scaled.push_back(o * 0.6);
  const Skeleton src = make_skeleton(c.skeleton.names, c.skeleton.parent,
                                     scaled, c.skeleton.rho);
  RigSolveConfig cfg;
  const RigSolution sol = solve_rig(c.mesh, src, cfg, std::nullopt);
  CHECK(sol.warnings.size() >= 1);
  CHECK(sol.loss_trace.back() <= sol.loss_trace.front());
}

TEST_CASE("solve_rig validates inputs") {
  const Skeleton s = make_skeleton({"A"}, {-1}, {{0, 0, 0}});
  CHECK_THROWS_AS(solve_rig(Mesh{}, s, {}, std::nullopt), EmptyMeshError);
}
