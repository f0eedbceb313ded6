#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rigkit/fixtures.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/rng.hpp"

using namespace rigkit;

namespace {

std::vector<Vec3> random_points(Rng& rng, size_t count) {
  std::vector<Vec3> out(count);
  for (Vec3& p : out) {
    p = {rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)};
  }
  return out;
}

// Dense-sampling oracle: approximate each segment by many points.
double j2b_oracle(const std::vector<Vec3>& joints_a,
                  const std::vector<BoneSegment>& bones_a,
                  const std::vector<Vec3>& joints_b,
                  const std::vector<BoneSegment>& bones_b, int samples) {
  const auto side = [samples](const std::vector<Vec3>& joints,
                              const std::vector<BoneSegment>& bones) {
    double total = 0.0;
    for (const Vec3& j : joints) {
      double best = std::numeric_limits<double>::infinity();
      for (const BoneSegment& bone : bones) {
        for (int k = 0; k < samples; ++k) {
          const double t = static_cast<double>(k) / (samples - 1);
          best = std::min(best, norm_sq(j - (bone.a + (bone.b - bone.a) * t)));
        }
      }
      total += best;
    }
    return total / static_cast<double>(joints.size());
  };
  return side(joints_a, bones_b) + side(joints_b, bones_a);
}

}  // namespace

TEST_CASE("cd_j2j matches chamfer semantics") {
  CHECK(cd_j2j({{0, 0, 0}}, {{1, 0, 0}}) == doctest::Approx(2.0));
  const Skeleton s = make_character(CharacterTemplate::BipedSimple, 0).skeleton;
  CHECK(cd_j2j(joint_positions(s), joint_positions(s)) == 0.0);
  CHECK_THROWS_AS(cd_j2j({}, {{0, 0, 0}}), EmptySetError);
}

TEST_CASE("cd_j2b hand cases") {
  const std::vector<BoneSegment> bone{{{0, 0, 0}, {1, 0, 0}}};
  // A joint lying on the segment contributes zero.
  CHECK(cd_j2b({{0.5, 0, 0}}, bone, {{0.25, 0, 0}}, bone) ==
        doctest::Approx(0.0));
  // A joint at distance d from the interior contributes d^2 per direction.
  const double d = 0.7;
  CHECK(cd_j2b({{0.5, d, 0}}, bone, {{0.5, 0, 0}}, bone) ==
        doctest::Approx(d * d));
}

TEST_CASE("cd_j2b matches a dense-sampling oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ja = random_points(rng, 4 + rng.index(4));
    const auto jb = random_points(rng, 4 + rng.index(4));
    std::vector<BoneSegment> ba;
    std::vector<BoneSegment> bb;
    for (int k = 0; k < 5; ++k) {
      ba.push_back({{rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)},
                    {rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)}});
      bb.push_back({{rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)},
                    {rng.range(-2, 2), rng.range(-2, 2), rng.range(-2, 2)}});
    }
    const double exact = cd_j2b(ja, ba, jb, bb);
    const double approx = j2b_oracle(ja, ba, jb, bb, 1000);
    CHECK(std::abs(exact - approx) <=
          1e-4 * std::max(std::abs(approx), 1e-12));
  }
}

TEST_CASE("cd_b2b hand case: parallel unit segments") {
  const std::vector<BoneSegment> a{{{0, 0, 0}, {1, 0, 0}}};
  const std::vector<BoneSegment> b{{{0, 1, 0}, {1, 1, 0}}};
  CHECK(cd_b2b(a, b) == doctest::Approx(2.0));
  CHECK(cd_b2b(a, a) == 0.0);
  CHECK_THROWS_AS(cd_b2b({}, a), EmptySetError);
}

TEST_CASE("cd_b2b converges under sample density doubling") {
  // Bone-scale segments (lengths like an actual rig's) so 64 samples per
  // bone resolve the geometry.
  Rng rng(7);
  const auto random_bone = [&rng] {
    const Vec3 a{rng.range(-1, 1), rng.range(-1, 1), rng.range(-1, 1)};
    const double z = 2.0 * rng.unit() - 1.0;
    const double phi = 2.0 * M_PI * rng.unit();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 dir{r * std::cos(phi), z, r * std::sin(phi)};
    return BoneSegment{a, a + dir * rng.range(0.2, 0.6)};
  };
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<BoneSegment> a;
    std::vector<BoneSegment> b;
    for (int k = 0; k < 4; ++k) {
      a.push_back(random_bone());
      b.push_back(random_bone());
    }
    const double d64 = cd_b2b(a, b, 64);
    const double d128 = cd_b2b(a, b, 128);
    CHECK(std::abs(d64 - d128) <= 1e-3 * std::max(std::abs(d128), 1e-12));
  }
}

TEST_CASE("skinning_l1 hand cases") {
  DenseMatrix a(2, 2, 0.0);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  CHECK(skinning_l1(a, a) == 0.0);
  DenseMatrix b(2, 2, 0.0);
  b(0, 1) = 1.0;  // one-hot on the other joint
  b(1, 1) = 1.0;
  CHECK(skinning_l1(a, b) == doctest::Approx(1.0));  // 2.0 on one of 2 rows
  DenseMatrix u(1, 2, 0.5);
  DenseMatrix h(1, 2, 0.0);
  h(0, 0) = 1.0;
  CHECK(skinning_l1(u, h) == doctest::Approx(1.0));
  CHECK_THROWS_AS(skinning_l1(a, u), ShapeMismatchError);
}

TEST_CASE("deformation_errors hand cases") {
  const DeformedMesh gt{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}};
  const auto zero = deformation_errors(gt, gt);
  CHECK(zero.cd == 0.0);
  CHECK(zero.ade == 0.0);
  CHECK(zero.mde == 0.0);

  DeformedMesh shifted = gt;
  for (Vec3& v : shifted.vertices) v += Vec3{0.3, 0, 0};
  const auto s = deformation_errors(shifted, gt);
  CHECK(s.ade == doctest::Approx(0.3));
  CHECK(s.mde == doctest::Approx(0.3));

  DeformedMesh ten{std::vector<Vec3>(10, Vec3{0, 0, 0})};
  DeformedMesh ten_gt = ten;
  for (int i = 0; i < 10; ++i) ten.vertices[i].x = static_cast<double>(i);
  for (int i = 0; i < 10; ++i) ten_gt.vertices[i].x = static_cast<double>(i);
  ten.vertices[3].y += 1.0;
  const auto one = deformation_errors(ten, ten_gt);
  CHECK(one.ade == doctest::Approx(0.1));
  CHECK(one.mde == doctest::Approx(1.0));
  CHECK(one.ade <= one.mde);

  CHECK_THROWS_AS(deformation_errors(DeformedMesh{{{0, 0, 0}}}, gt),
                  ShapeMismatchError);
  // CD alone accepts differing vertex counts.
  CHECK(deformation_cd(DeformedMesh{{{0, 0, 0}}}, gt) ==
        doctest::Approx(0.5 * (0.0 + (0.0 + 1.0 + 1.0) / 3.0)));
}

TEST_CASE("deformation cd matches a brute-force oracle exactly") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const DeformedMesh a{random_points(rng, 6 + rng.index(6))};
    DeformedMesh b = a;  // equal counts for ADE/MDE
    for (Vec3& v : b.vertices) {
      v += Vec3{rng.range(-0.5, 0.5), rng.range(-0.5, 0.5),
                rng.range(-0.5, 0.5)};
    }
    const auto err = deformation_errors(a, b);
    // Oracle: unsquared nearest distances averaged both ways, halved.
    double ab = 0.0;
    for (const Vec3& x : a.vertices) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& y : b.vertices) {
        const double dx = x.x - y.x;
        const double dy = x.y - y.y;
        const double dz = x.z - y.z;
        const double d2 = (dx * dx + dy * dy) + dz * dz;
        best = d2 < best ? d2 : best;
      }
      ab += std::sqrt(best);
    }
    double ba = 0.0;
    for (const Vec3& y : b.vertices) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& x : a.vertices) {
        const double dx = y.x - x.x;
        const double dy = y.y - x.y;
        const double dz = y.z - x.z;
        const double d2 = (dx * dx + dy * dy) + dz * dz;
        best = d2 < best ? d2 : best;
      }
      ba += std::sqrt(best);
    }
    const double oracle = 0.5 * (ab / a.vertices.size() + ba / b.vertices.size());
    CHECK(err.cd == oracle);
  }
}

TEST_CASE("els hand cases") {
  const std::vector<Edge> edges{{0, 1}, {1, 2}};
  const DeformedMesh gt{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}};
  CHECK(els(gt, gt, edges) == doctest::Approx(1.0));

  // One exact edge, one at double length -> (1 + 0) / 2.
  const DeformedMesh stretched{{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}}};
  CHECK(els(stretched, gt, edges) == doctest::Approx(0.5));

  // An edge at 10x length contributes 1 - 9 = -8.
  const DeformedMesh wild{{{0, 0, 0}, {10, 0, 0}}};
  const DeformedMesh wild_gt{{{0, 0, 0}, {1, 0, 0}}};
  CHECK(els(wild, wild_gt, {{0, 1}}) == doctest::Approx(-8.0));

  // Uniform 2x scaling gives per-edge term 0, as defined.
  DeformedMesh doubled = gt;
  for (Vec3& v : doubled.vertices) v *= 2.0;
  CHECK(els(doubled, gt, edges) == doctest::Approx(0.0));
}

TEST_CASE("els skips zero-length gt edges with a count") {
  const DeformedMesh gt{{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}}};
  const DeformedMesh pred{{{0, 0, 0}, {0.5, 0, 0}, {1, 0, 0}}};
  int skipped = 0;
  const double score = els(pred, gt, {{0, 1}, {0, 2}}, &skipped);
  CHECK(skipped == 1);
  CHECK(score == doctest::Approx(1.0));
}

TEST_CASE("els is exactly 1 on identical meshes of every fixture") {
  for (const auto tmpl :
       {CharacterTemplate::TwoBoneCylinder, CharacterTemplate::BipedSimple}) {
    const SyntheticCharacter c = make_character(tmpl, 2);
    const DeformedMesh d{c.mesh.vertices};
    CHECK(els(d, d, c.mesh.edges) == 1.0);
  }
}

TEST_CASE("metric report renders raw and x1000 values") {
  MetricReport r;
  r.cd_j2j = 0.015;
  r.cd_j2b = 0.011;
  r.cd_b2b = 0.009;
  r.skinning_l1 = 0.04;
  r.cd = 0.007;
  r.ade = 0.008;
  r.mde = 0.026;
  r.els = 0.89;
  r.has_rigging = r.has_skinning = r.has_deformation = true;
  r.frames = 8;
  const std::string text = write_metric_report(r);
  CHECK(text.find("cd_j2j 0.015") != std::string::npos);
  CHECK(text.find("cd_j2j_x1000 15") != std::string::npos);
  CHECK(text.find("skinning_l1 0.04") != std::string::npos);
  CHECK(text.find("els 0.89") != std::string::npos);
  const std::string table = format_metric_table(r);
  CHECK(table.find("CD-J2J") != std::string::npos);
  CHECK(table.find("15.00") != std::string::npos);
}
