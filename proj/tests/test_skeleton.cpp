#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rigkit/fixtures.hpp"
#include "rigkit/rng.hpp"
#include "rigkit/rotation.hpp"
#include "rigkit/skeleton.hpp"

using namespace rigkit;

namespace {

Skeleton two_joint_chain() {
  return make_skeleton({"Root", "Child"}, {-1, 0}, {{0, 0, 0}, {1, 0, 0}});
}

}  // namespace

TEST_CASE("make_skeleton computes rest globals and validates the tree") {
  const Skeleton s = make_skeleton({"A", "B", "C"}, {-1, 0, 1},
                                   {{0, 1, 0}, {0, 1, 0}, {1, 0, 0}});
  CHECK(norm(s.rest_global[0] - Vec3{0, 1, 0}) == 0.0);
  CHECK(norm(s.rest_global[1] - Vec3{0, 2, 0}) == 0.0);
  CHECK(norm(s.rest_global[2] - Vec3{1, 2, 0}) == 0.0);

  CHECK_THROWS_AS(
      make_skeleton({"A", "B"}, {-1, -1}, {{0, 0, 0}, {0, 0, 0}}),
      InvalidConfigError);  // two roots
  CHECK_THROWS_AS(make_skeleton({"A", "B"}, {1, 0}, {{0, 0, 0}, {0, 0, 0}}),
                  InvalidConfigError);  // cycle, no root
}

TEST_CASE("forward_kinematics identity reproduces rest pose") {
  const Skeleton s = two_joint_chain();
  const PoseTransforms pose = rest_pose(s);
  CHECK(norm(pose.global[0].translation - Vec3{0, 0, 0}) == 0.0);
  CHECK(norm(pose.global[1].translation - Vec3{1, 0, 0}) == 0.0);
}

TEST_CASE("forward_kinematics rotates children about the parent") {
  const Skeleton s = two_joint_chain();
  std::vector<Mat3> locals{rotation_about_z(M_PI / 2.0), Mat3::identity()};
  const PoseTransforms pose = forward_kinematics(s, locals, {0, 0, 0});
  CHECK(norm(pose.global[1].translation - Vec3{0, 1, 0}) < 1e-12);
}

TEST_CASE("forward_kinematics validates input") {
  const Skeleton s = two_joint_chain();
  CHECK_THROWS_AS(forward_kinematics(s, {Mat3::identity()}, {0, 0, 0}),
                  SizeMismatchError);
  Mat3 bad = Mat3::identity();
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(forward_kinematics(s, {bad, Mat3::identity()}, {0, 0, 0}),
                  InvalidRotationError);
}

TEST_CASE("rest pose FK reproduces rest globals on every fixture skeleton") {
  for (const auto tmpl :
       {CharacterTemplate::TwoBoneCylinder, CharacterTemplate::BipedSimple,
        CharacterTemplate::BipedBranchy}) {
    const Skeleton s = make_character(tmpl, 1).skeleton;
    const PoseTransforms pose = rest_pose(s);
    for (size_t j = 0; j < s.joint_count(); ++j) {
      CHECK(norm(pose.global[j].translation - s.rest_global[j]) == 0.0);
    }
  }
}

TEST_CASE("skinning_transforms identity and rigid factorization") {
  const Skeleton s = two_joint_chain();
  const PoseTransforms rest = rest_pose(s);
  const auto id = skinning_transforms(rest, rest);
  for (const auto& t : id) {
    CHECK(max_abs(t.rotation - Mat3::identity()) < 1e-12);
    CHECK(norm(t.translation) < 1e-12);
  }

  // A rigid motion of the whole skeleton shows up as that motion in every T_j.
  const Mat3 r = rotation_about_y(0.7);
  std::vector<Mat3> locals{r, Mat3::identity()};
  const Vec3 shift{0.3, 2.0, -1.0};
  const PoseTransforms posed = forward_kinematics(s, locals, shift);
  const auto ts = skinning_transforms(rest, posed);
  for (const auto& t : ts) {
    CHECK(max_abs(t.rotation - r) < 1e-12);
    CHECK(norm(t.translation - shift) < 1e-12);
  }
}

TEST_CASE("single joint translation gives a pure translation transform") {
  const Skeleton s = make_skeleton({"Solo"}, {-1}, {{0, 0, 0}});
  const PoseTransforms rest = rest_pose(s);
  const PoseTransforms posed =
      forward_kinematics(s, {Mat3::identity()}, {0, 2, 0});
  const auto ts = skinning_transforms(rest, posed);
  CHECK(max_abs(ts[0].rotation - Mat3::identity()) < 1e-12);
  CHECK(norm(ts[0].translation - Vec3{0, 2, 0}) < 1e-12);
}

TEST_CASE("ground_skeleton lowers and raises to toe height zero") {
  for (const double toe_y : {0.3, -0.2}) {
    const Skeleton s =
        make_skeleton({"Hips", "Foot", "ToeBase"}, {-1, 0, 1},
                      {{0, 1 + toe_y, 0}, {0, -0.9, 0}, {0, -0.1, 0}});
    CHECK(s.rest_global[2].y == doctest::Approx(toe_y));
    const Skeleton g = ground_skeleton(s);
    CHECK(g.rest_global[2].y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.rest_global[0].y == doctest::Approx(1.0));
  }
}

TEST_CASE("ground_skeleton is idempotent and warns without toes") {
  const Skeleton s = make_skeleton({"A", "B"}, {-1, 0}, {{0, 1, 0}, {0, 1, 0}});
  std::vector<std::string> warnings;
  const Skeleton g = ground_skeleton(s, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(g.rest_global[0].y == 0.0);
  const Skeleton g2 = ground_skeleton(g);
  for (size_t j = 0; j < g.joint_count(); ++j) {
    CHECK(norm(g2.rest_global[j] - g.rest_global[j]) == 0.0);
    CHECK(norm(g2.offsets[j] - g.offsets[j]) == 0.0);
  }
}

TEST_CASE("infer_symmetry_map name conventions") {
  {
    const Skeleton s = make_skeleton({"Hips", "LeftArm", "RightArm"},
                                     {-1, 0, 0},
                                     {{0, 0, 0}, {1, 0, 0}, {-1, 0, 0}});
    CHECK(s.rho == std::vector<int>{0, 2, 1});
  }
  {
    const Skeleton s =
        make_skeleton({"Hips", "Spine"}, {-1, 0}, {{0, 0, 0}, {0, 1, 0}});
    CHECK(s.rho == std::vector<int>{0, 1});
  }
  {
    const Skeleton s = make_skeleton(
        {"root", "L_knee", "R_knee", "L_foot", "R_foot"}, {-1, 0, 0, 1, 2},
        {{0, 1, 0},
         {0.2, -0.5, 0},
         {-0.2, -0.5, 0},
         {0, -0.5, 0},
         {0, -0.5, 0}});
    CHECK(s.rho == std::vector<int>{0, 2, 1, 4, 3});
  }
  {
    // Suffix rule plus geometric fallback for unnamed pairs.
    const Skeleton s = make_skeleton(
        {"core", "arm.L", "arm.R", "wing1", "wing2"}, {-1, 0, 0, 0, 0},
        {{0, 1, 0},
         {0.5, 0, 0},
         {-0.5, 0, 0},
         {0.3, 0.4, 0},
         {-0.3, 0.4, 0}});
    CHECK(s.rho == std::vector<int>{0, 2, 1, 4, 3});
  }
}

TEST_CASE("rho is an involution and symmetry survives augmentation") {
  const Skeleton s =
      make_character(CharacterTemplate::BipedBranchy, 3).skeleton;
  AugmentConfig cfg;
  cfg.insert_joints = 2;
  cfg.remove_joints = 1;
  for (uint64_t seed = 0; seed < 6; ++seed) {
    const Skeleton a = augment_skeleton(s, seed, cfg);
    for (size_t j = 0; j < a.joint_count(); ++j) {
      CHECK(a.rho[a.rho[j]] == static_cast<int>(j));
      const Vec3 mirrored{-a.rest_global[a.rho[j]].x,
                          a.rest_global[a.rho[j]].y,
                          a.rest_global[a.rho[j]].z};
      CHECK(norm(a.rest_global[j] - mirrored) < 1e-9);
    }
  }
}

TEST_CASE("insert_joint splits a bone at its midpoint") {
  const Skeleton s = make_skeleton({"A", "B"}, {-1, 0}, {{0, 0, 0}, {2, 0, 0}});
  const Skeleton with = insert_joint(s, 1);
  REQUIRE(with.joint_count() == 3);
  CHECK(norm(with.offsets[1] - Vec3{1, 0, 0}) == 0.0);
  CHECK(norm(with.offsets[2] - Vec3{1, 0, 0}) == 0.0);
  CHECK(norm(with.rest_global[1] - Vec3{2, 0, 0}) == 0.0);  // leaf unchanged

  const Skeleton back = remove_joint(with, 2);
  REQUIRE(back.joint_count() == 2);
  for (size_t j = 0; j < 2; ++j) {
    CHECK(norm(back.rest_global[j] - s.rest_global[j]) < 1e-9);
  }
}

TEST_CASE("remove_joint rejects root and branching joints") {
  const Skeleton s = make_character(CharacterTemplate::BipedSimple, 0).skeleton;
  CHECK_THROWS_AS(remove_joint(s, s.root()), InvalidConfigError);
  const auto kids = s.children();
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (kids[j].size() > 1) {
      CHECK_THROWS_AS(remove_joint(s, static_cast<int>(j)),
                      InvalidConfigError);
      break;
    }
  }
}

TEST_CASE("uniform bone scale halves every offset") {
  const Skeleton s = make_character(CharacterTemplate::BipedSimple, 0).skeleton;
  AugmentConfig cfg;
  cfg.bone_scale_min = 0.5;
  cfg.bone_scale_max = 0.5;
  cfg.root_height_min = 1.0;
  cfg.root_height_max = 1.0;
  const Skeleton a = augment_skeleton(s, 9, cfg);
  REQUIRE(a.joint_count() == s.joint_count());
  for (size_t j = 0; j < s.joint_count(); ++j) {
    if (a.parent[j] < 0) continue;
    CHECK(norm(a.offsets[j]) == doctest::Approx(0.5 * norm(s.offsets[j])));
  }
}

TEST_CASE("augment_skeleton is deterministic under seed") {
  const Skeleton s = make_character(CharacterTemplate::BipedSimple, 0).skeleton;
  AugmentConfig cfg;
  cfg.insert_joints = 1;
  cfg.remove_joints = 1;
  const Skeleton a = augment_skeleton(s, 123, cfg);
  const Skeleton b = augment_skeleton(s, 123, cfg);
  REQUIRE(a.joint_count() == b.joint_count());
  CHECK(a.names == b.names);
  for (size_t j = 0; j < a.joint_count(); ++j) {
    CHECK(norm(a.offsets[j] - b.offsets[j]) == 0.0);
  }
}

TEST_CASE("augment_skeleton rejects invalid configs") {
  const Skeleton s = two_joint_chain();
  AugmentConfig cfg;
  cfg.bone_scale_min = -1.0;
  CHECK_THROWS_AS(augment_skeleton(s, 0, cfg), InvalidConfigError);
  cfg = {};
  cfg.insert_joints = -2;
  CHECK_THROWS_AS(augment_skeleton(s, 0, cfg), InvalidConfigError);
}

TEST_CASE("augmentation keeps the tree whole and bones above the minimum") {
  const Skeleton s =
      make_character(CharacterTemplate::BipedBranchy, 5).skeleton;
  AugmentConfig cfg;
  cfg.insert_joints = 3;
  cfg.remove_joints = 2;
  for (uint64_t seed = 100; seed < 110; ++seed) {
    const Skeleton a = augment_skeleton(s, seed, cfg);
    validate_skeleton(a);  // single root, acyclic, consistent fields
    for (size_t j = 0; j < a.joint_count(); ++j) {
      if (a.parent[j] < 0) continue;
      if (norm(a.offsets[j]) == 0.0) continue;  // authored zero-length bone
      CHECK(norm(a.offsets[j]) >= cfg.min_bone_length);
    }
  }
}

TEST_CASE("find_facing_joints picks hips and shoulders by name") {
  const Skeleton s = make_character(CharacterTemplate::BipedSimple, 0).skeleton;
  const FacingJoints fj = find_facing_joints(s);
  REQUIRE(fj.valid());
  CHECK(s.names[fj.left_hip] == "LeftUpLeg");
  CHECK(s.names[fj.right_hip] == "RightUpLeg");
  CHECK(s.rest_global[fj.left_hip].x > s.rest_global[fj.right_hip].x);
  CHECK(s.rest_global[fj.left_shoulder].x >
        s.rest_global[fj.right_shoulder].x);
}
