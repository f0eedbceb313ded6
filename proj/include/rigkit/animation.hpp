#pragma once

#include "rigkit/facing.hpp"
#include "rigkit/mesh.hpp"
#include "rigkit/rotation.hpp"
#include "rigkit/skeleton.hpp"

namespace rigkit {

// Root movement between consecutive frames: planar displacement (dx along
// the previous frame's lateral axis, dz along its facing axis), yaw change
// dtheta, and the root height h above ground.
struct RootDelta {
  double dx = 0.0;
  double dz = 0.0;
  double dtheta = 0.0;
  double h = 0.0;
};

struct ContactConfig {
  double height_fraction = 0.05;   // of skeleton height
  double speed_threshold = 0.15;   // length units per second
};

// Per-frame skeletal dynamics. All positions are expressed in the current
// frame's facing frame (derived from the root transform: yaw + ground
// projection, which makes the representation exactly invertible). p_prev
// holds the previous frame's positions in the *current* facing frame, so v
// has true world-speed magnitude and captures locomotion. The root entry of
// q is the root rotation relative to the facing frame (yaw-free by
// construction).
struct FrameFeatures {
  std::vector<Rotation6D> q;
  std::vector<Vec3> p;
  std::vector<Vec3> p_prev;
  std::vector<Vec3> v;
  RootDelta r;
  std::vector<int> c;  // 0/1 ground contact per joint
};

// Pose generation target: rotations, root movement, contacts. Joint
// positions are omitted; forward kinematics recovers them.
struct TargetPose {
  std::vector<Rotation6D> q;
  RootDelta r;
  std::vector<int> c;
};

FrameFeatures compute_frame_features(const Skeleton& s,
                                     const PoseTransforms& prev,
                                     const PoseTransforms& cur, double dt,
                                     const ContactConfig& contact = {});

TargetPose to_target_pose(const FrameFeatures& f);

// Integrates (dx, dz, dtheta) in the facing frame of prev_root (typically
// the previous reconstructed pose's root global transform), sets the root
// height to h, and solves FK over the decoded rotations.
// compute_frame_features of the result recovers (q, r) exactly because the
// facing frame is a function of the root transform alone.
PoseTransforms reconstruct_pose(const Skeleton& s,
                                const RigidTransform& prev_root,
                                const TargetPose& target);

// Linear blend skinning: each vertex moves by the weight-blended sum of
// joint transforms, joints accumulated in ascending order. Weight rows must
// be stochastic within 1e-6.
DeformedMesh apply_lbs(const Mesh& m, const DenseMatrix& weights,
                       const std::vector<RigidTransform>& transforms);

// Per-frame skinning transforms against the rest pose followed by LBS.
std::vector<DeformedMesh> deform_clip(const Mesh& m,
                                      const DenseMatrix& weights,
                                      const Skeleton& s,
                                      const std::vector<PoseTransforms>& clip);

}  // namespace rigkit
