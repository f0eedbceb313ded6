#include "rigkit/animation.hpp"

#include <cmath>

#include "rigkit/kernels.hpp"

namespace rigkit {

FrameFeatures compute_frame_features(const Skeleton& s,
                                     const PoseTransforms& prev,
                                     const PoseTransforms& cur, double dt,
                                     const ContactConfig& contact) {
  const size_t n = s.joint_count();
  if (prev.global.size() != n || cur.global.size() != n) {
    throw SizeMismatchError("pose joint count does not match skeleton");
  }
  if (!(dt > 0.0)) {
    throw NonPositiveDtError("dt must be positive");
  }
  const int root = s.root();
  const FacingFrame frame = facing_frame_from_root(
      cur.global[root].rotation, cur.global[root].translation);
  const FacingFrame prev_frame = facing_frame_from_root(
      prev.global[root].rotation, prev.global[root].translation);

  FrameFeatures f;
  f.q.resize(n);
  f.p.resize(n);
  f.p_prev.resize(n);
  f.v.resize(n);
  f.c.resize(n);

  const double yaw = frame.yaw();
  const Mat3 unyaw = rotation_about_y(-yaw);
  const double height = skeleton_height(s);
  for (size_t j = 0; j < n; ++j) {
    const Mat3 local = static_cast<int>(j) == root
                           ? unyaw * cur.global[root].rotation
                           : cur.local_rotation[j];
    f.q[j] = encode_rotation6d(local);
    f.p[j] = frame.to_local(cur.global[j].translation);
    f.p_prev[j] = frame.to_local(prev.global[j].translation);
    f.v[j] = (f.p[j] - f.p_prev[j]) / dt;
    const double speed =
        norm(cur.global[j].translation - prev.global[j].translation) / dt;
    f.c[j] = (cur.global[j].translation.y < contact.height_fraction * height &&
              speed < contact.speed_threshold)
                 ? 1
                 : 0;
  }

  const Vec3 disp = frame.origin - prev_frame.origin;
  f.r.dx = dot(disp, prev_frame.lateral);
  f.r.dz = dot(disp, prev_frame.facing);
  f.r.dtheta = wrap_angle(yaw - prev_frame.yaw());
  f.r.h = cur.global[root].translation.y;
  return f;
}

TargetPose to_target_pose(const FrameFeatures& f) {
  return {f.q, f.r, f.c};
}

PoseTransforms reconstruct_pose(const Skeleton& s,
                                const RigidTransform& prev_root,
                                const TargetPose& target) {
  const size_t n = s.joint_count();
  if (target.q.size() != n) {
    throw SizeMismatchError("target pose joint count does not match skeleton");
  }
  const FacingFrame prev_frame =
      facing_frame_from_root(prev_root.rotation, prev_root.translation);
  const double yaw = prev_frame.yaw() + target.r.dtheta;
  const Vec3 origin = prev_frame.origin + prev_frame.lateral * target.r.dx +
                      prev_frame.facing * target.r.dz;

  std::vector<Mat3> locals(n);
  const int root = s.root();
  for (size_t j = 0; j < n; ++j) {
    locals[j] = decode_rotation6d(target.q[j]);
  }
  locals[root] = rotation_about_y(yaw) * locals[root];
  const Vec3 root_position{origin.x, target.r.h, origin.z};
  return forward_kinematics(s, locals, root_position - s.offsets[root]);
}

DeformedMesh apply_lbs(const Mesh& m, const DenseMatrix& weights,
                       const std::vector<RigidTransform>& transforms) {
  const size_t nv = m.vertices.size();
  const size_t nj = transforms.size();
  if (weights.rows != nv || weights.cols != nj) {
    throw ShapeMismatchError(
        "weights shape does not match vertices x joints: " +
        std::to_string(weights.rows) + "x" + std::to_string(weights.cols));
  }
  for (size_t i = 0; i < nv; ++i) {
    double sum = 0.0;
    for (size_t j = 0; j < nj; ++j) sum += weights(i, j);
    if (std::abs(sum - 1.0) > 1e-6) {
      throw NotStochasticError("weight row " + std::to_string(i) +
                               " sums to " + std::to_string(sum));
    }
  }

  std::vector<double> verts(nv * 3);
  for (size_t i = 0; i < nv; ++i) {
    verts[i * 3 + 0] = m.vertices[i].x;
    verts[i * 3 + 1] = m.vertices[i].y;
    verts[i * 3 + 2] = m.vertices[i].z;
  }
  std::vector<kernels::Affine3x4> affine(nj);
  for (size_t j = 0; j < nj; ++j) {
    const Mat3& r = transforms[j].rotation;
    const Vec3& t = transforms[j].translation;
    double* a = affine[j].m;
    a[0] = r(0, 0);
    a[1] = r(0, 1);
    a[2] = r(0, 2);
    a[3] = t.x;
    a[4] = r(1, 0);
    a[5] = r(1, 1);
    a[6] = r(1, 2);
    a[7] = t.y;
    a[8] = r(2, 0);
    a[9] = r(2, 1);
    a[10] = r(2, 2);
    a[11] = t.z;
  }
  std::vector<double> out(nv * 3);
  kernels::lbs_apply(verts.data(), nv, weights.data.data(), nj, affine.data(),
                     out.data());
  DeformedMesh deformed;
  deformed.vertices.resize(nv);
  for (size_t i = 0; i < nv; ++i) {
    deformed.vertices[i] = {out[i * 3 + 0], out[i * 3 + 1], out[i * 3 + 2]};
  }
  return deformed;
}

std::vector<DeformedMesh> deform_clip(const Mesh& m,
                                      const DenseMatrix& weights,
                                      const Skeleton& s,
                                      const std::vector<PoseTransforms>& clip) {
  const PoseTransforms rest = rest_pose(s);
  std::vector<DeformedMesh> frames;
  frames.reserve(clip.size());
  for (const PoseTransforms& pose : clip) {
    frames.push_back(apply_lbs(m, weights, skinning_transforms(rest, pose)));
  }
  return frames;
}

}  // namespace rigkit
