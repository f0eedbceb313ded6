#pragma once

#include <string>
#include <vector>

#include "rigkit/mesh.hpp"
#include "rigkit/skeleton.hpp"

namespace rigkit {

// ---------------------------------------------------------------------------
// BVH
// ---------------------------------------------------------------------------

enum class BvhChannel {
  Xposition,
  Yposition,
  Zposition,
  Xrotation,
  Yrotation,
  Zrotation,
};

bool is_rotation_channel(BvhChannel c);

struct BvhDocument {
  Skeleton skeleton;
  std::vector<std::vector<BvhChannel>> channel_layout;  // per joint
  std::vector<std::vector<double>> frames;  // degrees for rotation channels
  double frame_time = 1.0 / 30.0;

  // Frame columns are laid out joint by joint in skeleton array order, which
  // parse_bvh and poses_to_bvh both keep equal to the file's depth-first
  // hierarchy order.
  size_t total_channels() const;
};

// BVH 1.0 text (HIERARCHY + MOTION). End Site nodes become leaf joints named
// "<parent>_end" with no channels. Rotations stay in file channel order, in
// degrees, until converted to poses.
BvhDocument parse_bvh(const std::string& text);
std::string write_bvh(const BvhDocument& doc);

// Channel values -> pose. Rotations are intrinsic Euler in the file's channel
// order; root position channels add to the root offset. Position channels on
// non-root joints are preserved in the document but ignored here.
PoseTransforms bvh_frame_to_pose(const BvhDocument& doc, size_t frame);
std::vector<PoseTransforms> bvh_to_poses(const BvhDocument& doc);

// Document with the canonical channel layout (root: Xposition Yposition
// Zposition Zrotation Xrotation Yrotation; other joints: Zrotation Xrotation
// Yrotation). Leaf joints named "*_end" are emitted as End Sites.
BvhDocument poses_to_bvh(const Skeleton& s,
                         const std::vector<PoseTransforms>& poses,
                         double frame_time);

// ---------------------------------------------------------------------------
// OBJ
// ---------------------------------------------------------------------------

// v/f records; polygons are fan-triangulated, 1-based and negative indices
// resolved, non-geometry records ignored.
Mesh parse_obj(const std::string& text,
               std::vector<std::string>* warnings = nullptr);
std::string write_obj(const std::vector<Vec3>& vertices,
                      const std::vector<std::array<int, 3>>& faces);

// ---------------------------------------------------------------------------
// Skinning weight matrices
// ---------------------------------------------------------------------------

struct WeightsFile {
  std::vector<std::string> joint_names;
  DenseMatrix weights;
};

// Text format: one header line of joint names, then one row of N_J floats per
// vertex. Rows are renormalized on read when their sum drifts by at most
// 1e-4, rejected otherwise.
WeightsFile read_weights(const std::string& text);
std::string write_weights(const DenseMatrix& weights,
                          const std::vector<std::string>& joint_names);

// ---------------------------------------------------------------------------
// Skeleton JSON and descriptor tables
// ---------------------------------------------------------------------------

// Schema: {"names": [...], "parents": [...], "offsets": [[x,y,z], ...],
// "rho": [...]} with rho optional (recomputed when absent).
Skeleton read_skeleton_json(const std::string& text);
std::string write_skeleton_json(const Skeleton& s);

// Headered float matrix: first line "<rows> <cols>", one row per line.
DescriptorField read_descriptors(const std::string& text);
std::string write_descriptors(const DescriptorField& d);

// ---------------------------------------------------------------------------
// Files and number formatting
// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace rigkit
