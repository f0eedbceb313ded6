#pragma once

#include <string>
#include <vector>

#include "rigkit/mesh.hpp"
#include "rigkit/skeleton.hpp"

namespace rigkit {

struct BoneSegment {
  Vec3 a;
  Vec3 b;
};

std::vector<Vec3> joint_positions(const Skeleton& s);
std::vector<BoneSegment> bone_segments(const Skeleton& s);

// Chamfer distance over joint position sets (squared distances, sum of the
// two directional means).
double cd_j2j(const std::vector<Vec3>& g_a, const std::vector<Vec3>& g_b);

// Symmetrized joint-to-bone distance: mean squared distance from each side's
// joints to the other side's nearest bone segment, summed over both
// directions.
double cd_j2b(const std::vector<Vec3>& joints_a,
              const std::vector<BoneSegment>& bones_a,
              const std::vector<Vec3>& joints_b,
              const std::vector<BoneSegment>& bones_b);

// Chamfer between points sampled uniformly along the bones (64 samples per
// bone, endpoints included).
double cd_b2b(const std::vector<BoneSegment>& bones_a,
              const std::vector<BoneSegment>& bones_b,
              int samples_per_bone = 64);

// Mean over vertices of the L1 distance between weight rows.
double skinning_l1(const DenseMatrix& w_pred, const DenseMatrix& w_gt);

struct DeformationErrors {
  double cd = 0.0;   // unsquared chamfer, averaged over both directions
  double ade = 0.0;  // mean per-vertex error
  double mde = 0.0;  // max per-vertex error
};

// Unsquared nearest-distance chamfer, (d_ab + d_ba) / 2, so its units match
// ADE/MDE. Works on differing vertex counts.
double deformation_cd(const DeformedMesh& pred, const DeformedMesh& gt);

// All three deformation metrics; ADE/MDE need matching vertex counts
// (deformation_cd alone does not).
DeformationErrors deformation_errors(const DeformedMesh& pred,
                                     const DeformedMesh& gt);

// Edge Length Score: mean over edges of 1 - | |e_pred| / |e_gt| - 1 |.
// Equals 1 when every edge length matches; can go negative for badly
// stretched meshes. Zero-length ground-truth edges are skipped and counted.
double els(const DeformedMesh& pred, const DeformedMesh& gt,
           const std::vector<Edge>& edges, int* skipped_edges = nullptr);

// Full evaluation record. Chamfer-family and distance metrics are in
// length^2 / length units; the report also renders x1000 columns to match
// the usual table scaling.
struct MetricReport {
  double cd_j2j = 0.0;
  double cd_j2b = 0.0;
  double cd_b2b = 0.0;
  double skinning_l1 = 0.0;
  double cd = 0.0;
  double ade = 0.0;
  double mde = 0.0;
  double els = 0.0;
  bool has_rigging = false;
  bool has_skinning = false;
  bool has_deformation = false;
  int skipped_edges = 0;
  size_t frames = 0;
};

// Machine-readable key-value lines (raw and x1000 where applicable).
std::string write_metric_report(const MetricReport& r);

// Aligned single-row table of the x1000-scaled metrics.
std::string format_metric_table(const MetricReport& r);

}  // namespace rigkit
