#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "rigkit/io.hpp"
#include "rigkit/kernels.hpp"
#include "rigkit/metrics.hpp"
#include "rigkit/solvers.hpp"

namespace rigkit {

std::vector<Vec3> joint_positions(const Skeleton& s) { return s.rest_global; }

std::vector<BoneSegment> bone_segments(const Skeleton& s) {
  std::vector<BoneSegment> bones;
  for (const auto& [p, c] : skeleton_bones(s)) {
    bones.push_back({s.rest_global[p], s.rest_global[c]});
  }
  return bones;
}

double cd_j2j(const std::vector<Vec3>& g_a, const std::vector<Vec3>& g_b) {
  return chamfer(g_a, g_b);
}

namespace {

std::vector<double> flatten_points(const std::vector<Vec3>& pts) {
  std::vector<double> flat(pts.size() * 3);
  for (size_t i = 0; i < pts.size(); ++i) {
    flat[i * 3 + 0] = pts[i].x;
    flat[i * 3 + 1] = pts[i].y;
    flat[i * 3 + 2] = pts[i].z;
  }
  return flat;
}

std::vector<double> flatten_segments(const std::vector<BoneSegment>& segs) {
  std::vector<double> flat(segs.size() * 6);
  for (size_t i = 0; i < segs.size(); ++i) {
    flat[i * 6 + 0] = segs[i].a.x;
    flat[i * 6 + 1] = segs[i].a.y;
    flat[i * 6 + 2] = segs[i].a.z;
    flat[i * 6 + 3] = segs[i].b.x;
    flat[i * 6 + 4] = segs[i].b.y;
    flat[i * 6 + 5] = segs[i].b.z;
  }
  return flat;
}

double mean_point_to_segments_sq(const std::vector<Vec3>& points,
                                 const std::vector<BoneSegment>& segments) {
  const auto p = flatten_points(points);
  const auto s = flatten_segments(segments);
  std::vector<double> mins(points.size());
  kernels::min_seg_dist_sq(p.data(), points.size(), s.data(), segments.size(),
                           mins.data());
  double total = 0.0;
  for (double d : mins) total += d;
  return total / static_cast<double>(points.size());
}

}  // namespace

double cd_j2b(const std::vector<Vec3>& joints_a,
              const std::vector<BoneSegment>& bones_a,
              const std::vector<Vec3>& joints_b,
              const std::vector<BoneSegment>& bones_b) {
  if (joints_a.empty() || joints_b.empty() || bones_a.empty() ||
      bones_b.empty()) {
    throw EmptySetError("cd_j2b requires non-empty joint and bone sets");
  }
  return mean_point_to_segments_sq(joints_a, bones_b) +
         mean_point_to_segments_sq(joints_b, bones_a);
}

double cd_b2b(const std::vector<BoneSegment>& bones_a,
              const std::vector<BoneSegment>& bones_b, int samples_per_bone) {
  if (bones_a.empty() || bones_b.empty()) {
    throw EmptySetError("cd_b2b requires non-empty bone sets");
  }
  if (samples_per_bone < 2) {
    throw InvalidConfigError("cd_b2b needs at least 2 samples per bone");
  }
  const auto sample = [samples_per_bone](const std::vector<BoneSegment>& bones) {
    std::vector<Vec3> points;
    points.reserve(bones.size() * static_cast<size_t>(samples_per_bone));
    for (const BoneSegment& bone : bones) {
      for (int k = 0; k < samples_per_bone; ++k) {
        const double t =
            static_cast<double>(k) / static_cast<double>(samples_per_bone - 1);
        points.push_back(bone.a + (bone.b - bone.a) * t);
      }
    }
    return points;
  };
  return chamfer(sample(bones_a), sample(bones_b));
}

double skinning_l1(const DenseMatrix& w_pred, const DenseMatrix& w_gt) {
  if (w_pred.rows != w_gt.rows || w_pred.cols != w_gt.cols) {
    throw ShapeMismatchError("weight matrices have different shapes");
  }
  if (w_pred.rows == 0) return 0.0;
  double total = 0.0;
  for (size_t r = 0; r < w_pred.rows; ++r) {
    for (size_t c = 0; c < w_pred.cols; ++c) {
      total += std::abs(w_pred(r, c) - w_gt(r, c));
    }
  }
  return total / static_cast<double>(w_pred.rows);
}

namespace {

double mean_unsquared_nearest(const std::vector<Vec3>& from,
                              const std::vector<Vec3>& to) {
  const auto a = flatten_points(from);
  const auto b = flatten_points(to);
  std::vector<double> mins(from.size());
  kernels::min_dist_sq(a.data(), from.size(), b.data(), to.size(),
                       mins.data());
  double sum = 0.0;
  for (double d : mins) sum += std::sqrt(d);
  return sum / static_cast<double>(from.size());
}

}  // namespace

double deformation_cd(const DeformedMesh& pred, const DeformedMesh& gt) {
  if (pred.vertices.empty() || gt.vertices.empty()) {
    throw EmptySetError("deformation_cd requires non-empty meshes");
  }
  return 0.5 * (mean_unsquared_nearest(pred.vertices, gt.vertices) +
                mean_unsquared_nearest(gt.vertices, pred.vertices));
}

DeformationErrors deformation_errors(const DeformedMesh& pred,
                                     const DeformedMesh& gt) {
  if (pred.vertices.empty() || gt.vertices.empty()) {
    throw EmptySetError("deformation_errors requires non-empty meshes");
  }
  if (pred.vertices.size() != gt.vertices.size()) {
    throw ShapeMismatchError("ADE/MDE require matching vertex counts");
  }
  DeformationErrors out;
  double total = 0.0;
  for (size_t i = 0; i < pred.vertices.size(); ++i) {
    const double d = norm(pred.vertices[i] - gt.vertices[i]);
    total += d;
    out.mde = std::max(out.mde, d);
  }
  out.ade = total / static_cast<double>(pred.vertices.size());
  out.cd = deformation_cd(pred, gt);
  return out;
}

double els(const DeformedMesh& pred, const DeformedMesh& gt,
           const std::vector<Edge>& edges, int* skipped_edges) {
  const int n = static_cast<int>(gt.vertices.size());
  if (pred.vertices.size() != gt.vertices.size()) {
    throw ShapeMismatchError("els requires matching vertex counts");
  }
  int skipped = 0;
  double total = 0.0;
  size_t used = 0;
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw IndexOutOfRangeError("edge references vertex out of range");
    }
    const double gt_len = norm(gt.vertices[i] - gt.vertices[j]);
    if (gt_len <= 0.0) {
      ++skipped;
      continue;
    }
    const double pred_len = norm(pred.vertices[i] - pred.vertices[j]);
    total += 1.0 - std::abs(pred_len / gt_len - 1.0);
    ++used;
  }
  if (skipped_edges) *skipped_edges = skipped;
  return used == 0 ? 1.0 : total / static_cast<double>(used);
}

std::string write_metric_report(const MetricReport& r) {
  std::ostringstream out;
  const auto emit = [&out](const std::string& key, double value,
                           bool scaled) {
    out << key << " " << format_double(value) << "\n";
    if (scaled) {
      out << key << "_x1000 " << format_double(value * 1000.0) << "\n";
    }
  };
  if (r.has_rigging) {
    emit("cd_j2j", r.cd_j2j, true);
    emit("cd_j2b", r.cd_j2b, true);
    emit("cd_b2b", r.cd_b2b, true);
  }
  if (r.has_skinning) {
    emit("skinning_l1", r.skinning_l1, false);
  }
  if (r.has_deformation) {
    emit("cd", r.cd, true);
    emit("ade", r.ade, true);
    emit("mde", r.mde, true);
    emit("els", r.els, false);
    out << "frames " << r.frames << "\n";
    out << "skipped_edges " << r.skipped_edges << "\n";
  }
  return out.str();
}

std::string format_metric_table(const MetricReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  const int w = 12;
  out << std::setw(w) << "CD-J2J" << std::setw(w) << "CD-J2B" << std::setw(w)
      << "CD-B2B" << std::setw(w) << "SkinL1" << std::setw(w) << "CD"
      << std::setw(w) << "ADE" << std::setw(w) << "MDE" << std::setw(w)
      << "ELS" << "\n";
  const auto cell = [&](double v, bool available, bool scale) {
    if (!available) {
      out << std::setw(w) << "-";
    } else {
      out << std::setw(w) << (scale ? v * 1000.0 : v);
    }
  };
  cell(r.cd_j2j, r.has_rigging, true);
  cell(r.cd_j2b, r.has_rigging, true);
  cell(r.cd_b2b, r.has_rigging, true);
  cell(r.skinning_l1, r.has_skinning, false);
  cell(r.cd, r.has_deformation, true);
  cell(r.ade, r.has_deformation, true);
  cell(r.mde, r.has_deformation, true);
  cell(r.els, r.has_deformation, false);
  out << "\n";
  return out.str();
}

}  // namespace rigkit
