#include "rigkit/kernels.hpp"

#include <limits>

namespace rigkit::kernels::detail {

void lbs_apply_scalar(const double* vertices, std::size_t vertex_count,
                      const double* weights, std::size_t joint_count,
                      const Affine3x4* transforms, double* out) {
  for (std::size_t i = 0; i < vertex_count; ++i) {
    double acc[12] = {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
    const double* wrow = weights + i * joint_count;
    for (std::size_t j = 0; j < joint_count; ++j) {
      const double w = wrow[j];
      const double* t = transforms[j].m;
      for (int k = 0; k < 12; ++k) {
        acc[k] += w * t[k];
      }
    }
    const double x = vertices[i * 3 + 0];
    const double y = vertices[i * 3 + 1];
    const double z = vertices[i * 3 + 2];
    out[i * 3 + 0] = ((acc[0] * x + acc[1] * y) + acc[2] * z) + acc[3];
    out[i * 3 + 1] = ((acc[4] * x + acc[5] * y) + acc[6] * z) + acc[7];
    out[i * 3 + 2] = ((acc[8] * x + acc[9] * y) + acc[10] * z) + acc[11];
  }
}

void min_dist_sq_scalar(const double* a, std::size_t a_count, const double* b,
                        std::size_t b_count, double* out) {
  for (std::size_t i = 0; i < a_count; ++i) {
    const double ax = a[i * 3 + 0];
    const double ay = a[i * 3 + 1];
    const double az = a[i * 3 + 2];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b_count; ++j) {
      const double dx = ax - b[j * 3 + 0];
      const double dy = ay - b[j * 3 + 1];
      const double dz = az - b[j * 3 + 2];
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void min_seg_dist_sq_scalar(const double* points, std::size_t point_count,
                            const double* segments,
                            std::size_t segment_count, double* out) {
  for (std::size_t i = 0; i < point_count; ++i) {
    const double px = points[i * 3 + 0];
    const double py = points[i * 3 + 1];
    const double pz = points[i * 3 + 2];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < segment_count; ++s) {
      const double* seg = segments + s * 6;
      const double abx = seg[3] - seg[0];
      const double aby = seg[4] - seg[1];
      const double abz = seg[5] - seg[2];
      const double apx = px - seg[0];
      const double apy = py - seg[1];
      const double apz = pz - seg[2];
      const double den = (abx * abx + aby * aby) + abz * abz;
      const double num = (apx * abx + apy * aby) + apz * abz;
      double t = den > 0.0 ? num / den : 0.0;
      t = t > 0.0 ? t : 0.0;
      t = t < 1.0 ? t : 1.0;
      const double dx = apx - t * abx;
      const double dy = apy - t * aby;
      const double dz = apz - t * abz;
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

}  // namespace rigkit::kernels::detail
