// AVX2 variants. Vectorization is across output elements (4 vertices or 4
// candidate points per step); the per-element operation chain matches the
// scalar reference exactly (mul/add only, no FMA), so results are bitwise
// identical. This file is compiled with -mavx2 and must only be reached
// behind the runtime cpuid check in kernels_dispatch.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#include "rigkit/kernels.hpp"

namespace rigkit::kernels::detail {

namespace {

inline double reduce_min(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double best = lanes[0];
  best = lanes[1] < best ? lanes[1] : best;
  best = lanes[2] < best ? lanes[2] : best;
  best = lanes[3] < best ? lanes[3] : best;
  return best;
}

}  // namespace

void lbs_apply_avx2(const double* vertices, std::size_t vertex_count,
                    const double* weights, std::size_t joint_count,
                    const Affine3x4* transforms, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= vertex_count; i += 4) {
    __m256d acc[12];
    for (int k = 0; k < 12; ++k) {
      acc[k] = _mm256_setzero_pd();
    }
    for (std::size_t j = 0; j < joint_count; ++j) {
      const __m256d w = _mm256_set_pd(weights[(i + 3) * joint_count + j],
                                      weights[(i + 2) * joint_count + j],
                                      weights[(i + 1) * joint_count + j],
                                      weights[(i + 0) * joint_count + j]);
      const double* t = transforms[j].m;
      for (int k = 0; k < 12; ++k) {
        acc[k] = _mm256_add_pd(acc[k], _mm256_mul_pd(w, _mm256_set1_pd(t[k])));
      }
    }
    const __m256d x = _mm256_set_pd(vertices[(i + 3) * 3], vertices[(i + 2) * 3],
                                    vertices[(i + 1) * 3], vertices[(i + 0) * 3]);
    const __m256d y =
        _mm256_set_pd(vertices[(i + 3) * 3 + 1], vertices[(i + 2) * 3 + 1],
                      vertices[(i + 1) * 3 + 1], vertices[(i + 0) * 3 + 1]);
    const __m256d z =
        _mm256_set_pd(vertices[(i + 3) * 3 + 2], vertices[(i + 2) * 3 + 2],
                      vertices[(i + 1) * 3 + 2], vertices[(i + 0) * 3 + 2]);
    for (int row = 0; row < 3; ++row) {
      __m256d r = _mm256_add_pd(_mm256_mul_pd(acc[row * 4 + 0], x),
                                _mm256_mul_pd(acc[row * 4 + 1], y));
      r = _mm256_add_pd(r, _mm256_mul_pd(acc[row * 4 + 2], z));
      r = _mm256_add_pd(r, acc[row * 4 + 3]);
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, r);
      out[(i + 0) * 3 + row] = lanes[0];
      out[(i + 1) * 3 + row] = lanes[1];
      out[(i + 2) * 3 + row] = lanes[2];
      out[(i + 3) * 3 + row] = lanes[3];
    }
  }
  if (i < vertex_count) {
    lbs_apply_scalar(vertices + i * 3, vertex_count - i, weights + i * joint_count,
                     joint_count, transforms, out + i * 3);
  }
}

void min_dist_sq_avx2(const double* a, std::size_t a_count, const double* b,
                      std::size_t b_count, double* out) {
  for (std::size_t i = 0; i < a_count; ++i) {
    const __m256d ax = _mm256_set1_pd(a[i * 3 + 0]);
    const __m256d ay = _mm256_set1_pd(a[i * 3 + 1]);
    const __m256d az = _mm256_set1_pd(a[i * 3 + 2]);
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j + 4 <= b_count; j += 4) {
      const __m256d bx = _mm256_set_pd(b[(j + 3) * 3], b[(j + 2) * 3],
                                       b[(j + 1) * 3], b[(j + 0) * 3]);
      const __m256d by = _mm256_set_pd(b[(j + 3) * 3 + 1], b[(j + 2) * 3 + 1],
                                       b[(j + 1) * 3 + 1], b[(j + 0) * 3 + 1]);
      const __m256d bz = _mm256_set_pd(b[(j + 3) * 3 + 2], b[(j + 2) * 3 + 2],
                                       b[(j + 1) * 3 + 2], b[(j + 0) * 3 + 2]);
      const __m256d dx = _mm256_sub_pd(ax, bx);
      const __m256d dy = _mm256_sub_pd(ay, by);
      const __m256d dz = _mm256_sub_pd(az, bz);
      const __m256d d2 = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
          _mm256_mul_pd(dz, dz));
      vbest = _mm256_min_pd(vbest, d2);
    }
    double best = reduce_min(vbest);
    for (; j < b_count; ++j) {
      const double dx = a[i * 3 + 0] - b[j * 3 + 0];
      const double dy = a[i * 3 + 1] - b[j * 3 + 1];
      const double dz = a[i * 3 + 2] - b[j * 3 + 2];
      const double d2 = (dx * dx + dy * dy) + dz * dz;
      best = d2 < best ? d2 : best;
    }
    out[i] = best;
  }
}

void min_seg_dist_sq_avx2(const double* points, std::size_t point_count,
                          const double* segments, std::size_t segment_count,
                          double* out) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t i = 0; i < point_count; ++i) {
    const __m256d px = _mm256_set1_pd(points[i * 3 + 0]);
    const __m256d py = _mm256_set1_pd(points[i * 3 + 1]);
    const __m256d pz = _mm256_set1_pd(points[i * 3 + 2]);
    __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    std::size_t s = 0;
    for (; s + 4 <= segment_count; s += 4) {
      __m256d sa[3];
      __m256d sb[3];
      for (int c = 0; c < 3; ++c) {
        sa[c] = _mm256_set_pd(segments[(s + 3) * 6 + c], segments[(s + 2) * 6 + c],
                              segments[(s + 1) * 6 + c], segments[(s + 0) * 6 + c]);
        sb[c] = _mm256_set_pd(
            segments[(s + 3) * 6 + 3 + c], segments[(s + 2) * 6 + 3 + c],
            segments[(s + 1) * 6 + 3 + c], segments[(s + 0) * 6 + 3 + c]);
      }
      const __m256d abx = _mm256_sub_pd(sb[0], sa[0]);
      const __m256d aby = _mm256_sub_pd(sb[1], sa[1]);
      const __m256d abz = _mm256_sub_pd(sb[2], sa[2]);
      const __m256d apx = _mm256_sub_pd(px, sa[0]);
      const __m256d apy = _mm256_sub_pd(py, sa[1]);
      const __m256d apz = _mm256_sub_pd(pz, sa[2]);
      const __m256d den = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(abx, abx), _mm256_mul_pd(aby, aby)),
          _mm256_mul_pd(abz, abz));
      const __m256d num = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(apx, abx), _mm256_mul_pd(apy, aby)),
          _mm256_mul_pd(apz, abz));
      const __m256d den_pos = _mm256_cmp_pd(den, zero, _CMP_GT_OQ);
      __m256d t = _mm256_div_pd(num, den);
      t = _mm256_blendv_pd(zero, t, den_pos);
      t = _mm256_max_pd(t, zero);
      t = _mm256_min_pd(t, one);
      const __m256d dx = _mm256_sub_pd(apx, _mm256_mul_pd(t, abx));
      const __m256d dy = _mm256_sub_pd(apy, _mm256_mul_pd(t, aby));
      const __m256d dz = _mm256_sub_pd(apz, _mm256_mul_pd(t, abz));
      const __m256d d2 = _mm256_add_pd(
          _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
          _mm256_mul_pd(dz, dz));
      vbest = _mm256_min_pd(vbest, d2);
    }
    double best = reduce_min(vbest);
    if (s < segment_count) {
      double tail = 0.0;
      min_seg_dist_sq_scalar(points + i * 3, 1, segments + s * 6,
                             segment_count - s, &tail);
      best = tail < best ? tail : best;
    }
    out[i] = best;
  }
}

}  // namespace rigkit::kernels::detail

#endif  // x86_64
