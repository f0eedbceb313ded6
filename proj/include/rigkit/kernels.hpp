#pragma once

#include <cstddef>
#include <string>

namespace rigkit::kernels {

// Runtime-dispatched inner loops. Every kernel has a scalar reference
// implementation and an AVX2 variant; both execute identical IEEE operation
// chains per output element (no FMA, fixed accumulation order), so results
// are bitwise equal across backends. Equivalence tests assert exactly that.
enum class Backend { Scalar, Avx2 };

// Active backend. Defaults to the widest supported one; the RIGKIT_KERNELS
// environment variable ("scalar" or "avx2") overrides at process start.
Backend active_backend();
bool backend_supported(Backend backend);
void set_backend(Backend backend);
std::string backend_name(Backend backend);

// Row-major 3x4 affine transform (rotation block | translation column).
struct Affine3x4 {
  double m[12];
};

// Linear blend skinning: for each vertex i,
//   out_i = (sum_j weights[i,j] * transforms[j]) * vertices_i
// with j accumulated in ascending order. vertices/out are tightly packed
// xyz triples; weights is vertex_count x joint_count row-major.
void lbs_apply(const double* vertices, std::size_t vertex_count,
               const double* weights, std::size_t joint_count,
               const Affine3x4* transforms, double* out);

// out[i] = min_j |a_i - b_j|^2 over all b points. a is a_count xyz triples.
void min_dist_sq(const double* a, std::size_t a_count, const double* b,
                 std::size_t b_count, double* out);

// out[i] = min_s d^2(p_i, segment_s). Segments are packed as
// (ax, ay, az, bx, by, bz); degenerate segments act as points.
void min_seg_dist_sq(const double* points, std::size_t point_count,
                     const double* segments, std::size_t segment_count,
                     double* out);

namespace detail {
// Reference implementations, directly callable from equivalence tests.
void lbs_apply_scalar(const double* vertices, std::size_t vertex_count,
                      const double* weights, std::size_t joint_count,
                      const Affine3x4* transforms, double* out);
void min_dist_sq_scalar(const double* a, std::size_t a_count, const double* b,
                        std::size_t b_count, double* out);
void min_seg_dist_sq_scalar(const double* points, std::size_t point_count,
                            const double* segments,
                            std::size_t segment_count, double* out);

#if defined(__x86_64__) || defined(_M_X64)
void lbs_apply_avx2(const double* vertices, std::size_t vertex_count,
                    const double* weights, std::size_t joint_count,
                    const Affine3x4* transforms, double* out);
void min_dist_sq_avx2(const double* a, std::size_t a_count, const double* b,
                      std::size_t b_count, double* out);
void min_seg_dist_sq_avx2(const double* points, std::size_t point_count,
                          const double* segments, std::size_t segment_count,
                          double* out);
#endif
}  // namespace detail

}  // namespace rigkit::kernels
