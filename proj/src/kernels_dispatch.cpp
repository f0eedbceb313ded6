#include "rigkit/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "rigkit/errors.hpp"

namespace rigkit::kernels {

namespace {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("RIGKIT_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) {
      return Backend::Scalar;
    }
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) {
      return Backend::Avx2;
    }
  }
  return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

Backend& backend_state() {
  static Backend backend = detect_backend();
  return backend;
}

}  // namespace

Backend active_backend() { return backend_state(); }

bool backend_supported(Backend backend) {
  return backend == Backend::Scalar || avx2_supported();
}

void set_backend(Backend backend) {
  if (!backend_supported(backend)) {
    throw InvalidConfigError("kernel backend not supported on this host: " +
                             backend_name(backend));
  }
  backend_state() = backend;
}

std::string backend_name(Backend backend) {
  return backend == Backend::Scalar ? "scalar" : "avx2";
}

void lbs_apply(const double* vertices, std::size_t vertex_count,
               const double* weights, std::size_t joint_count,
               const Affine3x4* transforms, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::Avx2) {
    detail::lbs_apply_avx2(vertices, vertex_count, weights, joint_count,
                           transforms, out);
    return;
  }
#endif
  detail::lbs_apply_scalar(vertices, vertex_count, weights, joint_count,
                           transforms, out);
}

void min_dist_sq(const double* a, std::size_t a_count, const double* b,
                 std::size_t b_count, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::Avx2) {
    detail::min_dist_sq_avx2(a, a_count, b, b_count, out);
    return;
  }
#endif
  detail::min_dist_sq_scalar(a, a_count, b, b_count, out);
}

void min_seg_dist_sq(const double* points, std::size_t point_count,
                     const double* segments, std::size_t segment_count,
                     double* out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_backend() == Backend::Avx2) {
    detail::min_seg_dist_sq_avx2(points, point_count, segments, segment_count,
                                 out);
    return;
  }
#endif
  detail::min_seg_dist_sq_scalar(points, point_count, segments, segment_count,
                                 out);
}

}  // namespace rigkit::kernels
