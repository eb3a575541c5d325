// Scalar reference kernels. Loops are written lane-by-lane so that the
// accumulation order matches the 8-lane SIMD variants exactly.

#include "effmap/simd.hpp"

namespace effmap::simd {
namespace {

constexpr std::size_t kLanes = 8;

inline double fold(const double (&acc)[kLanes]) {
  double s[4];
  for (int j = 0; j < 4; ++j) s[j] = acc[j] + acc[j + 4];
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double sum_scalar(const double* a, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l];
  double r = fold(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l] * b[i + l];
  double r = fold(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double dot3_scalar(const double* a, const double* b, const double* c, std::size_t n) {
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += (a[i + l] * b[i + l]) * c[i + l];
  double r = fold(acc);
  for (; i < n; ++i) r += (a[i] * b[i]) * c[i];
  return r;
}

// Complex kernels see the data as 2n doubles; 8 lanes hold 4 complex values.
double norm2_scalar(const double* z, std::size_t n) {
  const std::size_t m = 2 * n;
  double acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= m; i += kLanes)
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += z[i + l] * z[i + l];
  double r = fold(acc);
  for (; i < m; i += 2) {
    r += z[i] * z[i];
    r += z[i + 1] * z[i + 1];
  }
  return r;
}

void cdot_scalar(const double* a, const double* b, std::size_t n, double* re, double* im) {
  const std::size_t m = 2 * n;
  double p[kLanes] = {};
  double q[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= m; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      p[l] += a[i + l] * b[i + l];
      q[l] += a[i + l] * b[i + (l ^ 1U)];
    }
  }
  double ps[4];
  double qs[4];
  for (int j = 0; j < 4; ++j) {
    ps[j] = p[j] + p[j + 4];
    qs[j] = q[j] + q[j + 4];
  }
  double r = (ps[0] + ps[2]) - (ps[1] + ps[3]);
  double s = (qs[0] + qs[1]) + (qs[2] + qs[3]);
  for (; i < m; i += 2) {
    r += a[i] * b[i] - a[i + 1] * b[i + 1];
    s += a[i] * b[i + 1] + a[i + 1] * b[i];
  }
  *re = r;
  *im = s;
}

void re_conj_mul_scalar(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1];
}

void abs2_scalar(const double* a, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1];
}

void dde_combine_scalar(const double* f, const double* cross, const double* p, double c1,
                        double c2, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (c1 * f[i]) * cross[i] - (c2 * (f[i] * f[i])) * p[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, sum_scalar,   dot_scalar,          dot3_scalar,
                                 norm2_scalar, cdot_scalar, re_conj_mul_scalar, abs2_scalar,
                                 dde_combine_scalar};
  return table;
}

}  // namespace effmap::simd
