// AVX2 kernels (compiled with -mavx2, no FMA). Two 256-bit accumulators
// give the 8-lane layout shared with the scalar reference.

#include <immintrin.h>

#include "effmap/simd.hpp"

namespace effmap::simd {
namespace {

inline double fold(__m256d v0, __m256d v1) {
  alignas(32) double s[4];
  _mm256_store_pd(s, _mm256_add_pd(v0, v1));
  return (s[0] + s[1]) + (s[2] + s[3]);
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  double r = fold(acc0, acc1);
  for (; i < n; ++i) r += a[i];
  return r;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double r = fold(acc0, acc1);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d ab0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d ab1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(ab0, _mm256_loadu_pd(c + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(ab1, _mm256_loadu_pd(c + i + 4)));
  }
  double r = fold(acc0, acc1);
  for (; i < n; ++i) r += (a[i] * b[i]) * c[i];
  return r;
}

double norm2_avx2(const double* z, std::size_t n) {
  const std::size_t m = 2 * n;
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d z0 = _mm256_loadu_pd(z + i);
    const __m256d z1 = _mm256_loadu_pd(z + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(z0, z0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(z1, z1));
  }
  double r = fold(acc0, acc1);
  for (; i < m; i += 2) {
    r += z[i] * z[i];
    r += z[i + 1] * z[i + 1];
  }
  return r;
}

void cdot_avx2(const double* a, const double* b, std::size_t n, double* re, double* im) {
  const std::size_t m = 2 * n;
  __m256d p0 = _mm256_setzero_pd();
  __m256d p1 = _mm256_setzero_pd();
  __m256d q0 = _mm256_setzero_pd();
  __m256d q1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    const __m256d a0 = _mm256_loadu_pd(a + i);
    const __m256d a1 = _mm256_loadu_pd(a + i + 4);
    const __m256d b0 = _mm256_loadu_pd(b + i);
    const __m256d b1 = _mm256_loadu_pd(b + i + 4);
    p0 = _mm256_add_pd(p0, _mm256_mul_pd(a0, b0));
    p1 = _mm256_add_pd(p1, _mm256_mul_pd(a1, b1));
    q0 = _mm256_add_pd(q0, _mm256_mul_pd(a0, _mm256_permute_pd(b0, 0b0101)));
    q1 = _mm256_add_pd(q1, _mm256_mul_pd(a1, _mm256_permute_pd(b1, 0b0101)));
  }
  alignas(32) double ps[4];
  alignas(32) double qs[4];
  _mm256_store_pd(ps, _mm256_add_pd(p0, p1));
  _mm256_store_pd(qs, _mm256_add_pd(q0, q1));
  double r = (ps[0] + ps[2]) - (ps[1] + ps[3]);
  double s = (qs[0] + qs[1]) + (qs[2] + qs[3]);
  for (; i < m; i += 2) {
    r += a[i] * b[i] - a[i + 1] * b[i + 1];
    s += a[i] * b[i + 1] + a[i + 1] * b[i];
  }
  *re = r;
  *im = s;
}

void re_conj_mul_avx2(const double* a, const double* b, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + 2 * i), _mm256_loadu_pd(b + 2 * i));
    // [r0 i0 r1 i1] -> [r0+i0, r1+i1]
    const __m256d h = _mm256_hadd_pd(prod, prod);
    out[i] = _mm256_cvtsd_f64(h);
    out[i + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(h, 1));
  }
  for (; i < n; ++i) out[i] = a[2 * i] * b[2 * i] + a[2 * i + 1] * b[2 * i + 1];
}

void abs2_avx2(const double* a, std::size_t n, double* out) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d v = _mm256_loadu_pd(a + 2 * i);
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v, v), _mm256_mul_pd(v, v));
    out[i] = _mm256_cvtsd_f64(h);
    out[i + 1] = _mm_cvtsd_f64(_mm256_extractf128_pd(h, 1));
  }
  for (; i < n; ++i) out[i] = a[2 * i] * a[2 * i] + a[2 * i + 1] * a[2 * i + 1];
}

void dde_combine_avx2(const double* f, const double* cross, const double* p, double c1,
                      double c2, std::size_t n, double* out) {
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vf = _mm256_loadu_pd(f + i);
    const __m256d gain = _mm256_mul_pd(_mm256_mul_pd(vc1, vf), _mm256_loadu_pd(cross + i));
    const __m256d loss =
        _mm256_mul_pd(_mm256_mul_pd(vc2, _mm256_mul_pd(vf, vf)), _mm256_loadu_pd(p + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(gain, loss));
  }
  for (; i < n; ++i) out[i] = (c1 * f[i]) * cross[i] - (c2 * (f[i] * f[i])) * p[i];
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, sum_avx2,   dot_avx2,          dot3_avx2,
                                 norm2_avx2, cdot_avx2, re_conj_mul_avx2, abs2_avx2,
                                 dde_combine_avx2};
  return table;
}

}  // namespace effmap::simd
