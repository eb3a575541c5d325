// NEON kernels for aarch64. Four float64x2 accumulators hold lanes
// {0,1} {2,3} {4,5} {6,7} of the shared 8-lane layout.

#include <arm_neon.h>

#include "effmap/simd.hpp"

namespace effmap::simd {
namespace {

inline double fold(float64x2_t v0, float64x2_t v1, float64x2_t v2, float64x2_t v3) {
  const float64x2_t lo = vaddq_f64(v0, v2);  // s0 s1
  const float64x2_t hi = vaddq_f64(v1, v3);  // s2 s3
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
         (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t v0 = vdupq_n_f64(0.0), v1 = v0, v2 = v0, v3 = v0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    v0 = vaddq_f64(v0, vld1q_f64(a + i));
    v1 = vaddq_f64(v1, vld1q_f64(a + i + 2));
    v2 = vaddq_f64(v2, vld1q_f64(a + i + 4));
    v3 = vaddq_f64(v3, vld1q_f64(a + i + 6));
  }
  double r = fold(v0, v1, v2, v3);
  for (; i < n; ++i) r += a[i];
  return r;
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t v0 = vdupq_n_f64(0.0), v1 = v0, v2 = v0, v3 = v0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    v0 = vaddq_f64(v0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    v1 = vaddq_f64(v1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    v2 = vaddq_f64(v2, vmulq_f64(vld1q_f64(a + i + 4), vld1q_f64(b + i + 4)));
    v3 = vaddq_f64(v3, vmulq_f64(vld1q_f64(a + i + 6), vld1q_f64(b + i + 6)));
  }
  double r = fold(v0, v1, v2, v3);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double dot3_neon(const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t v[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    for (int k = 0; k < 4; ++k) {
      const std::size_t o = i + 2 * static_cast<std::size_t>(k);
      const float64x2_t ab = vmulq_f64(vld1q_f64(a + o), vld1q_f64(b + o));
      v[k] = vaddq_f64(v[k], vmulq_f64(ab, vld1q_f64(c + o)));
    }
  }
  double r = fold(v[0], v[1], v[2], v[3]);
  for (; i < n; ++i) r += (a[i] * b[i]) * c[i];
  return r;
}

double norm2_neon(const double* z, std::size_t n) {
  const std::size_t m = 2 * n;
  float64x2_t v[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    for (int k = 0; k < 4; ++k) {
      const float64x2_t x = vld1q_f64(z + i + 2 * static_cast<std::size_t>(k));
      v[k] = vaddq_f64(v[k], vmulq_f64(x, x));
    }
  }
  double r = fold(v[0], v[1], v[2], v[3]);
  for (; i < m; i += 2) {
    r += z[i] * z[i];
    r += z[i + 1] * z[i + 1];
  }
  return r;
}

void cdot_neon(const double* a, const double* b, std::size_t n, double* re, double* im) {
  const std::size_t m = 2 * n;
  float64x2_t p[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  float64x2_t q[4] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    for (int k = 0; k < 4; ++k) {
      const std::size_t o = i + 2 * static_cast<std::size_t>(k);
      const float64x2_t va = vld1q_f64(a + o);
      const float64x2_t vb = vld1q_f64(b + o);
      p[k] = vaddq_f64(p[k], vmulq_f64(va, vb));
      q[k] = vaddq_f64(q[k], vmulq_f64(va, vextq_f64(vb, vb, 1)));
    }
  }
  // Lane j of the 8-lane layout lives in register j / 2.
  const float64x2_t plo = vaddq_f64(p[0], p[2]);  // ps0 ps1
  const float64x2_t phi = vaddq_f64(p[1], p[3]);  // ps2 ps3
  const float64x2_t qlo = vaddq_f64(q[0], q[2]);
  const float64x2_t qhi = vaddq_f64(q[1], q[3]);
  double r = (vgetq_lane_f64(plo, 0) + vgetq_lane_f64(phi, 0)) -
             (vgetq_lane_f64(plo, 1) + vgetq_lane_f64(phi, 1));
  double s = (vgetq_lane_f64(qlo, 0) + vgetq_lane_f64(qlo, 1)) +
             (vgetq_lane_f64(qhi, 0) + vgetq_lane_f64(qhi, 1));
  for (; i < m; i += 2) {
    r += a[i] * b[i] - a[i + 1] * b[i + 1];
    s += a[i] * b[i + 1] + a[i + 1] * b[i];
  }
  *re = r;
  *im = s;
}

void re_conj_mul_neon(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t prod = vmulq_f64(vld1q_f64(a + 2 * i), vld1q_f64(b + 2 * i));
    out[i] = vgetq_lane_f64(prod, 0) + vgetq_lane_f64(prod, 1);
  }
}

void abs2_neon(const double* a, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t v = vld1q_f64(a + 2 * i);
    const float64x2_t sq = vmulq_f64(v, v);
    out[i] = vgetq_lane_f64(sq, 0) + vgetq_lane_f64(sq, 1);
  }
}

void dde_combine_neon(const double* f, const double* cross, const double* p, double c1,
                      double c2, std::size_t n, double* out) {
  const float64x2_t vc1 = vdupq_n_f64(c1);
  const float64x2_t vc2 = vdupq_n_f64(c2);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t vf = vld1q_f64(f + i);
    const float64x2_t gain = vmulq_f64(vmulq_f64(vc1, vf), vld1q_f64(cross + i));
    const float64x2_t loss = vmulq_f64(vmulq_f64(vc2, vmulq_f64(vf, vf)), vld1q_f64(p + i));
    vst1q_f64(out + i, vsubq_f64(gain, loss));
  }
  for (; i < n; ++i) out[i] = (c1 * f[i]) * cross[i] - (c2 * (f[i] * f[i])) * p[i];
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Isa::Neon, sum_neon,   dot_neon,          dot3_neon,
                                 norm2_neon, cdot_neon, re_conj_mul_neon, abs2_neon,
                                 dde_combine_neon};
  return table;
}

}  // namespace effmap::simd
