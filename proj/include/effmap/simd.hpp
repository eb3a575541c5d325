#pragma once
// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every reduction accumulates into 8 double lanes (two 256-bit vectors on
// AVX2, four 128-bit vectors on NEON) and folds them in one fixed order:
//   s[j] = lane[j] + lane[j + 4]   (j = 0..3)
//   r    = (s[0] + s[1]) + (s[2] + s[3])
// followed by the tail elements in index order. The scalar kernels replay
// exactly this order, so every ISA returns bitwise-identical results.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace effmap::simd {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2, Neon };

/// Raw kernels for one instruction set. Pointers may alias only where the
/// output is written elementwise from the same index.
struct KernelTable {
  Isa isa;
  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  // Interleaved complex inputs, n complex elements.
  double (*norm2)(const double* z, std::size_t n);
  void (*cdot)(const double* a, const double* b, std::size_t n, double* re, double* im);
  // out[i] = Re[a_i conj(b_i)]
  void (*re_conj_mul)(const double* a, const double* b, std::size_t n, double* out);
  // out[i] = |a_i|^2
  void (*abs2)(const double* a, std::size_t n, double* out);
  // out[i] = c1 * f_i * cross_i - c2 * (f_i * f_i) * p_i
  void (*dde_combine)(const double* f, const double* cross, const double* p, double c1,
                      double c2, std::size_t n, double* out);
};

const KernelTable& scalar_kernels();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_kernels();
#endif
#if defined(__aarch64__)
const KernelTable& neon_kernels();
#endif

bool isa_supported(Isa isa);
std::string_view isa_name(Isa isa);
/// Parses "scalar", "avx2" or "neon"; throws PreconditionError otherwise.
Isa parse_isa(std::string_view name);

/// Kernels for a specific ISA; throws PreconditionError when unsupported.
const KernelTable& kernels_for(Isa isa);

/// The active table: best supported ISA unless overridden by set_isa() or
/// the EFFMAP_ISA environment variable.
const KernelTable& kernels();
Isa active_isa();
void set_isa(Isa isa);

// Chunked, optionally threaded front ends over the active kernels. The
// chunk partition is fixed, so results do not depend on the thread count.
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c);
double norm2(std::span<const cplx> z);
cplx cdot(std::span<const cplx> a, std::span<const cplx> b);
void re_conj_mul(std::span<const cplx> a, std::span<const cplx> b, std::span<double> out);
void abs2(std::span<const cplx> a, std::span<double> out);
void dde_combine(std::span<const double> f, std::span<const double> cross,
                 std::span<const double> p, double c1, double c2, std::span<double> out);

inline constexpr std::size_t kReduceChunk = 8192;

}  // namespace effmap::simd
