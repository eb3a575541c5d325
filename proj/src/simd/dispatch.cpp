#include <atomic>
#include <cstdlib>
#include <string>
#include <vector>

#include "effmap/errors.hpp"
#include "effmap/parallel.hpp"
#include "effmap/simd.hpp"

namespace effmap::simd {
namespace {

Isa detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
#if defined(__aarch64__)
  return Isa::Neon;
#endif
  return Isa::Scalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("EFFMAP_ISA")) {
    const Isa requested = parse_isa(env);
    if (isa_supported(requested)) return requested;
  }
  return detect_best();
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> table{&kernels_for(initial_isa())};
  return table;
}

// Reductions run over fixed chunks; per-chunk partials are folded in chunk
// order, so the thread count never changes the result.
template <class ChunkFn>
double chunked_reduce(std::size_t n, ChunkFn&& chunk) {
  const std::size_t n_chunks = (n + kReduceChunk - 1) / kReduceChunk;
  if (n_chunks <= 1) return n == 0 ? 0.0 : chunk(0, n);
  std::vector<double> partial(n_chunks);
  parallel::for_each_task(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * kReduceChunk;
    const std::size_t len = std::min(kReduceChunk, n - begin);
    partial[c] = chunk(begin, len);
  });
  double r = 0.0;
  for (double p : partial) r += p;
  return r;
}

template <class ChunkFn>
void chunked_map(std::size_t n, ChunkFn&& chunk) {
  const std::size_t n_chunks = (n + kReduceChunk - 1) / kReduceChunk;
  if (n_chunks <= 1) {
    if (n > 0) chunk(0, n);
    return;
  }
  parallel::for_each_task(n_chunks, [&](std::size_t c) {
    const std::size_t begin = c * kReduceChunk;
    chunk(begin, std::min(kReduceChunk, n - begin));
  });
}

void require_same(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("kernel operands differ in length: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

const double* raw(std::span<const cplx> z) { return reinterpret_cast<const double*>(z.data()); }

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  throw PreconditionError("unknown instruction set '" + std::string(name) + "'");
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw PreconditionError("instruction set " + std::string(isa_name(isa)) +
                            " is not supported on this machine");
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2:
      return avx2_kernels();
#endif
#if defined(__aarch64__)
    case Isa::Neon:
      return neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable& kernels() { return *active_table().load(); }
Isa active_isa() { return kernels().isa; }
void set_isa(Isa isa) { active_table().store(&kernels_for(isa)); }

double sum(std::span<const double> a) {
  const KernelTable& k = kernels();
  return chunked_reduce(a.size(),
                        [&](std::size_t b, std::size_t len) { return k.sum(a.data() + b, len); });
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size());
  const KernelTable& k = kernels();
  return chunked_reduce(a.size(), [&](std::size_t o, std::size_t len) {
    return k.dot(a.data() + o, b.data() + o, len);
  });
}

double dot3(std::span<const double> a, std::span<const double> b, std::span<const double> c) {
  require_same(a.size(), b.size());
  require_same(a.size(), c.size());
  const KernelTable& k = kernels();
  return chunked_reduce(a.size(), [&](std::size_t o, std::size_t len) {
    return k.dot3(a.data() + o, b.data() + o, c.data() + o, len);
  });
}

double norm2(std::span<const cplx> z) {
  const KernelTable& k = kernels();
  return chunked_reduce(
      z.size(), [&](std::size_t o, std::size_t len) { return k.norm2(raw(z) + 2 * o, len); });
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  require_same(a.size(), b.size());
  const KernelTable& k = kernels();
  double im_total = 0.0;
  const std::size_t n = a.size();
  // Two passes over the same fixed partition: real parts, then imaginary.
  const std::size_t n_chunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> re(n_chunks), im(n_chunks);
  auto chunk = [&](std::size_t c) {
    const std::size_t o = c * kReduceChunk;
    k.cdot(raw(a) + 2 * o, raw(b) + 2 * o, std::min(kReduceChunk, n - o), &re[c], &im[c]);
  };
  if (n_chunks > 1) {
    parallel::for_each_task(n_chunks, chunk);
  } else if (n_chunks == 1) {
    chunk(0);
  }
  double re_total = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    re_total += re[c];
    im_total += im[c];
  }
  return {re_total, im_total};
}

void re_conj_mul(std::span<const cplx> a, std::span<const cplx> b, std::span<double> out) {
  require_same(a.size(), b.size());
  require_same(a.size(), out.size());
  const KernelTable& k = kernels();
  chunked_map(a.size(), [&](std::size_t o, std::size_t len) {
    k.re_conj_mul(raw(a) + 2 * o, raw(b) + 2 * o, len, out.data() + o);
  });
}

void abs2(std::span<const cplx> a, std::span<double> out) {
  require_same(a.size(), out.size());
  const KernelTable& k = kernels();
  chunked_map(a.size(),
              [&](std::size_t o, std::size_t len) { k.abs2(raw(a) + 2 * o, len, out.data() + o); });
}

void dde_combine(std::span<const double> f, std::span<const double> cross,
                 std::span<const double> p, double c1, double c2, std::span<double> out) {
  require_same(f.size(), cross.size());
  require_same(f.size(), p.size());
  require_same(f.size(), out.size());
  const KernelTable& k = kernels();
  chunked_map(f.size(), [&](std::size_t o, std::size_t len) {
    k.dde_combine(f.data() + o, cross.data() + o, p.data() + o, c1, c2, len, out.data() + o);
  });
}

}  // namespace effmap::simd
