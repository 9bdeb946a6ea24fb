#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "backend.hpp"
#include "scalar_core.hpp"
#include "wire/kernels.hpp"

namespace wire::kern {
namespace {

// Training rebuilds multi-megabyte tapes every step; keep large freed blocks
// on the heap free list instead of returning them to the kernel, or every
// step pays the page-fault cost again.
//
// The wavelet envelopes also produce plenty of f32 subnormals (e^{-90} and
// below); without flush-to-zero every FMA touching them stalls for ~100
// cycles, so FTZ/DAZ is enabled process-wide. All backends see the same FP
// state, keeping the bit-exactness contract intact.
const bool g_env_tuned = [] {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 512 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 512 * 1024 * 1024);
#endif
#if defined(__x86_64__) || defined(__i386__)
  unsigned csr = __builtin_ia32_stmxcsr();
  __builtin_ia32_ldmxcsr(csr | 0x8040);  // FTZ | DAZ
#endif
  return true;
}();

bool cpu_has(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(WIRE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Avx512:
#if defined(WIRE_HAVE_AVX512) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return scalar_table();
    case Backend::Avx2:
#ifdef WIRE_HAVE_AVX2
      return avx2_table();
#else
      return nullptr;
#endif
    case Backend::Avx512:
#ifdef WIRE_HAVE_AVX512
      return avx512_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend pick_default() {
  if (const char* env = std::getenv("WIRE_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has(Backend::Avx2)) return Backend::Avx2;
    if (std::strcmp(env, "avx512") == 0 && cpu_has(Backend::Avx512)) return Backend::Avx512;
  }
  if (cpu_has(Backend::Avx512)) return Backend::Avx512;
  if (cpu_has(Backend::Avx2)) return Backend::Avx2;
  return Backend::Scalar;
}

Backend& current() {
  static Backend b = pick_default();
  return b;
}

}  // namespace

Backend active_backend() { return current(); }

bool backend_available(Backend b) { return cpu_has(b) && table_for(b) != nullptr; }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::runtime_error(std::string("kernel backend unavailable: ") + backend_name(b));
  current() = b;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Avx512: return "avx512";
  }
  return "?";
}

const KernelTable* active_table() { return table_for(current()); }

// ---- public forwarding API ----

// Long contractions run in k-chunks so the streamed operand stays cache
// resident. Chunking happens before dispatch, so every backend sees the same
// partial-sum order and results remain bit-identical across them.
template <class T, class Fn>
void matmul_chunked(const T* a, const T* b, T* c, int m, int k, int n, Accum acc,
                    Fn&& backend_mm) {
  constexpr int kChunk = sizeof(T) == 4 ? 512 : 256;
  if (k <= kChunk) {
    backend_mm(a, b, c, m, k, n, acc);
    return;
  }
  thread_local std::vector<T> apack;
  for (int k0 = 0; k0 < k; k0 += kChunk) {
    const int kc = k - k0 < kChunk ? k - k0 : kChunk;
    apack.resize(static_cast<std::size_t>(m) * kc);
    for (int i = 0; i < m; ++i)
      std::memcpy(apack.data() + static_cast<std::size_t>(i) * kc,
                  a + static_cast<std::size_t>(i) * k + k0, sizeof(T) * kc);
    Accum mode = k0 == 0 ? acc : (acc == Accum::Sub ? Accum::Sub : Accum::Add);
    backend_mm(apack.data(), b + static_cast<std::size_t>(k0) * n, c, m, kc, n, mode);
  }
}

void matmul(const double* a, const double* b, double* c, int m, int k, int n, Accum acc) {
  matmul_chunked(a, b, c, m, k, n, acc, active_table()->matmul_d);
}
void matmul(const float* a, const float* b, float* c, int m, int k, int n, Accum acc) {
  matmul_chunked(a, b, c, m, k, n, acc, active_table()->matmul_f);
}
void add(const double* x, const double* y, double* out, std::size_t n) {
  active_table()->add_d(x, y, out, n);
}
void add(const float* x, const float* y, float* out, std::size_t n) {
  active_table()->add_f(x, y, out, n);
}
void sub(const double* x, const double* y, double* out, std::size_t n) {
  active_table()->sub_d(x, y, out, n);
}
void sub(const float* x, const float* y, float* out, std::size_t n) {
  active_table()->sub_f(x, y, out, n);
}
void mul(const double* x, const double* y, double* out, std::size_t n) {
  active_table()->mul_d(x, y, out, n);
}
void mul(const float* x, const float* y, float* out, std::size_t n) {
  active_table()->mul_f(x, y, out, n);
}
void scale(const double* x, double a, double* out, std::size_t n) {
  active_table()->scale_d(x, a, out, n);
}
void scale(const float* x, float a, float* out, std::size_t n) {
  active_table()->scale_f(x, a, out, n);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
  active_table()->axpy_d(a, x, y, n);
}
void axpy(float a, const float* x, float* y, std::size_t n) {
  active_table()->axpy_f(a, x, y, n);
}
void madd(const double* x, const double* y, double* out, std::size_t n) {
  active_table()->madd_d(x, y, out, n);
}
void madd(const float* x, const float* y, float* out, std::size_t n) {
  active_table()->madd_f(x, y, out, n);
}
void msub(const double* x, const double* y, double* out, std::size_t n) {
  active_table()->msub_d(x, y, out, n);
}
void msub(const float* x, const float* y, float* out, std::size_t n) {
  active_table()->msub_f(x, y, out, n);
}
void vexp(const double* x, double* out, std::size_t n) { active_table()->vexp_d(x, out, n); }
void vexp(const float* x, float* out, std::size_t n) { active_table()->vexp_f(x, out, n); }
void vsincos(const double* x, double* s, double* c, std::size_t n) {
  active_table()->vsincos_d(x, s, c, n);
}
void vsincos(const float* x, float* s, float* c, std::size_t n) {
  active_table()->vsincos_f(x, s, c, n);
}
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double b1, double b2, double eps, double bc1, double bc2) {
  active_table()->adam_d(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2);
}
void adam_update(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
                 float b1, float b2, float eps, float bc1, float bc2) {
  active_table()->adam_f(p, g, m, v, n, lr, b1, b2, eps, bc1, bc2);
}

// ---- shared, non-dispatched helpers ----

namespace {
template <class T>
void transpose_impl(const T* src, T* dst, int rows, int cols) {
  constexpr int B = 48;
  for (int j0 = 0; j0 < cols; j0 += B) {
    int j1 = j0 + B < cols ? j0 + B : cols;
    for (int i = 0; i < rows; ++i) {
      const T* s = src + (std::size_t)i * cols + j0;
      T* dcol = dst + (std::size_t)j0 * rows + i;
      for (int j = 0; j < j1 - j0; ++j) dcol[(std::size_t)j * rows] = s[j];
    }
  }
}
}  // namespace

void transpose(const double* src, double* dst, int rows, int cols) {
  transpose_impl(src, dst, rows, cols);
}
void transpose(const float* src, float* dst, int rows, int cols) {
  transpose_impl(src, dst, rows, cols);
}

double reduce_sum(const double* x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}
double reduce_sum(const float* x, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}
double reduce_sumsq_diff(const double* x, const double* y, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}
double reduce_sumsq_diff(const float* x, const float* y, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (double)x[i] - (double)y[i];
    s += d * d;
  }
  return s;
}
bool all_finite(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}
bool all_finite(const float* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

}  // namespace wire::kern
