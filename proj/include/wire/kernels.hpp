#pragma once

// Low-level numeric kernels with a scalar reference implementation and SIMD
// variants (AVX2, AVX-512) selected at runtime.
//
// Equivalence contract: every dispatched kernel produces bit-identical results
// on every backend. The SIMD paths replay the scalar operation sequence
// (including explicit fused multiply-adds) lane by lane, so switching backends
// never changes a single output bit. exp/sincos are our own polynomial
// implementations for the same reason; they agree with libm to a few ulp but
// are not required to match it bitwise. Valid argument range for sincos is
// |x| < 2^31 (quadrant index must fit in int32).

#include <cstddef>
#include <cstdint>

namespace wire::kern {

enum class Backend { Scalar, Avx2, Avx512 };

enum class Accum { Set, Add, Sub };

// Backend selection. The default is the best supported one; the environment
// variable WIRE_KERNELS=scalar|avx2|avx512 overrides it at startup.
Backend active_backend();
bool backend_available(Backend b);
void set_backend(Backend b);  // throws std::runtime_error if unavailable
const char* backend_name(Backend b);

// c[m x n] (op)= a[m x k] * b[k x n], all row-major contiguous.
void matmul(const double* a, const double* b, double* c, int m, int k, int n, Accum acc);
void matmul(const float* a, const float* b, float* c, int m, int k, int n, Accum acc);

// Elementwise arrays of length n.
void add(const double* x, const double* y, double* out, std::size_t n);
void add(const float* x, const float* y, float* out, std::size_t n);
void sub(const double* x, const double* y, double* out, std::size_t n);
void sub(const float* x, const float* y, float* out, std::size_t n);
void mul(const double* x, const double* y, double* out, std::size_t n);
void mul(const float* x, const float* y, float* out, std::size_t n);
void scale(const double* x, double a, double* out, std::size_t n);
void scale(const float* x, float a, float* out, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);  // y += a*x
void axpy(float a, const float* x, float* y, std::size_t n);
void madd(const double* x, const double* y, double* out, std::size_t n);  // out += x*y
void madd(const float* x, const float* y, float* out, std::size_t n);
void msub(const double* x, const double* y, double* out, std::size_t n);  // out -= x*y
void msub(const float* x, const float* y, float* out, std::size_t n);

// out = exp(x); float inputs are evaluated through the double pipeline and
// rounded once at the end, so f32 results are backend-independent too.
void vexp(const double* x, double* out, std::size_t n);
void vexp(const float* x, float* out, std::size_t n);
void vsincos(const double* x, double* s, double* c, std::size_t n);
void vsincos(const float* x, float* s, float* c, std::size_t n);

// Fused Adam update on one parameter array. bc1/bc2 are the precomputed
// 1/(1-beta^t) bias corrections.
void adam_update(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2);
void adam_update(float* p, const float* g, float* m, float* v, std::size_t n,
                 float lr, float beta1, float beta2, float eps, float bc1, float bc2);

// Non-dispatched helpers (memory-bound or order-sensitive; one shared
// implementation keeps reductions deterministic everywhere).
void transpose(const double* src, double* dst, int rows, int cols);
void transpose(const float* src, float* dst, int rows, int cols);
double reduce_sum(const double* x, std::size_t n);
double reduce_sum(const float* x, std::size_t n);
double reduce_sumsq_diff(const double* x, const double* y, std::size_t n);
double reduce_sumsq_diff(const float* x, const float* y, std::size_t n);
bool all_finite(const double* x, std::size_t n);
bool all_finite(const float* x, std::size_t n);

}  // namespace wire::kern
