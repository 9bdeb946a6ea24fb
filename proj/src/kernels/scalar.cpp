// Scalar reference backend. Every SIMD backend must reproduce these results
// bit-for-bit.

#include <cmath>

#include "backend.hpp"
#include "scalar_core.hpp"

namespace wire::kern {
namespace {

template <class T>
void matmul_impl(const T* a, const T* b, T* c, int m, int k, int n, Accum acc) {
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) detail::matmul_scalar_cell(a, b, c, k, n, i, j, acc);
}

template <class T>
void add_impl(const T* x, const T* y, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + y[i];
}
template <class T>
void sub_impl(const T* x, const T* y, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - y[i];
}
template <class T>
void mul_impl(const T* x, const T* y, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}
template <class T>
void scale_impl(const T* x, T a, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i];
}
template <class T>
void axpy_impl(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}
template <class T>
void madd_impl(const T* x, const T* y, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(x[i], y[i], out[i]);
}
template <class T>
void msub_impl(const T* x, const T* y, T* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(-x[i], y[i], out[i]);
}

void vexp_d(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = detail::exp_core(x[i]);
}
void vexp_f(const float* x, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<float>(detail::exp_core(static_cast<double>(x[i])));
}
void vsincos_d(const double* x, double* s, double* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) detail::sincos_core(x[i], s + i, c + i);
}
void vsincos_f(const float* x, float* s, float* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double sd, cd;
    detail::sincos_core(static_cast<double>(x[i]), &sd, &cd);
    s[i] = static_cast<float>(sd);
    c[i] = static_cast<float>(cd);
  }
}

template <class T>
void adam_impl(T* p, const T* g, T* m, T* v, std::size_t n, T lr, T b1, T b2, T eps,
               T bc1, T bc2) {
  for (std::size_t i = 0; i < n; ++i)
    detail::adam_scalar(p, g, m, v, i, lr, b1, b2, eps, bc1, bc2);
}

const KernelTable kScalarTable = {
    "scalar",
    &matmul_impl<double>, &matmul_impl<float>,
    &add_impl<double>,    &add_impl<float>,
    &sub_impl<double>,    &sub_impl<float>,
    &mul_impl<double>,    &mul_impl<float>,
    &scale_impl<double>,  &scale_impl<float>,
    &axpy_impl<double>,   &axpy_impl<float>,
    &madd_impl<double>,   &madd_impl<float>,
    &msub_impl<double>,   &msub_impl<float>,
    &vexp_d,              &vexp_f,
    &vsincos_d,           &vsincos_f,
    &adam_impl<double>,   &adam_impl<float>,
};

}  // namespace

const KernelTable* scalar_table() { return &kScalarTable; }

}  // namespace wire::kern
