// AVX-512 backend (F+DQ). Same bit-exactness contract as the other backends.
// Column tails are handled with masked loads/stores, row tails with a one-row
// variant of the same accumulation, so every output element sees the exact
// scalar operation sequence.

#ifdef WIRE_HAVE_AVX512

#include <immintrin.h>

#include "backend.hpp"
#include "scalar_core.hpp"

namespace wire::kern {
namespace {

using detail::matmul_scalar_cell;

// ---- matmul f64: 4-row x 16-col panels, explicit accumulators --------------

inline void store_acc_pd(double* dst, __m512d acc, __mmask8 mask, Accum mode) {
  switch (mode) {
    case Accum::Set:
      _mm512_mask_storeu_pd(dst, mask, acc);
      break;
    case Accum::Add:
      _mm512_mask_storeu_pd(dst, mask,
                            _mm512_add_pd(_mm512_maskz_loadu_pd(mask, dst), acc));
      break;
    case Accum::Sub:
      _mm512_mask_storeu_pd(dst, mask,
                            _mm512_sub_pd(_mm512_maskz_loadu_pd(mask, dst), acc));
      break;
  }
}

#define WIRE_MM_PANEL(VT, SUF, LOAD0, LOAD1)                         \
  VT a00 = _mm512_setzero_##SUF(), a01 = _mm512_setzero_##SUF();                     \
  VT a10 = _mm512_setzero_##SUF(), a11 = _mm512_setzero_##SUF();                     \
  VT a20 = _mm512_setzero_##SUF(), a21 = _mm512_setzero_##SUF();                     \
  VT a30 = _mm512_setzero_##SUF(), a31 = _mm512_setzero_##SUF();                     \
  for (int kk = 0; kk < k; ++kk) {                                                   \
    const auto* brow = b + (std::size_t)kk * n + j;                                  \
    VT b0 = LOAD0;                                                                   \
    VT b1 = LOAD1;                                                                   \
    VT w0 = _mm512_set1_##SUF(a[(std::size_t)(i + 0) * k + kk]);                     \
    VT w1 = _mm512_set1_##SUF(a[(std::size_t)(i + 1) * k + kk]);                     \
    VT w2 = _mm512_set1_##SUF(a[(std::size_t)(i + 2) * k + kk]);                     \
    VT w3 = _mm512_set1_##SUF(a[(std::size_t)(i + 3) * k + kk]);                     \
    a00 = _mm512_fmadd_##SUF(w0, b0, a00);                                           \
    a01 = _mm512_fmadd_##SUF(w0, b1, a01);                                           \
    a10 = _mm512_fmadd_##SUF(w1, b0, a10);                                           \
    a11 = _mm512_fmadd_##SUF(w1, b1, a11);                                           \
    a20 = _mm512_fmadd_##SUF(w2, b0, a20);                                           \
    a21 = _mm512_fmadd_##SUF(w2, b1, a21);                                           \
    a30 = _mm512_fmadd_##SUF(w3, b0, a30);                                           \
    a31 = _mm512_fmadd_##SUF(w3, b1, a31);                                           \
  }

void matmul_d(const double* a, const double* b, double* c, int m, int k, int n,
              Accum mode) {
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      WIRE_MM_PANEL(__m512d, pd, _mm512_loadu_pd(brow), _mm512_loadu_pd(brow + 8))
      store_acc_pd(c + (std::size_t)(i + 0) * n + j, a00, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 0) * n + j + 8, a01, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 1) * n + j, a10, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 1) * n + j + 8, a11, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 2) * n + j, a20, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 2) * n + j + 8, a21, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 3) * n + j, a30, 0xFF, mode);
      store_acc_pd(c + (std::size_t)(i + 3) * n + j + 8, a31, 0xFF, mode);
    }
    for (; i < m; ++i) {
      __m512d s0 = _mm512_setzero_pd(), s1 = _mm512_setzero_pd();
      for (int kk = 0; kk < k; ++kk) {
        const double* brow = b + (std::size_t)kk * n + j;
        __m512d w = _mm512_set1_pd(a[(std::size_t)i * k + kk]);
        s0 = _mm512_fmadd_pd(w, _mm512_loadu_pd(brow), s0);
        s1 = _mm512_fmadd_pd(w, _mm512_loadu_pd(brow + 8), s1);
      }
      store_acc_pd(c + (std::size_t)i * n + j, s0, 0xFF, mode);
      store_acc_pd(c + (std::size_t)i * n + j + 8, s1, 0xFF, mode);
    }
  }
  if (j < n) {
    int cols = n - j;
    __mmask8 m0 = cols >= 8 ? 0xFF : (__mmask8)((1u << cols) - 1);
    __mmask8 m1 = cols > 8 ? (__mmask8)((1u << (cols - 8)) - 1) : 0;
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      WIRE_MM_PANEL(__m512d, pd, _mm512_maskz_loadu_pd(m0, brow),
                    _mm512_maskz_loadu_pd(m1, brow + 8))
      store_acc_pd(c + (std::size_t)(i + 0) * n + j, a00, m0, mode);
      store_acc_pd(c + (std::size_t)(i + 1) * n + j, a10, m0, mode);
      store_acc_pd(c + (std::size_t)(i + 2) * n + j, a20, m0, mode);
      store_acc_pd(c + (std::size_t)(i + 3) * n + j, a30, m0, mode);
      if (m1) {
        store_acc_pd(c + (std::size_t)(i + 0) * n + j + 8, a01, m1, mode);
        store_acc_pd(c + (std::size_t)(i + 1) * n + j + 8, a11, m1, mode);
        store_acc_pd(c + (std::size_t)(i + 2) * n + j + 8, a21, m1, mode);
        store_acc_pd(c + (std::size_t)(i + 3) * n + j + 8, a31, m1, mode);
      }
    }
    for (; i < m; ++i) {
      __m512d s0 = _mm512_setzero_pd(), s1 = _mm512_setzero_pd();
      for (int kk = 0; kk < k; ++kk) {
        const double* brow = b + (std::size_t)kk * n + j;
        __m512d w = _mm512_set1_pd(a[(std::size_t)i * k + kk]);
        s0 = _mm512_fmadd_pd(w, _mm512_maskz_loadu_pd(m0, brow), s0);
        s1 = _mm512_fmadd_pd(w, _mm512_maskz_loadu_pd(m1, brow + 8), s1);
      }
      store_acc_pd(c + (std::size_t)i * n + j, s0, m0, mode);
      if (m1) store_acc_pd(c + (std::size_t)i * n + j + 8, s1, m1, mode);
    }
  }
}

// ---- matmul f32: 4-row x 32-col panels ---------------------------------------

inline void store_acc_ps(float* dst, __m512 acc, __mmask16 mask, Accum mode) {
  switch (mode) {
    case Accum::Set:
      _mm512_mask_storeu_ps(dst, mask, acc);
      break;
    case Accum::Add:
      _mm512_mask_storeu_ps(dst, mask,
                            _mm512_add_ps(_mm512_maskz_loadu_ps(mask, dst), acc));
      break;
    case Accum::Sub:
      _mm512_mask_storeu_ps(dst, mask,
                            _mm512_sub_ps(_mm512_maskz_loadu_ps(mask, dst), acc));
      break;
  }
}

void matmul_f(const float* a, const float* b, float* c, int m, int k, int n, Accum mode) {
  int j = 0;
  for (; j + 32 <= n; j += 32) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      WIRE_MM_PANEL(__m512, ps, _mm512_loadu_ps(brow), _mm512_loadu_ps(brow + 16))
      store_acc_ps(c + (std::size_t)(i + 0) * n + j, a00, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 0) * n + j + 16, a01, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 1) * n + j, a10, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 1) * n + j + 16, a11, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 2) * n + j, a20, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 2) * n + j + 16, a21, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 3) * n + j, a30, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)(i + 3) * n + j + 16, a31, 0xFFFF, mode);
    }
    for (; i < m; ++i) {
      __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
      for (int kk = 0; kk < k; ++kk) {
        const float* brow = b + (std::size_t)kk * n + j;
        __m512 w = _mm512_set1_ps(a[(std::size_t)i * k + kk]);
        s0 = _mm512_fmadd_ps(w, _mm512_loadu_ps(brow), s0);
        s1 = _mm512_fmadd_ps(w, _mm512_loadu_ps(brow + 16), s1);
      }
      store_acc_ps(c + (std::size_t)i * n + j, s0, 0xFFFF, mode);
      store_acc_ps(c + (std::size_t)i * n + j + 16, s1, 0xFFFF, mode);
    }
  }
  if (j < n) {
    int cols = n - j;
    __mmask16 m0 = cols >= 16 ? 0xFFFF : (__mmask16)((1u << cols) - 1);
    __mmask16 m1 = cols > 16 ? (__mmask16)((1u << (cols - 16)) - 1) : 0;
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      WIRE_MM_PANEL(__m512, ps, _mm512_maskz_loadu_ps(m0, brow),
                    _mm512_maskz_loadu_ps(m1, brow + 16))
      store_acc_ps(c + (std::size_t)(i + 0) * n + j, a00, m0, mode);
      store_acc_ps(c + (std::size_t)(i + 1) * n + j, a10, m0, mode);
      store_acc_ps(c + (std::size_t)(i + 2) * n + j, a20, m0, mode);
      store_acc_ps(c + (std::size_t)(i + 3) * n + j, a30, m0, mode);
      if (m1) {
        store_acc_ps(c + (std::size_t)(i + 0) * n + j + 16, a01, m1, mode);
        store_acc_ps(c + (std::size_t)(i + 1) * n + j + 16, a11, m1, mode);
        store_acc_ps(c + (std::size_t)(i + 2) * n + j + 16, a21, m1, mode);
        store_acc_ps(c + (std::size_t)(i + 3) * n + j + 16, a31, m1, mode);
      }
    }
    for (; i < m; ++i) {
      __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
      for (int kk = 0; kk < k; ++kk) {
        const float* brow = b + (std::size_t)kk * n + j;
        __m512 w = _mm512_set1_ps(a[(std::size_t)i * k + kk]);
        s0 = _mm512_fmadd_ps(w, _mm512_maskz_loadu_ps(m0, brow), s0);
        s1 = _mm512_fmadd_ps(w, _mm512_maskz_loadu_ps(m1, brow + 16), s1);
      }
      store_acc_ps(c + (std::size_t)i * n + j, s0, m0, mode);
      if (m1) store_acc_ps(c + (std::size_t)i * n + j + 16, s1, m1, mode);
    }
  }
}

#undef WIRE_MM_PANEL

// ---- elementwise ------------------------------------------------------------

#define WIRE_EW_LOOP_PD(expr_vec, expr_scalar)                       \
  std::size_t i = 0;                                                 \
  for (; i + 8 <= n; i += 8) {                                       \
    expr_vec;                                                        \
  }                                                                  \
  if (i < n) {                                                       \
    __mmask8 t = (__mmask8)((1u << (n - i)) - 1);                    \
    expr_scalar;                                                     \
  }

void add_d(const double* x, const double* y, double* o, std::size_t n) {
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_add_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i))),
      _mm512_mask_storeu_pd(o + i, t,
                            _mm512_add_pd(_mm512_maskz_loadu_pd(t, x + i),
                                          _mm512_maskz_loadu_pd(t, y + i))))
}
void sub_d(const double* x, const double* y, double* o, std::size_t n) {
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_sub_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i))),
      _mm512_mask_storeu_pd(o + i, t,
                            _mm512_sub_pd(_mm512_maskz_loadu_pd(t, x + i),
                                          _mm512_maskz_loadu_pd(t, y + i))))
}
void mul_d(const double* x, const double* y, double* o, std::size_t n) {
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_mul_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i))),
      _mm512_mask_storeu_pd(o + i, t,
                            _mm512_mul_pd(_mm512_maskz_loadu_pd(t, x + i),
                                          _mm512_maskz_loadu_pd(t, y + i))))
}
void scale_d(const double* x, double a, double* o, std::size_t n) {
  __m512d va = _mm512_set1_pd(a);
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_mul_pd(va, _mm512_loadu_pd(x + i))),
      _mm512_mask_storeu_pd(o + i, t, _mm512_mul_pd(va, _mm512_maskz_loadu_pd(t, x + i))))
}
void axpy_d(double a, const double* x, double* y, std::size_t n) {
  __m512d va = _mm512_set1_pd(a);
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(y + i, _mm512_fmadd_pd(va, _mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i))),
      _mm512_mask_storeu_pd(y + i, t,
                            _mm512_fmadd_pd(va, _mm512_maskz_loadu_pd(t, x + i),
                                            _mm512_maskz_loadu_pd(t, y + i))))
}

#define WIRE_EW_LOOP_PS(expr_vec, expr_scalar)                       \
  std::size_t i = 0;                                                 \
  for (; i + 16 <= n; i += 16) {                                     \
    expr_vec;                                                        \
  }                                                                  \
  if (i < n) {                                                       \
    __mmask16 t = (__mmask16)((1u << (n - i)) - 1);                  \
    expr_scalar;                                                     \
  }

void add_f(const float* x, const float* y, float* o, std::size_t n) {
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_add_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i))),
      _mm512_mask_storeu_ps(o + i, t,
                            _mm512_add_ps(_mm512_maskz_loadu_ps(t, x + i),
                                          _mm512_maskz_loadu_ps(t, y + i))))
}
void sub_f(const float* x, const float* y, float* o, std::size_t n) {
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_sub_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i))),
      _mm512_mask_storeu_ps(o + i, t,
                            _mm512_sub_ps(_mm512_maskz_loadu_ps(t, x + i),
                                          _mm512_maskz_loadu_ps(t, y + i))))
}
void mul_f(const float* x, const float* y, float* o, std::size_t n) {
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_mul_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i))),
      _mm512_mask_storeu_ps(o + i, t,
                            _mm512_mul_ps(_mm512_maskz_loadu_ps(t, x + i),
                                          _mm512_maskz_loadu_ps(t, y + i))))
}
void scale_f(const float* x, float a, float* o, std::size_t n) {
  __m512 va = _mm512_set1_ps(a);
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_mul_ps(va, _mm512_loadu_ps(x + i))),
      _mm512_mask_storeu_ps(o + i, t, _mm512_mul_ps(va, _mm512_maskz_loadu_ps(t, x + i))))
}
void axpy_f(float a, const float* x, float* y, std::size_t n) {
  __m512 va = _mm512_set1_ps(a);
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(y + i, _mm512_fmadd_ps(va, _mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i))),
      _mm512_mask_storeu_ps(y + i, t,
                            _mm512_fmadd_ps(va, _mm512_maskz_loadu_ps(t, x + i),
                                            _mm512_maskz_loadu_ps(t, y + i))))
}

void madd_d(const double* x, const double* y, double* o, std::size_t n) {
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_fmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i),
                                              _mm512_loadu_pd(o + i))),
      _mm512_mask_storeu_pd(o + i, t,
                            _mm512_fmadd_pd(_mm512_maskz_loadu_pd(t, x + i),
                                            _mm512_maskz_loadu_pd(t, y + i),
                                            _mm512_maskz_loadu_pd(t, o + i))))
}
void msub_d(const double* x, const double* y, double* o, std::size_t n) {
  WIRE_EW_LOOP_PD(
      _mm512_storeu_pd(o + i, _mm512_fnmadd_pd(_mm512_loadu_pd(x + i), _mm512_loadu_pd(y + i),
                                               _mm512_loadu_pd(o + i))),
      _mm512_mask_storeu_pd(o + i, t,
                            _mm512_fnmadd_pd(_mm512_maskz_loadu_pd(t, x + i),
                                             _mm512_maskz_loadu_pd(t, y + i),
                                             _mm512_maskz_loadu_pd(t, o + i))))
}
void madd_f(const float* x, const float* y, float* o, std::size_t n) {
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_fmadd_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i),
                                              _mm512_loadu_ps(o + i))),
      _mm512_mask_storeu_ps(o + i, t,
                            _mm512_fmadd_ps(_mm512_maskz_loadu_ps(t, x + i),
                                            _mm512_maskz_loadu_ps(t, y + i),
                                            _mm512_maskz_loadu_ps(t, o + i))))
}
void msub_f(const float* x, const float* y, float* o, std::size_t n) {
  WIRE_EW_LOOP_PS(
      _mm512_storeu_ps(o + i, _mm512_fnmadd_ps(_mm512_loadu_ps(x + i), _mm512_loadu_ps(y + i),
                                               _mm512_loadu_ps(o + i))),
      _mm512_mask_storeu_ps(o + i, t,
                            _mm512_fnmadd_ps(_mm512_maskz_loadu_ps(t, x + i),
                                             _mm512_maskz_loadu_ps(t, y + i),
                                             _mm512_maskz_loadu_ps(t, o + i))))
}

// ---- exp --------------------------------------------------------------------

inline __m512d exp_pd(__m512d x) {
  __m512d k = _mm512_roundscale_pd(_mm512_mul_pd(x, _mm512_set1_pd(detail::kLog2E)),
                                   _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m512d r = _mm512_fnmadd_pd(k, _mm512_set1_pd(detail::kLn2Hi), x);
  r = _mm512_fnmadd_pd(k, _mm512_set1_pd(detail::kLn2Lo), r);

  __m512d p = _mm512_set1_pd(detail::kExpC[13]);
  for (int i = 12; i >= 0; --i)
    p = _mm512_fmadd_pd(p, r, _mm512_set1_pd(detail::kExpC[i]));

  __m256i ki = _mm512_cvtpd_epi32(k);
  __m256i k1 = _mm256_srai_epi32(ki, 1);
  __m256i k2 = _mm256_sub_epi32(ki, k1);
  const __m512i bias = _mm512_set1_epi64(1023);
  __m512d s1 = _mm512_castsi512_pd(
      _mm512_slli_epi64(_mm512_add_epi64(_mm512_cvtepi32_epi64(k1), bias), 52));
  __m512d s2 = _mm512_castsi512_pd(
      _mm512_slli_epi64(_mm512_add_epi64(_mm512_cvtepi32_epi64(k2), bias), 52));
  __m512d res = _mm512_mul_pd(_mm512_mul_pd(p, s1), s2);

  __mmask8 under = _mm512_cmp_pd_mask(x, _mm512_set1_pd(detail::kExpUnderflow), _CMP_LT_OQ);
  __mmask8 over = _mm512_cmp_pd_mask(x, _mm512_set1_pd(detail::kExpOverflow), _CMP_GT_OQ);
  __mmask8 nan = _mm512_cmp_pd_mask(x, x, _CMP_UNORD_Q);
  res = _mm512_mask_blend_pd(under, res, _mm512_setzero_pd());
  res = _mm512_mask_blend_pd(over, res, _mm512_set1_pd(HUGE_VAL));
  res = _mm512_mask_blend_pd(nan, res, x);
  return res;
}

void vexp_d(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm512_storeu_pd(out + i, exp_pd(_mm512_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = detail::exp_core(x[i]);
}
void vexp_f(const float* x, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m512 v = _mm512_loadu_ps(x + i);
    __m512d lo = _mm512_cvtps_pd(_mm512_castps512_ps256(v));
    __m512d hi = _mm512_cvtps_pd(_mm512_extractf32x8_ps(v, 1));
    __m256 rlo = _mm512_cvtpd_ps(exp_pd(lo));
    __m256 rhi = _mm512_cvtpd_ps(exp_pd(hi));
    _mm512_storeu_ps(out + i,
                     _mm512_insertf32x8(_mm512_castps256_ps512(rlo), rhi, 1));
  }
  for (; i < n; ++i)
    out[i] = static_cast<float>(detail::exp_core(static_cast<double>(x[i])));
}

// ---- sincos -------------------------------------------------------------------

inline void sincos_pd(__m512d x, __m512d* out_s, __m512d* out_c) {
  __m512d k = _mm512_roundscale_pd(_mm512_mul_pd(x, _mm512_set1_pd(detail::kTwoOverPi)),
                                   _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m512d r = _mm512_fnmadd_pd(k, _mm512_set1_pd(detail::kPio2_1), x);
  r = _mm512_fnmadd_pd(k, _mm512_set1_pd(detail::kPio2_2), r);
  r = _mm512_fnmadd_pd(k, _mm512_set1_pd(detail::kPio2_3), r);
  __m512d z = _mm512_mul_pd(r, r);

  __m512d ps = _mm512_set1_pd(detail::kSinC[5]);
  for (int i = 4; i >= 0; --i)
    ps = _mm512_fmadd_pd(ps, z, _mm512_set1_pd(detail::kSinC[i]));
  __m512d sin_r = _mm512_fmadd_pd(_mm512_mul_pd(r, z), ps, r);

  __m512d pc = _mm512_set1_pd(detail::kCosC[5]);
  for (int i = 4; i >= 0; --i)
    pc = _mm512_fmadd_pd(pc, z, _mm512_set1_pd(detail::kCosC[i]));
  __m512d t = _mm512_sub_pd(_mm512_set1_pd(1.0), _mm512_mul_pd(_mm512_set1_pd(0.5), z));
  __m512d cos_r = _mm512_fmadd_pd(_mm512_mul_pd(z, z), pc, t);

  const __m512i sign = _mm512_set1_epi64(0x8000000000000000ull);
  __m512d nsin = _mm512_castsi512_pd(_mm512_xor_epi64(_mm512_castpd_si512(sin_r), sign));
  __m512d ncos = _mm512_castsi512_pd(_mm512_xor_epi64(_mm512_castpd_si512(cos_r), sign));

  __m512i q = _mm512_and_epi64(_mm512_cvtepi32_epi64(_mm512_cvtpd_epi32(k)),
                               _mm512_set1_epi64(3));
  __mmask8 m1 = _mm512_cmpeq_epi64_mask(q, _mm512_set1_epi64(1));
  __mmask8 m2 = _mm512_cmpeq_epi64_mask(q, _mm512_set1_epi64(2));
  __mmask8 m3 = _mm512_cmpeq_epi64_mask(q, _mm512_set1_epi64(3));

  __m512d s = sin_r, c = cos_r;
  s = _mm512_mask_blend_pd(m1, s, cos_r);
  c = _mm512_mask_blend_pd(m1, c, nsin);
  s = _mm512_mask_blend_pd(m2, s, nsin);
  c = _mm512_mask_blend_pd(m2, c, ncos);
  s = _mm512_mask_blend_pd(m3, s, ncos);
  c = _mm512_mask_blend_pd(m3, c, sin_r);

  __mmask8 nan = _mm512_cmp_pd_mask(x, x, _CMP_UNORD_Q);
  *out_s = _mm512_mask_blend_pd(nan, s, x);
  *out_c = _mm512_mask_blend_pd(nan, c, x);
}

void vsincos_d(const double* x, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m512d vs, vc;
    sincos_pd(_mm512_loadu_pd(x + i), &vs, &vc);
    _mm512_storeu_pd(s + i, vs);
    _mm512_storeu_pd(c + i, vc);
  }
  for (; i < n; ++i) detail::sincos_core(x[i], s + i, c + i);
}
void vsincos_f(const float* x, float* s, float* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m512 v = _mm512_loadu_ps(x + i);
    __m512d lo = _mm512_cvtps_pd(_mm512_castps512_ps256(v));
    __m512d hi = _mm512_cvtps_pd(_mm512_extractf32x8_ps(v, 1));
    __m512d slo, clo, shi, chi;
    sincos_pd(lo, &slo, &clo);
    sincos_pd(hi, &shi, &chi);
    _mm512_storeu_ps(
        s + i, _mm512_insertf32x8(_mm512_castps256_ps512(_mm512_cvtpd_ps(slo)),
                                  _mm512_cvtpd_ps(shi), 1));
    _mm512_storeu_ps(
        c + i, _mm512_insertf32x8(_mm512_castps256_ps512(_mm512_cvtpd_ps(clo)),
                                  _mm512_cvtpd_ps(chi), 1));
  }
  for (; i < n; ++i) {
    double sd, cd;
    detail::sincos_core(static_cast<double>(x[i]), &sd, &cd);
    s[i] = static_cast<float>(sd);
    c[i] = static_cast<float>(cd);
  }
}

// ---- adam ---------------------------------------------------------------------

void adam_d(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
            double b1, double b2, double eps, double bc1, double bc2) {
  const __m512d vb1 = _mm512_set1_pd(b1), vb2 = _mm512_set1_pd(b2);
  const __m512d vomb1 = _mm512_set1_pd(1.0 - b1), vomb2 = _mm512_set1_pd(1.0 - b2);
  const __m512d veps = _mm512_set1_pd(eps), vbc1 = _mm512_set1_pd(bc1);
  const __m512d vbc2 = _mm512_set1_pd(bc2), vlr = _mm512_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m512d gv = _mm512_loadu_pd(g + i);
    __m512d t1 = _mm512_mul_pd(vomb1, gv);
    __m512d mv = _mm512_fmadd_pd(vb1, _mm512_loadu_pd(m + i), t1);
    __m512d gg = _mm512_mul_pd(gv, gv);
    __m512d t2 = _mm512_mul_pd(vomb2, gg);
    __m512d vv = _mm512_fmadd_pd(vb2, _mm512_loadu_pd(v + i), t2);
    _mm512_storeu_pd(m + i, mv);
    _mm512_storeu_pd(v + i, vv);
    __m512d mh = _mm512_mul_pd(mv, vbc1);
    __m512d vh = _mm512_mul_pd(vv, vbc2);
    __m512d den = _mm512_add_pd(_mm512_sqrt_pd(vh), veps);
    __m512d q = _mm512_div_pd(mh, den);
    _mm512_storeu_pd(p + i, _mm512_fnmadd_pd(vlr, q, _mm512_loadu_pd(p + i)));
  }
  for (; i < n; ++i) detail::adam_scalar(p, g, m, v, i, lr, b1, b2, eps, bc1, bc2);
}

void adam_f(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
            float b1, float b2, float eps, float bc1, float bc2) {
  const __m512 vb1 = _mm512_set1_ps(b1), vb2 = _mm512_set1_ps(b2);
  const __m512 vomb1 = _mm512_set1_ps(1.0f - b1), vomb2 = _mm512_set1_ps(1.0f - b2);
  const __m512 veps = _mm512_set1_ps(eps), vbc1 = _mm512_set1_ps(bc1);
  const __m512 vbc2 = _mm512_set1_ps(bc2), vlr = _mm512_set1_ps(lr);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    __m512 gv = _mm512_loadu_ps(g + i);
    __m512 t1 = _mm512_mul_ps(vomb1, gv);
    __m512 mv = _mm512_fmadd_ps(vb1, _mm512_loadu_ps(m + i), t1);
    __m512 gg = _mm512_mul_ps(gv, gv);
    __m512 t2 = _mm512_mul_ps(vomb2, gg);
    __m512 vv = _mm512_fmadd_ps(vb2, _mm512_loadu_ps(v + i), t2);
    _mm512_storeu_ps(m + i, mv);
    _mm512_storeu_ps(v + i, vv);
    __m512 mh = _mm512_mul_ps(mv, vbc1);
    __m512 vh = _mm512_mul_ps(vv, vbc2);
    __m512 den = _mm512_add_ps(_mm512_sqrt_ps(vh), veps);
    __m512 q = _mm512_div_ps(mh, den);
    _mm512_storeu_ps(p + i, _mm512_fnmadd_ps(vlr, q, _mm512_loadu_ps(p + i)));
  }
  for (; i < n; ++i) detail::adam_scalar(p, g, m, v, i, lr, b1, b2, eps, bc1, bc2);
}

const KernelTable kAvx512Table = {
    "avx512",
    &matmul_d, &matmul_f,
    &add_d,    &add_f,
    &sub_d,    &sub_f,
    &mul_d,    &mul_f,
    &scale_d,  &scale_f,
    &axpy_d,   &axpy_f,
    &madd_d,   &madd_f,
    &msub_d,   &msub_f,
    &vexp_d,   &vexp_f,
    &vsincos_d, &vsincos_f,
    &adam_d,   &adam_f,
};

}  // namespace

const KernelTable* avx512_table() { return &kAvx512Table; }

}  // namespace wire::kern

#endif  // WIRE_HAVE_AVX512
