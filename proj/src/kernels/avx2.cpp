// AVX2+FMA backend. Mirrors scalar_core.hpp operation-for-operation; see the
// bit-exactness contract in wire/kernels.hpp.

#ifdef WIRE_HAVE_AVX2

#include <immintrin.h>

#include "backend.hpp"
#include "scalar_core.hpp"

namespace wire::kern {
namespace {

using detail::matmul_scalar_cell;

// ---- matmul f64: 4-row x 8-col register block -----------------------------

inline void store_acc_pd(double* dst, __m256d acc, Accum mode) {
  switch (mode) {
    case Accum::Set: _mm256_storeu_pd(dst, acc); break;
    case Accum::Add: _mm256_storeu_pd(dst, _mm256_add_pd(_mm256_loadu_pd(dst), acc)); break;
    case Accum::Sub: _mm256_storeu_pd(dst, _mm256_sub_pd(_mm256_loadu_pd(dst), acc)); break;
  }
}

void matmul_d(const double* a, const double* b, double* c, int m, int k, int n, Accum mode) {
  int j = 0;
  for (; j + 8 <= n; j += 8) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      __m256d a00 = _mm256_setzero_pd(), a01 = _mm256_setzero_pd();
      __m256d a10 = _mm256_setzero_pd(), a11 = _mm256_setzero_pd();
      __m256d a20 = _mm256_setzero_pd(), a21 = _mm256_setzero_pd();
      __m256d a30 = _mm256_setzero_pd(), a31 = _mm256_setzero_pd();
      for (int kk = 0; kk < k; ++kk) {
        __m256d b0 = _mm256_loadu_pd(b + (std::size_t)kk * n + j);
        __m256d b1 = _mm256_loadu_pd(b + (std::size_t)kk * n + j + 4);
        __m256d w0 = _mm256_set1_pd(a[(std::size_t)(i + 0) * k + kk]);
        __m256d w1 = _mm256_set1_pd(a[(std::size_t)(i + 1) * k + kk]);
        __m256d w2 = _mm256_set1_pd(a[(std::size_t)(i + 2) * k + kk]);
        __m256d w3 = _mm256_set1_pd(a[(std::size_t)(i + 3) * k + kk]);
        a00 = _mm256_fmadd_pd(w0, b0, a00); a01 = _mm256_fmadd_pd(w0, b1, a01);
        a10 = _mm256_fmadd_pd(w1, b0, a10); a11 = _mm256_fmadd_pd(w1, b1, a11);
        a20 = _mm256_fmadd_pd(w2, b0, a20); a21 = _mm256_fmadd_pd(w2, b1, a21);
        a30 = _mm256_fmadd_pd(w3, b0, a30); a31 = _mm256_fmadd_pd(w3, b1, a31);
      }
      store_acc_pd(c + (std::size_t)(i + 0) * n + j, a00, mode);
      store_acc_pd(c + (std::size_t)(i + 0) * n + j + 4, a01, mode);
      store_acc_pd(c + (std::size_t)(i + 1) * n + j, a10, mode);
      store_acc_pd(c + (std::size_t)(i + 1) * n + j + 4, a11, mode);
      store_acc_pd(c + (std::size_t)(i + 2) * n + j, a20, mode);
      store_acc_pd(c + (std::size_t)(i + 2) * n + j + 4, a21, mode);
      store_acc_pd(c + (std::size_t)(i + 3) * n + j, a30, mode);
      store_acc_pd(c + (std::size_t)(i + 3) * n + j + 4, a31, mode);
    }
    for (; i < m; ++i) {
      __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
      for (int kk = 0; kk < k; ++kk) {
        __m256d w = _mm256_set1_pd(a[(std::size_t)i * k + kk]);
        s0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(b + (std::size_t)kk * n + j), s0);
        s1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(b + (std::size_t)kk * n + j + 4), s1);
      }
      store_acc_pd(c + (std::size_t)i * n + j, s0, mode);
      store_acc_pd(c + (std::size_t)i * n + j + 4, s1, mode);
    }
  }
  for (; j < n; ++j)
    for (int i = 0; i < m; ++i) matmul_scalar_cell(a, b, c, k, n, i, j, mode);
}

// ---- matmul f32: 4-row x 16-col ------------------------------------------

inline void store_acc_ps(float* dst, __m256 acc, Accum mode) {
  switch (mode) {
    case Accum::Set: _mm256_storeu_ps(dst, acc); break;
    case Accum::Add: _mm256_storeu_ps(dst, _mm256_add_ps(_mm256_loadu_ps(dst), acc)); break;
    case Accum::Sub: _mm256_storeu_ps(dst, _mm256_sub_ps(_mm256_loadu_ps(dst), acc)); break;
  }
}

void matmul_f(const float* a, const float* b, float* c, int m, int k, int n, Accum mode) {
  int j = 0;
  for (; j + 16 <= n; j += 16) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      __m256 a00 = _mm256_setzero_ps(), a01 = _mm256_setzero_ps();
      __m256 a10 = _mm256_setzero_ps(), a11 = _mm256_setzero_ps();
      __m256 a20 = _mm256_setzero_ps(), a21 = _mm256_setzero_ps();
      __m256 a30 = _mm256_setzero_ps(), a31 = _mm256_setzero_ps();
      for (int kk = 0; kk < k; ++kk) {
        __m256 b0 = _mm256_loadu_ps(b + (std::size_t)kk * n + j);
        __m256 b1 = _mm256_loadu_ps(b + (std::size_t)kk * n + j + 8);
        __m256 w0 = _mm256_set1_ps(a[(std::size_t)(i + 0) * k + kk]);
        __m256 w1 = _mm256_set1_ps(a[(std::size_t)(i + 1) * k + kk]);
        __m256 w2 = _mm256_set1_ps(a[(std::size_t)(i + 2) * k + kk]);
        __m256 w3 = _mm256_set1_ps(a[(std::size_t)(i + 3) * k + kk]);
        a00 = _mm256_fmadd_ps(w0, b0, a00); a01 = _mm256_fmadd_ps(w0, b1, a01);
        a10 = _mm256_fmadd_ps(w1, b0, a10); a11 = _mm256_fmadd_ps(w1, b1, a11);
        a20 = _mm256_fmadd_ps(w2, b0, a20); a21 = _mm256_fmadd_ps(w2, b1, a21);
        a30 = _mm256_fmadd_ps(w3, b0, a30); a31 = _mm256_fmadd_ps(w3, b1, a31);
      }
      store_acc_ps(c + (std::size_t)(i + 0) * n + j, a00, mode);
      store_acc_ps(c + (std::size_t)(i + 0) * n + j + 8, a01, mode);
      store_acc_ps(c + (std::size_t)(i + 1) * n + j, a10, mode);
      store_acc_ps(c + (std::size_t)(i + 1) * n + j + 8, a11, mode);
      store_acc_ps(c + (std::size_t)(i + 2) * n + j, a20, mode);
      store_acc_ps(c + (std::size_t)(i + 2) * n + j + 8, a21, mode);
      store_acc_ps(c + (std::size_t)(i + 3) * n + j, a30, mode);
      store_acc_ps(c + (std::size_t)(i + 3) * n + j + 8, a31, mode);
    }
    for (; i < m; ++i) {
      __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
      for (int kk = 0; kk < k; ++kk) {
        __m256 w = _mm256_set1_ps(a[(std::size_t)i * k + kk]);
        s0 = _mm256_fmadd_ps(w, _mm256_loadu_ps(b + (std::size_t)kk * n + j), s0);
        s1 = _mm256_fmadd_ps(w, _mm256_loadu_ps(b + (std::size_t)kk * n + j + 8), s1);
      }
      store_acc_ps(c + (std::size_t)i * n + j, s0, mode);
      store_acc_ps(c + (std::size_t)i * n + j + 8, s1, mode);
    }
  }
  for (; j < n; ++j)
    for (int i = 0; i < m; ++i) matmul_scalar_cell(a, b, c, k, n, i, j, mode);
}

// ---- elementwise ----------------------------------------------------------

void add_d(const double* x, const double* y, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) o[i] = x[i] + y[i];
}
void add_f(const float* x, const float* y, float* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_add_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) o[i] = x[i] + y[i];
}
void sub_d(const double* x, const double* y, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) o[i] = x[i] - y[i];
}
void sub_f(const float* x, const float* y, float* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_sub_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) o[i] = x[i] - y[i];
}
void mul_d(const double* x, const double* y, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) o[i] = x[i] * y[i];
}
void mul_f(const float* x, const float* y, float* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) o[i] = x[i] * y[i];
}
void scale_d(const double* x, double a, double* o, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) o[i] = a * x[i];
}
void scale_f(const float* x, float a, float* o, std::size_t n) {
  __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_mul_ps(va, _mm256_loadu_ps(x + i)));
  for (; i < n; ++i) o[i] = a * x[i];
}
void axpy_d(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}
void axpy_f(float a, const float* x, float* y, std::size_t n) {
  __m256 va = _mm256_set1_ps(a);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}
void madd_d(const double* x, const double* y, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                                            _mm256_loadu_pd(o + i)));
  for (; i < n; ++i) o[i] = std::fma(x[i], y[i], o[i]);
}
void madd_f(const float* x, const float* y, float* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i),
                                            _mm256_loadu_ps(o + i)));
  for (; i < n; ++i) o[i] = std::fma(x[i], y[i], o[i]);
}
void msub_d(const double* x, const double* y, double* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(o + i, _mm256_fnmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                                             _mm256_loadu_pd(o + i)));
  for (; i < n; ++i) o[i] = std::fma(-x[i], y[i], o[i]);
}
void msub_f(const float* x, const float* y, float* o, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    _mm256_storeu_ps(o + i, _mm256_fnmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i),
                                             _mm256_loadu_ps(o + i)));
  for (; i < n; ++i) o[i] = std::fma(-x[i], y[i], o[i]);
}

// ---- exp ------------------------------------------------------------------

inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(detail::kLog2E);
  const __m256d ln2hi = _mm256_set1_pd(detail::kLn2Hi);
  const __m256d ln2lo = _mm256_set1_pd(detail::kLn2Lo);

  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2hi, x);
  r = _mm256_fnmadd_pd(k, ln2lo, r);

  __m256d p = _mm256_set1_pd(detail::kExpC[13]);
  for (int i = 12; i >= 0; --i)
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(detail::kExpC[i]));

  __m128i ki = _mm256_cvtpd_epi32(k);
  __m128i k1 = _mm_srai_epi32(ki, 1);
  __m128i k2 = _mm_sub_epi32(ki, k1);
  const __m256i bias = _mm256_set1_epi64x(1023);
  __m256d s1 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k1), bias), 52));
  __m256d s2 = _mm256_castsi256_pd(
      _mm256_slli_epi64(_mm256_add_epi64(_mm256_cvtepi32_epi64(k2), bias), 52));
  __m256d res = _mm256_mul_pd(_mm256_mul_pd(p, s1), s2);

  __m256d under = _mm256_cmp_pd(x, _mm256_set1_pd(detail::kExpUnderflow), _CMP_LT_OQ);
  __m256d over = _mm256_cmp_pd(x, _mm256_set1_pd(detail::kExpOverflow), _CMP_GT_OQ);
  __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  res = _mm256_blendv_pd(res, _mm256_setzero_pd(), under);
  res = _mm256_blendv_pd(res, _mm256_set1_pd(HUGE_VAL), over);
  res = _mm256_blendv_pd(res, x, nan);
  return res;
}

void vexp_d(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = detail::exp_core(x[i]);
}
void vexp_f(const float* x, float* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    __m128 rlo = _mm256_cvtpd_ps(exp_pd(lo));
    __m128 rhi = _mm256_cvtpd_ps(exp_pd(hi));
    _mm256_storeu_ps(out + i, _mm256_set_m128(rhi, rlo));
  }
  for (; i < n; ++i)
    out[i] = static_cast<float>(detail::exp_core(static_cast<double>(x[i])));
}

// ---- sincos ---------------------------------------------------------------

inline void sincos_pd(__m256d x, __m256d* out_s, __m256d* out_c) {
  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(detail::kTwoOverPi)),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(detail::kPio2_1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(detail::kPio2_2), r);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(detail::kPio2_3), r);
  __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(detail::kSinC[5]);
  for (int i = 4; i >= 0; --i)
    ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(detail::kSinC[i]));
  __m256d sin_r = _mm256_fmadd_pd(_mm256_mul_pd(r, z), ps, r);

  __m256d pc = _mm256_set1_pd(detail::kCosC[5]);
  for (int i = 4; i >= 0; --i)
    pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(detail::kCosC[i]));
  __m256d t = _mm256_sub_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(_mm256_set1_pd(0.5), z));
  __m256d cos_r = _mm256_fmadd_pd(_mm256_mul_pd(z, z), pc, t);

  const __m256d signmask = _mm256_set1_pd(-0.0);
  __m256d nsin = _mm256_xor_pd(sin_r, signmask);
  __m256d ncos = _mm256_xor_pd(cos_r, signmask);

  __m256i q = _mm256_and_si256(_mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(k)),
                               _mm256_set1_epi64x(3));
  __m256d m1 = _mm256_castsi256_pd(_mm256_cmpeq_epi64(q, _mm256_set1_epi64x(1)));
  __m256d m2 = _mm256_castsi256_pd(_mm256_cmpeq_epi64(q, _mm256_set1_epi64x(2)));
  __m256d m3 = _mm256_castsi256_pd(_mm256_cmpeq_epi64(q, _mm256_set1_epi64x(3)));

  __m256d s = sin_r, c = cos_r;
  s = _mm256_blendv_pd(s, cos_r, m1);
  c = _mm256_blendv_pd(c, nsin, m1);
  s = _mm256_blendv_pd(s, nsin, m2);
  c = _mm256_blendv_pd(c, ncos, m2);
  s = _mm256_blendv_pd(s, ncos, m3);
  c = _mm256_blendv_pd(c, sin_r, m3);

  __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  *out_s = _mm256_blendv_pd(s, x, nan);
  *out_c = _mm256_blendv_pd(c, x, nan);
}

void vsincos_d(const double* x, double* s, double* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vs, vc;
    sincos_pd(_mm256_loadu_pd(x + i), &vs, &vc);
    _mm256_storeu_pd(s + i, vs);
    _mm256_storeu_pd(c + i, vc);
  }
  for (; i < n; ++i) detail::sincos_core(x[i], s + i, c + i);
}
void vsincos_f(const float* x, float* s, float* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 v = _mm256_loadu_ps(x + i);
    __m256d lo = _mm256_cvtps_pd(_mm256_castps256_ps128(v));
    __m256d hi = _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1));
    __m256d slo, clo, shi, chi;
    sincos_pd(lo, &slo, &clo);
    sincos_pd(hi, &shi, &chi);
    _mm256_storeu_ps(s + i, _mm256_set_m128(_mm256_cvtpd_ps(shi), _mm256_cvtpd_ps(slo)));
    _mm256_storeu_ps(c + i, _mm256_set_m128(_mm256_cvtpd_ps(chi), _mm256_cvtpd_ps(clo)));
  }
  for (; i < n; ++i) {
    double sd, cd;
    detail::sincos_core(static_cast<double>(x[i]), &sd, &cd);
    s[i] = static_cast<float>(sd);
    c[i] = static_cast<float>(cd);
  }
}

// ---- adam -------------------------------------------------------------------

void adam_d(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
            double b1, double b2, double eps, double bc1, double bc2) {
  const __m256d vb1 = _mm256_set1_pd(b1), vb2 = _mm256_set1_pd(b2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - b1), vomb2 = _mm256_set1_pd(1.0 - b2);
  const __m256d veps = _mm256_set1_pd(eps), vbc1 = _mm256_set1_pd(bc1);
  const __m256d vbc2 = _mm256_set1_pd(bc2), vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d gv = _mm256_loadu_pd(g + i);
    __m256d t1 = _mm256_mul_pd(vomb1, gv);
    __m256d mv = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i), t1);
    __m256d gg = _mm256_mul_pd(gv, gv);
    __m256d t2 = _mm256_mul_pd(vomb2, gg);
    __m256d vv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i), t2);
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    __m256d mh = _mm256_mul_pd(mv, vbc1);
    __m256d vh = _mm256_mul_pd(vv, vbc2);
    __m256d den = _mm256_add_pd(_mm256_sqrt_pd(vh), veps);
    __m256d q = _mm256_div_pd(mh, den);
    _mm256_storeu_pd(p + i, _mm256_fnmadd_pd(vlr, q, _mm256_loadu_pd(p + i)));
  }
  for (; i < n; ++i) detail::adam_scalar(p, g, m, v, i, lr, b1, b2, eps, bc1, bc2);
}

void adam_f(float* p, const float* g, float* m, float* v, std::size_t n, float lr,
            float b1, float b2, float eps, float bc1, float bc2) {
  const __m256 vb1 = _mm256_set1_ps(b1), vb2 = _mm256_set1_ps(b2);
  const __m256 vomb1 = _mm256_set1_ps(1.0f - b1), vomb2 = _mm256_set1_ps(1.0f - b2);
  const __m256 veps = _mm256_set1_ps(eps), vbc1 = _mm256_set1_ps(bc1);
  const __m256 vbc2 = _mm256_set1_ps(bc2), vlr = _mm256_set1_ps(lr);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256 gv = _mm256_loadu_ps(g + i);
    __m256 t1 = _mm256_mul_ps(vomb1, gv);
    __m256 mv = _mm256_fmadd_ps(vb1, _mm256_loadu_ps(m + i), t1);
    __m256 gg = _mm256_mul_ps(gv, gv);
    __m256 t2 = _mm256_mul_ps(vomb2, gg);
    __m256 vv = _mm256_fmadd_ps(vb2, _mm256_loadu_ps(v + i), t2);
    _mm256_storeu_ps(m + i, mv);
    _mm256_storeu_ps(v + i, vv);
    __m256 mh = _mm256_mul_ps(mv, vbc1);
    __m256 vh = _mm256_mul_ps(vv, vbc2);
    __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vh), veps);
    __m256 q = _mm256_div_ps(mh, den);
    _mm256_storeu_ps(p + i, _mm256_fnmadd_ps(vlr, q, _mm256_loadu_ps(p + i)));
  }
  for (; i < n; ++i) detail::adam_scalar(p, g, m, v, i, lr, b1, b2, eps, bc1, bc2);
}

const KernelTable kAvx2Table = {
    "avx2",
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

const KernelTable* avx2_table() { return &kAvx2Table; }

}  // namespace wire::kern

#endif  // WIRE_HAVE_AVX2
