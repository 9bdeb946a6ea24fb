#pragma once

// Scalar reference semantics for every dispatched kernel. The SIMD backends
// mirror these exact operation sequences; any change here is an ABI-level
// change for them.

#include <cmath>
#include <cstdint>
#include <cstring>

#include "wire/kernels.hpp"

namespace wire::kern::detail {

// ---- exp ----------------------------------------------------------------
// Cody-Waite argument reduction plus a degree-13 Taylor polynomial in Horner
// form, scaled by 2^k split into two factors so extreme k never overflows an
// intermediate.

inline constexpr double kLog2E = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93145751953125e-1;
inline constexpr double kLn2Lo = 1.42860682030941723212e-6;
inline constexpr double kExpOverflow = 709.782712893384;
inline constexpr double kExpUnderflow = -745.133219101941;

inline constexpr double kExpC[14] = {
    1.0,
    1.0,
    5.0000000000000000e-01,   // 1/2!
    1.6666666666666666e-01,   // 1/3!
    4.1666666666666664e-02,   // 1/4!
    8.3333333333333332e-03,   // 1/5!
    1.3888888888888889e-03,   // 1/6!
    1.9841269841269841e-04,   // 1/7!
    2.4801587301587302e-05,   // 1/8!
    2.7557319223985893e-06,   // 1/9!
    2.7557319223985888e-07,   // 1/10!
    2.5052108385441720e-08,   // 1/11!
    2.0876756987868100e-09,   // 1/12!
    1.6059043836821613e-10};  // 1/13!

inline double pow2i(int e) {  // 2^e for e in [-538, 538]
  std::uint64_t bits = static_cast<std::uint64_t>(1023 + e) << 52;
  double r;
  std::memcpy(&r, &bits, sizeof r);
  return r;
}

inline double exp_core(double x) {
  if (std::isnan(x)) return x;
  if (x > kExpOverflow) return HUGE_VAL;
  if (x < kExpUnderflow) return 0.0;
  double k = std::nearbyint(x * kLog2E);
  double r = std::fma(-k, kLn2Hi, x);
  r = std::fma(-k, kLn2Lo, r);
  double p = kExpC[13];
  for (int i = 12; i >= 0; --i) p = std::fma(p, r, kExpC[i]);
  int ki = static_cast<int>(static_cast<std::int64_t>(k));
  int k1 = ki >> 1;
  int k2 = ki - k1;
  return (p * pow2i(k1)) * pow2i(k2);
}

// ---- sin/cos ------------------------------------------------------------
// Three-constant Cody-Waite reduction by pi/2 and the classic fdlibm kernel
// polynomials over |r| <= pi/4.

inline constexpr double kTwoOverPi = 6.36619772367581382433e-01;
inline constexpr double kPio2_1 = 1.57079632673412561417e+00;
inline constexpr double kPio2_2 = 6.07710050630396597660e-11;
inline constexpr double kPio2_3 = 2.02226624879595063154e-21;

inline constexpr double kSinC[6] = {
    -1.66666666666666324348e-01, 8.33333333332248946124e-03,
    -1.98412698298579493134e-04, 2.75573137070700676789e-06,
    -2.50507602534068634195e-08, 1.58969099521155010221e-10};
inline constexpr double kCosC[6] = {
    4.16666666666666019037e-02,  -1.38888888888741095749e-03,
    2.48015872894767294178e-05,  -2.75573143513906633035e-07,
    2.08757232129817482790e-09,  -1.13596475577881948265e-11};

inline void sincos_core(double x, double* out_s, double* out_c) {
  if (std::isnan(x)) {
    *out_s = x;
    *out_c = x;
    return;
  }
  double k = std::nearbyint(x * kTwoOverPi);
  double r = std::fma(-k, kPio2_1, x);
  r = std::fma(-k, kPio2_2, r);
  r = std::fma(-k, kPio2_3, r);
  double z = r * r;

  double ps = kSinC[5];
  for (int i = 4; i >= 0; --i) ps = std::fma(ps, z, kSinC[i]);
  double sin_r = std::fma(r * z, ps, r);

  double pc = kCosC[5];
  for (int i = 4; i >= 0; --i) pc = std::fma(pc, z, kCosC[i]);
  double t = 1.0 - 0.5 * z;
  double cos_r = std::fma(z * z, pc, t);

  int q = static_cast<int>(static_cast<std::int64_t>(k)) & 3;
  switch (q) {
    case 0: *out_s = sin_r; *out_c = cos_r; break;
    case 1: *out_s = cos_r; *out_c = -sin_r; break;
    case 2: *out_s = -sin_r; *out_c = -cos_r; break;
    default: *out_s = -cos_r; *out_c = sin_r; break;
  }
}

// ---- Adam ---------------------------------------------------------------
// Per-scalar update, exact operation order shared with the SIMD backends.

template <class T>
inline void adam_scalar(T* p, const T* g, T* m, T* v, std::size_t i, T lr, T b1, T b2,
                        T eps, T bc1, T bc2) {
  T one = T(1);
  T t1 = (one - b1) * g[i];
  m[i] = std::fma(b1, m[i], t1);
  T gg = g[i] * g[i];
  T t2 = (one - b2) * gg;
  v[i] = std::fma(b2, v[i], t2);
  T mh = m[i] * bc1;
  T vh = v[i] * bc2;
  T den = std::sqrt(vh) + eps;
  T q = mh / den;
  p[i] = std::fma(-lr, q, p[i]);
}

// ---- matmul -------------------------------------------------------------
// Dot products accumulate over k in ascending order with explicit fma.

template <class T>
inline void matmul_scalar_cell(const T* a, const T* b, T* c, int K, int n, int i, int j,
                               Accum acc) {
  T s = T(0);
  for (int k = 0; k < K; ++k) s = std::fma(a[i * K + k], b[k * n + j], s);
  T* dst = c + static_cast<std::size_t>(i) * n + j;
  switch (acc) {
    case Accum::Set: *dst = s; break;
    case Accum::Add: *dst = *dst + s; break;
    case Accum::Sub: *dst = *dst - s; break;
  }
}

}  // namespace wire::kern::detail
