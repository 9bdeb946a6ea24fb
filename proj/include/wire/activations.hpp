#pragma once

// Activation nonlinearities and input encodings, exposed two ways: as graph
// compositions of the registered pointwise primitives (for training), and as
// direct scalar evaluations in std math (used by tests as an independent
// oracle).

#include <complex>
#include <string>
#include <vector>

#include "wire/autodiff.hpp"
#include "wire/tensor.hpp"

namespace wire {

struct ActivationKind {
  enum class Type { Wire, WireReal, Wire2D, ConstantQ, Siren, Gauss, ReluPE };

  Type type = Type::Wire;
  double omega0 = 20.0;  // wavelet center frequency (rad/unit)
  double sigma0 = 10.0;  // Gaussian spread (1/unit)
  double q = 10.0;       // ConstantQ: omega0*sigma0 product
  int pe_frequencies = 6;  // ReluPE: L; 0 means plain ReLU on raw coordinates
  int windows = 2;         // Wire2D: D

  bool complex_weights() const {
    return type == Type::Wire || type == Type::Wire2D || type == Type::ConstantQ;
  }
  int window_count() const { return type == Type::Wire2D ? windows : 1; }
  double eff_omega0() const { return omega0; }
  double eff_sigma0() const { return type == Type::ConstantQ ? q / omega0 : sigma0; }

  void validate() const;
  std::string name() const;
  static ActivationKind parse(const std::string& name);

  static ActivationKind wire(double w0, double s0) {
    return {Type::Wire, w0, s0, w0 * s0, 6, 2};
  }
  static ActivationKind wire_real(double w0, double s0) {
    return {Type::WireReal, w0, s0, w0 * s0, 6, 2};
  }
  static ActivationKind wire2d(double w0, double s0, int d = 2) {
    return {Type::Wire2D, w0, s0, w0 * s0, 6, d};
  }
  static ActivationKind constant_q(double qv, double w0) {
    return {Type::ConstantQ, w0, qv / w0, qv, 6, 2};
  }
  static ActivationKind siren(double w0) { return {Type::Siren, w0, 0.0, 0.0, 6, 2}; }
  static ActivationKind gauss(double s0) { return {Type::Gauss, 0.0, s0, 0.0, 6, 2}; }
  static ActivationKind relu_pe(int l = 6) { return {Type::ReluPE, 0.0, 0.0, 0.0, l, 2}; }
};

// Builds the activation as a graph composition over pre-activation node(s).
// zs holds one node per window; only Wire2D uses more than one. The Gabor
// wavelet is exp(j*w0*z) * exp(-|s0*z|^2) assembled from scale / square-
// magnitude / add / exp; Wire2D multiplies the first window's wavelet by
// exp(-s0^2 * sum_k |z_k|^2) over the remaining windows.
template <class T>
int apply_activation(Graph<T>& g, const ActivationKind& act, const std::vector<int>& zs) {
  const double w0 = act.eff_omega0();
  const double s0 = act.eff_sigma0();
  switch (act.type) {
    case ActivationKind::Type::Wire:
    case ActivationKind::Type::ConstantQ: {
      return g.elementwise(zs.at(0), Func::Gabor, static_cast<T>(w0),
                           static_cast<T>(s0));
    }
    case ActivationKind::Type::Wire2D: {
      int psi = g.elementwise(zs.at(0), Func::Gabor, static_cast<T>(w0),
                              static_cast<T>(s0));
      int winsum = -1;
      for (std::size_t k = 1; k < zs.size(); ++k) {
        int sq = g.elementwise(zs[k], Func::SquareMagnitude);
        winsum = winsum < 0 ? sq : g.add(winsum, sq);
      }
      int win = g.elementwise(g.scale(winsum, static_cast<T>(-s0 * s0)), Func::Exp);
      return g.mul(psi, win);
    }
    case ActivationKind::Type::WireReal: {
      int z = zs.at(0);
      int s = g.elementwise(g.scale(z, static_cast<T>(w0)), Func::Sin);
      int env = g.elementwise(
          g.scale(g.elementwise(z, Func::SquareMagnitude), static_cast<T>(-s0 * s0)),
          Func::Exp);
      return g.mul(s, env);
    }
    case ActivationKind::Type::Siren:
      return g.elementwise(g.scale(zs.at(0), static_cast<T>(w0)), Func::Sin);
    case ActivationKind::Type::Gauss:
      return g.elementwise(g.scale(g.elementwise(zs.at(0), Func::SquareMagnitude),
                                   static_cast<T>(-s0 * s0)),
                           Func::Exp);
    case ActivationKind::Type::ReluPE:
      return g.elementwise(zs.at(0), Func::Relu);
  }
  throw std::invalid_argument("unknown activation kind");
}

// Direct scalar evaluations (independent oracle path through std math).
std::complex<double> gabor_eval(std::complex<double> z, double omega0, double sigma0);
double wire_real_eval(double x, double omega0, double sigma0);
double siren_eval(double x, double omega0);
double gauss_eval(double x, double sigma0);
std::complex<double> wire2d_eval(const std::vector<std::complex<double>>& zs,
                                 double omega0, double sigma0);

// gamma(x): per input dimension d and level l < L, columns
// [d*2L + 2l] = sin(2^l * pi * x_d), [d*2L + 2l + 1] = cos(2^l * pi * x_d).
template <class T>
Tensor<T> positional_encoding(const Tensor<T>& coords, int L) {
  if (L < 1) throw std::invalid_argument("positional_encoding: L must be >= 1");
  if (coords.shape.size() != 2)
    throw std::invalid_argument("positional_encoding: coords must be [N x D]");
  const int n = coords.shape[0], d = coords.shape[1];
  Tensor<T> out({n, 2 * L * d}, false);
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < n; ++i)
    for (int dd = 0; dd < d; ++dd) {
      double x = static_cast<double>(coords.re[(std::size_t)i * d + dd]);
      for (int l = 0; l < L; ++l) {
        double arg = std::ldexp(pi * x, l);  // 2^l * pi * x
        std::size_t base = (std::size_t)i * (2 * L * d) + (std::size_t)dd * 2 * L + 2 * l;
        out.re[base] = static_cast<T>(std::sin(arg));
        out.re[base + 1] = static_cast<T>(std::cos(arg));
      }
    }
  return out;
}

}  // namespace wire
