#include "wire/activations.hpp"

#include <cmath>
#include <stdexcept>

namespace wire {

void ActivationKind::validate() const {
  switch (type) {
    case Type::Wire:
    case Type::WireReal:
      if (omega0 < 0 || sigma0 < 0)
        throw std::invalid_argument("activation: omega0 and sigma0 must be >= 0");
      break;
    case Type::Wire2D:
      if (omega0 < 0 || sigma0 < 0)
        throw std::invalid_argument("activation: omega0 and sigma0 must be >= 0");
      if (windows < 2)
        throw std::invalid_argument("activation: wire2d needs windows >= 2");
      break;
    case Type::ConstantQ:
      if (q <= 0) throw std::invalid_argument("activation: constant_q needs q > 0");
      if (omega0 <= 0)
        throw std::invalid_argument("activation: constant_q needs omega0 > 0");
      break;
    case Type::Siren:
      if (omega0 < 0) throw std::invalid_argument("activation: omega0 must be >= 0");
      break;
    case Type::Gauss:
      if (sigma0 < 0) throw std::invalid_argument("activation: sigma0 must be >= 0");
      break;
    case Type::ReluPE:
      if (pe_frequencies < 0)
        throw std::invalid_argument("activation: pe_frequencies must be >= 0");
      break;
  }
}

std::string ActivationKind::name() const {
  switch (type) {
    case Type::Wire: return "wire";
    case Type::WireReal: return "wire_real";
    case Type::Wire2D: return "wire2d";
    case Type::ConstantQ: return "constant_q";
    case Type::Siren: return "siren";
    case Type::Gauss: return "gauss";
    case Type::ReluPE: return "relu_pe";
  }
  return "?";
}

ActivationKind ActivationKind::parse(const std::string& name) {
  if (name == "wire") return wire(20.0, 10.0);
  if (name == "wire_real") return wire_real(20.0, 10.0);
  if (name == "wire2d") return wire2d(20.0, 10.0);
  if (name == "constant_q") return constant_q(10.0, 20.0);
  if (name == "siren") return siren(30.0);
  if (name == "gauss") return gauss(30.0);
  if (name == "relu_pe") return relu_pe(6);
  if (name == "relu") return relu_pe(0);
  throw std::invalid_argument("unknown activation kind: " + name);
}

std::complex<double> gabor_eval(std::complex<double> z, double omega0, double sigma0) {
  double a = z.real(), b = z.imag();
  double env = std::exp(-omega0 * b - sigma0 * sigma0 * (a * a + b * b));
  return {env * std::cos(omega0 * a), env * std::sin(omega0 * a)};
}

double wire_real_eval(double x, double omega0, double sigma0) {
  return std::sin(omega0 * x) * std::exp(-(sigma0 * x) * (sigma0 * x));
}

double siren_eval(double x, double omega0) { return std::sin(omega0 * x); }

double gauss_eval(double x, double sigma0) {
  return std::exp(-(sigma0 * x) * (sigma0 * x));
}

std::complex<double> wire2d_eval(const std::vector<std::complex<double>>& zs,
                                 double omega0, double sigma0) {
  std::complex<double> out = gabor_eval(zs.at(0), omega0, sigma0);
  double acc = 0.0;
  for (std::size_t k = 1; k < zs.size(); ++k) acc += std::norm(zs[k]);
  return out * std::exp(-sigma0 * sigma0 * acc);
}

}  // namespace wire
