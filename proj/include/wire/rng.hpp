#pragma once

// Deterministic random streams. std::mt19937_64 output is pinned by the
// standard; the distributions here are implemented by hand because the
// standard library's are not, and reproducibility across toolchains matters
// for seeded experiments.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace wire {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // uniform in [0, 1)
  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Box-Muller; second value cached
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Poisson by Knuth's product method; fine for the photon counts used here
  int poisson(double lambda) {
    if (lambda < 0) throw std::invalid_argument("poisson: lambda must be >= 0");
    if (lambda == 0) return 0;
    double limit = std::exp(-lambda);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection-free modulo is fine here; n is tiny relative to 2^64
    return gen_() % n;
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wire
