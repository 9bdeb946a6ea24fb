#pragma once

#include <cstddef>

namespace wire {

// A fixed linear measurement map with an explicit adjoint, applied to real
// vectors. The autodiff graph treats it as an opaque linear node: forward uses
// apply(), backward uses adjoint().
class LinearMap {
 public:
  virtual ~LinearMap() = default;
  virtual std::size_t in_size() const = 0;
  virtual std::size_t out_size() const = 0;
  virtual void apply(const double* x, double* y) const = 0;    // y = A x
  virtual void adjoint(const double* y, double* x) const = 0;  // x = A' y
};

}  // namespace wire
