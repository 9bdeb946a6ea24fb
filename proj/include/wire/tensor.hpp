#pragma once

// Dense N-dimensional tensors of real or complex scalars, stored as separate
// re/im planes. An empty im plane means the tensor is real-valued (im == 0
// identically); real tensors stay real under real-preserving operations.

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wire/kernels.hpp"

namespace wire {

using Shape = std::vector<int>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << "]";
  return os.str();
}

template <class T>
struct Tensor {
  Shape shape;
  std::vector<T> re;
  std::vector<T> im;  // empty => real tensor

  Tensor() = default;
  Tensor(Shape s, bool complex_valued) : shape(std::move(s)) {
    re = std::vector<T>(shape_numel(shape));
    if (complex_valued) im = std::vector<T>(re.size());
  }

  static Tensor zeros(Shape s, bool complex_valued = false) {
    return Tensor(std::move(s), complex_valued);
  }
  static Tensor from_real(Shape s, std::vector<T> data) {
    Tensor t;
    t.shape = std::move(s);
    if (data.size() != shape_numel(t.shape))
      throw std::invalid_argument("tensor data size does not match shape " +
                                  shape_str(t.shape));
    t.re = std::move(data);
    return t;
  }

  bool is_complex() const { return !im.empty(); }
  std::size_t numel() const { return re.size(); }
  int rows() const { return shape.size() >= 1 ? shape[0] : 1; }
  int cols() const { return shape.size() >= 2 ? shape[1] : 1; }

  void promote_complex() {
    if (!is_complex()) im.assign(re.size(), T(0));
  }

  template <class U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.re.assign(re.begin(), re.end());
    out.im.assign(im.begin(), im.end());
    return out;
  }
};

// c = a * b over re/im planes; null im pointer means that operand is real.
// Complex x complex uses the three-multiplication split
//   p1 = ar*br, p2 = ai*bi, p3 = (ar+ai)*(br+bi)
//   c_re = p1 - p2, c_im = p3 - p1 - p2
// so the whole product costs three real matmuls. cim may be null to request
// only the real part of the product.
template <class T>
void matmul_planes(const T* ar, const T* ai, const T* br, const T* bi, T* cr, T* ci,
                   int m, int k, int n) {
  using kern::Accum;
  const std::size_t mn = static_cast<std::size_t>(m) * n;
  if (!ai && !bi) {
    kern::matmul(ar, br, cr, m, k, n, Accum::Set);
    if (ci) std::fill(ci, ci + mn, T(0));
    return;
  }
  if (ai && !bi) {
    kern::matmul(ar, br, cr, m, k, n, Accum::Set);
    if (ci) kern::matmul(ai, br, ci, m, k, n, Accum::Set);
    return;
  }
  if (!ai && bi) {
    kern::matmul(ar, br, cr, m, k, n, Accum::Set);
    if (ci) kern::matmul(ar, bi, ci, m, k, n, Accum::Set);
    return;
  }
  if (!ci) {  // real part only: ar*br - ai*bi
    kern::matmul(ar, br, cr, m, k, n, Accum::Set);
    kern::matmul(ai, bi, cr, m, k, n, Accum::Sub);
    return;
  }
  std::vector<T> p2(mn), as((std::size_t)m * k), bs((std::size_t)k * n);
  kern::matmul(ar, br, cr, m, k, n, Accum::Set);  // p1 -> cr
  kern::matmul(ai, bi, p2.data(), m, k, n, Accum::Set);
  kern::add(ar, ai, as.data(), as.size());
  kern::add(br, bi, bs.data(), bs.size());
  kern::matmul(as.data(), bs.data(), ci, m, k, n, Accum::Set);  // p3 -> ci
  kern::sub(ci, cr, ci, mn);                                    // p3 - p1
  kern::sub(ci, p2.data(), ci, mn);                             // - p2
  kern::sub(cr, p2.data(), cr, mn);                             // p1 - p2
}

template <class T>
Tensor<T> matmul_tensors(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape.size() != 2 || b.shape.size() != 2 || a.shape[1] != b.shape[0])
    throw std::invalid_argument("matmul: inner dimensions disagree: " +
                                shape_str(a.shape) + " vs " + shape_str(b.shape));
  const int m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor<T> c({m, n}, a.is_complex() || b.is_complex());
  matmul_planes(a.re.data(), a.is_complex() ? a.im.data() : nullptr, b.re.data(),
                b.is_complex() ? b.im.data() : nullptr, c.re.data(),
                c.is_complex() ? c.im.data() : nullptr, m, k, n);
  return c;
}

}  // namespace wire
