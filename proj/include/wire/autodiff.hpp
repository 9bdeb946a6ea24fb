#pragma once

// Tape-based reverse-mode automatic differentiation over real and complex
// tensors. The tape is define-by-run and rebuilt for every training step.
// Complex leaves are differentiated as two independent real parameters: for
// w = a + jb the populated gradient is (dL/da, dL/db).
//
// Saved values per op: matmul and the elementwise rules read their parents'
// forward values, exp/sin/cos keep the one extra array their derivative needs
// (exp keeps nothing extra, sin keeps cos and vice versa). Nothing else is
// retained.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wire/kernels.hpp"
#include "wire/linear_map.hpp"
#include "wire/tensor.hpp"

namespace wire {

enum class Op {
  Leaf,
  Matmul,
  AddBias,
  Add,
  Mul,
  Scale,
  Ew,
  RealPart,
  L2Loss,
  Linear,
  Concat,
  Select,
};

// Registered differentiable pointwise maps.
enum class Func { Exp = 0, SquareMagnitude, Sin, Cos, Relu, ScaleBy, Gabor };

template <class T>
class Graph {
 public:
  struct Node {
    Op op = Op::Leaf;
    Func func = Func::Exp;
    int a = -1, b = -1;
    std::vector<int> parents;  // Concat only
    T p0{}, p1{};              // scale factor (re, im)
    const LinearMap* lin = nullptr;
    Tensor<T> val;
    Tensor<T> aux;  // sin/cos cache, l2 target
    Tensor<T> grad;
    std::vector<std::size_t> offsets;  // Concat
    bool requires_grad = false;
  };

  int input(Tensor<T> v) { return add_leaf(std::move(v), false); }
  int param(Tensor<T> v) { return add_leaf(std::move(v), true); }

  int matmul(int ia, int ib) {
    const Tensor<T>&a = val_of(ia), &b = val_of(ib);
    Node n;
    n.op = Op::Matmul;
    n.a = ia;
    n.b = ib;
    n.val = matmul_tensors(a, b);
    return push(std::move(n), needs_grad(ia) || needs_grad(ib));
  }

  // x [m x n] + row-broadcast bias [n]
  int add_bias(int ix, int ib) {
    const Tensor<T>&x = val_of(ix), &b = val_of(ib);
    if (x.shape.size() != 2 || b.shape.size() != 1 || x.shape[1] != b.shape[0])
      throw std::invalid_argument("add_bias: shape mismatch: " + shape_str(x.shape) +
                                  " vs " + shape_str(b.shape));
    Node n;
    n.op = Op::AddBias;
    n.a = ix;
    n.b = ib;
    n.val = Tensor<T>(x.shape, x.is_complex() || b.is_complex());
    const int m = x.shape[0], w = x.shape[1];
    auto rows_add = [&](const std::vector<T>* xs, const std::vector<T>* bs,
                        std::vector<T>& out) {
      for (int i = 0; i < m; ++i) {
        T* orow = out.data() + (std::size_t)i * w;
        if (xs && bs)
          kern::add(xs->data() + (std::size_t)i * w, bs->data(), orow, w);
        else if (xs)
          std::copy(xs->data() + (std::size_t)i * w, xs->data() + (std::size_t)(i + 1) * w,
                    orow);
        else if (bs)
          std::copy(bs->data(), bs->data() + w, orow);
      }
    };
    rows_add(&x.re, &b.re, n.val.re);
    if (n.val.is_complex())
      rows_add(x.is_complex() ? &x.im : nullptr, b.is_complex() ? &b.im : nullptr,
               n.val.im);
    return push(std::move(n), needs_grad(ix) || needs_grad(ib));
  }

  int add(int ix, int iy) {
    const Tensor<T>&x = val_of(ix), &y = val_of(iy);
    if (x.shape != y.shape)
      throw std::invalid_argument("add: shape mismatch: " + shape_str(x.shape) + " vs " +
                                  shape_str(y.shape));
    Node n;
    n.op = Op::Add;
    n.a = ix;
    n.b = iy;
    n.val = Tensor<T>(x.shape, x.is_complex() || y.is_complex());
    kern::add(x.re.data(), y.re.data(), n.val.re.data(), x.numel());
    if (n.val.is_complex()) {
      if (x.is_complex() && y.is_complex())
        kern::add(x.im.data(), y.im.data(), n.val.im.data(), x.numel());
      else
        n.val.im = x.is_complex() ? x.im : y.im;
    }
    return push(std::move(n), needs_grad(ix) || needs_grad(iy));
  }

  int mul(int ix, int iy) {
    const Tensor<T>&x = val_of(ix), &y = val_of(iy);
    if (x.shape != y.shape)
      throw std::invalid_argument("mul: shape mismatch: " + shape_str(x.shape) + " vs " +
                                  shape_str(y.shape));
    Node n;
    n.op = Op::Mul;
    n.a = ix;
    n.b = iy;
    n.val = Tensor<T>(x.shape, x.is_complex() || y.is_complex());
    const std::size_t cnt = x.numel();
    kern::mul(x.re.data(), y.re.data(), n.val.re.data(), cnt);
    if (x.is_complex() && y.is_complex())
      kern::msub(x.im.data(), y.im.data(), n.val.re.data(), cnt);
    if (n.val.is_complex()) {
      if (x.is_complex() && y.is_complex()) {
        kern::mul(x.re.data(), y.im.data(), n.val.im.data(), cnt);
        kern::madd(x.im.data(), y.re.data(), n.val.im.data(), cnt);
      } else if (x.is_complex()) {
        kern::mul(x.im.data(), y.re.data(), n.val.im.data(), cnt);
      } else {
        kern::mul(x.re.data(), y.im.data(), n.val.im.data(), cnt);
      }
    }
    return push(std::move(n), needs_grad(ix) || needs_grad(iy));
  }

  int scale(int ix, T s_re, T s_im = T(0)) {
    const Tensor<T>& x = val_of(ix);
    Node n;
    n.op = Op::Scale;
    n.a = ix;
    n.p0 = s_re;
    n.p1 = s_im;
    n.val = Tensor<T>(x.shape, x.is_complex() || s_im != T(0));
    const std::size_t cnt = x.numel();
    kern::scale(x.re.data(), s_re, n.val.re.data(), cnt);
    if (x.is_complex()) kern::axpy(-s_im, x.im.data(), n.val.re.data(), cnt);
    if (n.val.is_complex()) {
      if (x.is_complex()) {
        kern::scale(x.im.data(), s_re, n.val.im.data(), cnt);
        kern::axpy(s_im, x.re.data(), n.val.im.data(), cnt);
      } else {
        kern::scale(x.re.data(), s_im, n.val.im.data(), cnt);
      }
    }
    return push(std::move(n), needs_grad(ix));
  }

  int elementwise(int ix, Func f, T p0 = T(0), T p1 = T(0)) {
    switch (f) {
      case Func::Exp:
      case Func::SquareMagnitude:
      case Func::Sin:
      case Func::Cos:
      case Func::Relu:
      case Func::Gabor:
        break;
      case Func::ScaleBy:
        return scale(ix, p0, p1);
      default:
        throw std::invalid_argument("unregistered pointwise function id: " +
                                    std::to_string(static_cast<int>(f)));
    }
    const Tensor<T>& x = val_of(ix);
    const std::size_t cnt = x.numel();
    Node n;
    n.op = Op::Ew;
    n.func = f;
    n.a = ix;
    switch (f) {
      case Func::Exp:
        if (x.is_complex()) {
          n.val = Tensor<T>(x.shape, true);
          std::vector<T> mag(cnt), s(cnt), c(cnt);
          kern::vexp(x.re.data(), mag.data(), cnt);
          kern::vsincos(x.im.data(), s.data(), c.data(), cnt);
          kern::mul(mag.data(), c.data(), n.val.re.data(), cnt);
          kern::mul(mag.data(), s.data(), n.val.im.data(), cnt);
        } else {
          n.val = Tensor<T>(x.shape, false);
          kern::vexp(x.re.data(), n.val.re.data(), cnt);
        }
        break;
      case Func::SquareMagnitude:
        n.val = Tensor<T>(x.shape, false);
        kern::mul(x.re.data(), x.re.data(), n.val.re.data(), cnt);
        if (x.is_complex()) kern::madd(x.im.data(), x.im.data(), n.val.re.data(), cnt);
        break;
      case Func::Sin:
      case Func::Cos: {
        require_real(x, "sin/cos");
        n.val = Tensor<T>(x.shape, false);
        n.aux = Tensor<T>(x.shape, false);
        if (f == Func::Sin)
          kern::vsincos(x.re.data(), n.val.re.data(), n.aux.re.data(), cnt);
        else
          kern::vsincos(x.re.data(), n.aux.re.data(), n.val.re.data(), cnt);
        break;
      }
      case Func::Relu:
        require_real(x, "relu");
        n.val = Tensor<T>(x.shape, false);
        for (std::size_t i = 0; i < cnt; ++i) n.val.re[i] = x.re[i] > T(0) ? x.re[i] : T(0);
        break;
      case Func::Gabor: {
        // fused wavelet: exp(j*p0*z) * exp(-(p1*|z|)^2); one pass instead of
        // the scale/square-magnitude/add/exp chain
        n.p0 = p0;
        n.p1 = p1;
        n.val = Tensor<T>(x.shape, true);
        const T* a = x.re.data();
        const T* b = x.is_complex() ? x.im.data() : nullptr;
        std::vector<T> wr(cnt), wi(cnt), env(cnt), sn(cnt), cs(cnt);
        kern::mul(a, a, wr.data(), cnt);
        if (b) kern::madd(b, b, wr.data(), cnt);
        kern::scale(wr.data(), -p1 * p1, wr.data(), cnt);
        if (b) kern::axpy(-p0, b, wr.data(), cnt);
        kern::scale(a, p0, wi.data(), cnt);
        kern::vexp(wr.data(), env.data(), cnt);
        kern::vsincos(wi.data(), sn.data(), cs.data(), cnt);
        kern::mul(env.data(), cs.data(), n.val.re.data(), cnt);
        kern::mul(env.data(), sn.data(), n.val.im.data(), cnt);
        break;
      }
      default:
        break;
    }
    return push(std::move(n), needs_grad(ix));
  }

  int real_part(int ix) {
    const Tensor<T>& x = val_of(ix);
    Node n;
    n.op = Op::RealPart;
    n.a = ix;
    n.val = Tensor<T>(x.shape, false);
    n.val.re = x.re;
    return push(std::move(n), needs_grad(ix));
  }

  // mean of squared differences; pred and target must be real and same shape
  int l2_loss(int ipred, Tensor<T> target) {
    const Tensor<T>& p = val_of(ipred);
    if (p.shape != target.shape)
      throw std::invalid_argument("l2_loss: shape mismatch: " + shape_str(p.shape) +
                                  " vs " + shape_str(target.shape));
    require_real(p, "l2_loss prediction");
    require_real(target, "l2_loss target");
    Node n;
    n.op = Op::L2Loss;
    n.a = ipred;
    n.aux = std::move(target);
    n.val = Tensor<T>({1}, false);
    double sum = kern::reduce_sumsq_diff(p.re.data(), n.aux.re.data(), p.numel());
    n.val.re[0] = static_cast<T>(sum / static_cast<double>(p.numel()));
    return push(std::move(n), needs_grad(ipred));
  }

  int apply_linear(int ix, const LinearMap* op, Shape out_shape) {
    const Tensor<T>& x = val_of(ix);
    require_real(x, "linear operator input");
    if (x.numel() != op->in_size() || shape_numel(out_shape) != op->out_size())
      throw std::invalid_argument("linear operator: size mismatch (input " +
                                  shape_str(x.shape) + ", operator " +
                                  std::to_string(op->in_size()) + "->" +
                                  std::to_string(op->out_size()) + ")");
    Node n;
    n.op = Op::Linear;
    n.a = ix;
    n.lin = op;
    n.val = Tensor<T>(std::move(out_shape), false);
    std::vector<double> xin(x.re.begin(), x.re.end()), yout(op->out_size());
    op->apply(xin.data(), yout.data());
    for (std::size_t i = 0; i < yout.size(); ++i) n.val.re[i] = static_cast<T>(yout[i]);
    return push(std::move(n), needs_grad(ix));
  }

  // one element of a real tensor as a scalar node (a backward entry point for
  // per-output gradients)
  int select(int ix, int index) {
    const Tensor<T>& x = val_of(ix);
    require_real(x, "select");
    if (index < 0 || static_cast<std::size_t>(index) >= x.numel())
      throw std::invalid_argument("select: index out of range");
    Node n;
    n.op = Op::Select;
    n.a = ix;
    n.b = index;
    n.val = Tensor<T>({1}, false);
    n.val.re[0] = x.re[static_cast<std::size_t>(index)];
    return push(std::move(n), needs_grad(ix));
  }

  int concat(const std::vector<int>& xs) {
    if (xs.empty()) throw std::invalid_argument("concat: empty input list");
    std::size_t total = 0;
    for (int id : xs) {
      require_real(val_of(id), "concat input");
      total += val_of(id).numel();
    }
    Node n;
    n.op = Op::Concat;
    n.parents = xs;
    n.val = Tensor<T>({static_cast<int>(total)}, false);
    bool rg = false;
    std::size_t off = 0;
    for (int id : xs) {
      n.offsets.push_back(off);
      const Tensor<T>& x = val_of(id);
      std::copy(x.re.begin(), x.re.end(), n.val.re.begin() + off);
      off += x.numel();
      rg = rg || needs_grad(id);
    }
    return push(std::move(n), rg);
  }

  void backward(int loss, T seed = T(1)) {
    Node& ln = nodes_.at(loss);
    if (ln.val.numel() != 1 || ln.val.is_complex())
      throw std::invalid_argument("backward: loss must be a real scalar, got " +
                                  shape_str(ln.val.shape));
    if (backward_done_)
      throw std::runtime_error("backward called twice without reset_grads()");
    backward_done_ = true;
    ensure_grad(loss);
    ln.grad.re[0] = seed;
    for (int id = loss; id >= 0; --id) {
      Node& n = nodes_[id];
      if (n.grad.re.empty() || n.op == Op::Leaf) continue;
      backprop(id);
    }
  }

  void reset_grads() {
    for (auto& n : nodes_) n.grad = Tensor<T>();
    backward_done_ = false;
  }

  const Tensor<T>& value(int id) const { return nodes_.at(id).val; }
  bool has_grad(int id) const { return !nodes_.at(id).grad.re.empty(); }
  const Tensor<T>& grad(int id) const {
    const Node& n = nodes_.at(id);
    if (n.grad.re.empty()) throw std::runtime_error("gradient not populated");
    return n.grad;
  }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
  bool backward_done_ = false;

  static T plane_at(const std::vector<T>& plane, std::size_t i) {
    return plane.empty() ? T(0) : plane[i];
  }
  static void require_real(const Tensor<T>& t, const char* what) {
    if (t.is_complex())
      throw std::invalid_argument(std::string(what) + ": complex input not supported");
  }

  int add_leaf(Tensor<T> v, bool rg) {
    Node n;
    n.op = Op::Leaf;
    n.val = std::move(v);
    return push(std::move(n), rg);
  }

  int push(Node n, bool rg) {
    n.requires_grad = rg;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  bool needs_grad(int id) const { return nodes_.at(id).requires_grad; }
  const Tensor<T>& val_of(int id) const { return nodes_.at(id).val; }

  void ensure_grad(int id) {
    Node& n = nodes_[id];
    if (n.grad.re.empty()) n.grad = Tensor<T>(n.val.shape, n.val.is_complex());
  }

  // dst += src elementwise on whichever planes exist in dst
  void accumulate(Tensor<T>& dst, const std::vector<T>& src_re,
                  const std::vector<T>& src_im) {
    kern::add(dst.re.data(), src_re.data(), dst.re.data(), dst.re.size());
    if (dst.is_complex() && !src_im.empty())
      kern::add(dst.im.data(), src_im.data(), dst.im.data(), dst.im.size());
  }

  void backprop(int id) {
    Node& n = nodes_[id];
    const std::vector<T>& gre = n.grad.re;
    const std::vector<T>& gim = n.grad.im;
    switch (n.op) {
      case Op::Matmul:
        backprop_matmul(n);
        break;
      case Op::AddBias: {
        Node& x = nodes_[n.a];
        Node& b = nodes_[n.b];
        const int m = x.val.shape[0], w = x.val.shape[1];
        if (x.requires_grad) {
          ensure_grad(n.a);
          kern::add(x.grad.re.data(), gre.data(), x.grad.re.data(), gre.size());
          if (x.grad.is_complex() && !gim.empty())
            kern::add(x.grad.im.data(), gim.data(), x.grad.im.data(), gim.size());
        }
        if (b.requires_grad) {
          ensure_grad(n.b);
          for (int i = 0; i < m; ++i)
            kern::add(b.grad.re.data(), gre.data() + (std::size_t)i * w,
                      b.grad.re.data(), w);
          if (b.grad.is_complex() && !gim.empty())
            for (int i = 0; i < m; ++i)
              kern::add(b.grad.im.data(), gim.data() + (std::size_t)i * w,
                        b.grad.im.data(), w);
        }
        break;
      }
      case Op::Add: {
        for (int pid : {n.a, n.b}) {
          Node& x = nodes_[pid];
          if (!x.requires_grad) continue;
          ensure_grad(pid);
          kern::add(x.grad.re.data(), gre.data(), x.grad.re.data(), gre.size());
          if (x.grad.is_complex() && !gim.empty())
            kern::add(x.grad.im.data(), gim.data(), x.grad.im.data(), gim.size());
        }
        break;
      }
      case Op::Mul: {
        const Tensor<T>&xv = nodes_[n.a].val, &yv = nodes_[n.b].val;
        const std::size_t cnt = xv.numel();
        auto side = [&](int pid, const Tensor<T>& other) {
          Node& x = nodes_[pid];
          if (!x.requires_grad) return;
          ensure_grad(pid);
          kern::madd(gre.data(), other.re.data(), x.grad.re.data(), cnt);
          if (!gim.empty() && other.is_complex())
            kern::madd(gim.data(), other.im.data(), x.grad.re.data(), cnt);
          if (x.grad.is_complex()) {
            if (other.is_complex())
              kern::msub(gre.data(), other.im.data(), x.grad.im.data(), cnt);
            if (!gim.empty())
              kern::madd(gim.data(), other.re.data(), x.grad.im.data(), cnt);
          }
        };
        side(n.a, yv);
        side(n.b, xv);
        break;
      }
      case Op::Scale: {
        Node& x = nodes_[n.a];
        if (!x.requires_grad) break;
        ensure_grad(n.a);
        const std::size_t cnt = x.val.numel();
        kern::axpy(n.p0, gre.data(), x.grad.re.data(), cnt);
        if (!gim.empty()) kern::axpy(n.p1, gim.data(), x.grad.re.data(), cnt);
        if (x.grad.is_complex()) {
          kern::axpy(-n.p1, gre.data(), x.grad.im.data(), cnt);
          if (!gim.empty()) kern::axpy(n.p0, gim.data(), x.grad.im.data(), cnt);
        }
        break;
      }
      case Op::Ew:
        backprop_ew(n);
        break;
      case Op::RealPart: {
        Node& x = nodes_[n.a];
        if (!x.requires_grad) break;
        ensure_grad(n.a);
        kern::add(x.grad.re.data(), gre.data(), x.grad.re.data(), gre.size());
        break;
      }
      case Op::L2Loss: {
        Node& x = nodes_[n.a];
        if (!x.requires_grad) break;
        ensure_grad(n.a);
        const std::size_t cnt = x.val.numel();
        T coef = T(2) * gre[0] / static_cast<T>(cnt);
        std::vector<T> diff(cnt);
        kern::sub(x.val.re.data(), n.aux.re.data(), diff.data(), cnt);
        kern::axpy(coef, diff.data(), x.grad.re.data(), cnt);
        break;
      }
      case Op::Linear: {
        Node& x = nodes_[n.a];
        if (!x.requires_grad) break;
        ensure_grad(n.a);
        std::vector<double> gy(gre.begin(), gre.end()), gx(n.lin->in_size());
        n.lin->adjoint(gy.data(), gx.data());
        for (std::size_t i = 0; i < gx.size(); ++i)
          x.grad.re[i] += static_cast<T>(gx[i]);
        break;
      }
      case Op::Select: {
        Node& x = nodes_[n.a];
        if (!x.requires_grad) break;
        ensure_grad(n.a);
        x.grad.re[static_cast<std::size_t>(n.b)] += gre[0];
        break;
      }
      case Op::Concat: {
        for (std::size_t j = 0; j < n.parents.size(); ++j) {
          Node& x = nodes_[n.parents[j]];
          if (!x.requires_grad) continue;
          ensure_grad(n.parents[j]);
          const std::size_t off = n.offsets[j], cnt = x.val.numel();
          for (std::size_t i = 0; i < cnt; ++i) x.grad.re[i] += gre[off + i];
        }
        break;
      }
      case Op::Leaf:
        break;
    }
  }

  void backprop_matmul(Node& n) {
    Node& A = nodes_[n.a];
    Node& B = nodes_[n.b];
    const int m = A.val.shape[0], k = A.val.shape[1], nn = B.val.shape[1];
    const std::vector<T>& gre = n.grad.re;
    const std::vector<T>& gim = n.grad.im;
    const T* gr = gre.data();
    const T* gi = gim.empty() ? nullptr : gim.data();

    using kern::Accum;
    if (A.requires_grad) {
      // dA_re += Gre Br^T + Gim Bi^T ; dA_im += Gim Br^T - Gre Bi^T
      // (that is dA += G conj(B)^T, written as direct accumulating products)
      std::vector<T> btr((std::size_t)k * nn), bti;
      kern::transpose(B.val.re.data(), btr.data(), k, nn);
      if (B.val.is_complex()) {
        bti.resize(btr.size());
        kern::transpose(B.val.im.data(), bti.data(), k, nn);
      }
      ensure_grad(n.a);
      kern::matmul(gr, btr.data(), A.grad.re.data(), m, nn, k, Accum::Add);
      if (gi && !bti.empty())
        kern::matmul(gi, bti.data(), A.grad.re.data(), m, nn, k, Accum::Add);
      if (A.grad.is_complex()) {
        if (gi) kern::matmul(gi, btr.data(), A.grad.im.data(), m, nn, k, Accum::Add);
        if (!bti.empty())
          kern::matmul(gr, bti.data(), A.grad.im.data(), m, nn, k, Accum::Sub);
      }
    }
    if (B.requires_grad) {
      // dB_re += Ar^T Gre + Ai^T Gim ; dB_im += Ar^T Gim - Ai^T Gre
      std::vector<T> atr((std::size_t)k * m), ati;
      kern::transpose(A.val.re.data(), atr.data(), m, k);
      if (A.val.is_complex()) {
        ati.resize(atr.size());
        kern::transpose(A.val.im.data(), ati.data(), m, k);
      }
      ensure_grad(n.b);
      kern::matmul(atr.data(), gr, B.grad.re.data(), k, m, nn, Accum::Add);
      if (gi && !ati.empty())
        kern::matmul(ati.data(), gi, B.grad.re.data(), k, m, nn, Accum::Add);
      if (B.grad.is_complex()) {
        if (gi) kern::matmul(atr.data(), gi, B.grad.im.data(), k, m, nn, Accum::Add);
        if (!ati.empty())
          kern::matmul(ati.data(), gr, B.grad.im.data(), k, m, nn, Accum::Sub);
      }
    }
  }

  void backprop_ew(Node& n) {
    Node& x = nodes_[n.a];
    if (!x.requires_grad) return;
    ensure_grad(n.a);
    const std::vector<T>& gre = n.grad.re;
    const std::vector<T>& gim = n.grad.im;
    const std::size_t cnt = x.val.numel();
    switch (n.func) {
      case Func::Exp:
        if (x.val.is_complex()) {
          kern::madd(gre.data(), n.val.re.data(), x.grad.re.data(), cnt);
          kern::msub(gre.data(), n.val.im.data(), x.grad.im.data(), cnt);
          if (!gim.empty()) {
            kern::madd(gim.data(), n.val.im.data(), x.grad.re.data(), cnt);
            kern::madd(gim.data(), n.val.re.data(), x.grad.im.data(), cnt);
          }
        } else {
          kern::madd(gre.data(), n.val.re.data(), x.grad.re.data(), cnt);
        }
        break;
      case Func::SquareMagnitude: {
        std::vector<T> g2(cnt);
        kern::scale(gre.data(), T(2), g2.data(), cnt);
        kern::madd(g2.data(), x.val.re.data(), x.grad.re.data(), cnt);
        if (x.grad.is_complex())
          kern::madd(g2.data(), x.val.im.data(), x.grad.im.data(), cnt);
        break;
      }
      case Func::Sin:
        kern::madd(n.aux.re.data(), gre.data(), x.grad.re.data(), cnt);
        break;
      case Func::Cos:
        kern::msub(n.aux.re.data(), gre.data(), x.grad.re.data(), cnt);
        break;
      case Func::Gabor: {
        // with E = |psi|: d(re)/da = -2 s0^2 a re - w0 im, d(im)/da = -2 s0^2 a im + w0 re,
        // d(.)/db = (-w0 - 2 s0^2 b) * (.)
        const T w0 = n.p0, s0 = n.p1;
        const T* a = x.val.re.data();
        const T* b = x.val.is_complex() ? x.val.im.data() : nullptr;
        std::vector<T> p(cnt), q(cnt), tmp(cnt);
        kern::mul(gre.data(), n.val.re.data(), p.data(), cnt);  // p = gre*ore + gim*oim
        std::fill(q.begin(), q.end(), T(0));
        kern::msub(gre.data(), n.val.im.data(), q.data(), cnt);  // q = gim*ore - gre*oim
        if (!gim.empty()) {
          kern::madd(gim.data(), n.val.im.data(), p.data(), cnt);
          kern::madd(gim.data(), n.val.re.data(), q.data(), cnt);
        }
        kern::mul(a, p.data(), tmp.data(), cnt);
        kern::axpy(T(-2) * s0 * s0, tmp.data(), x.grad.re.data(), cnt);
        kern::axpy(w0, q.data(), x.grad.re.data(), cnt);
        if (x.grad.is_complex()) {
          kern::axpy(-w0, p.data(), x.grad.im.data(), cnt);
          kern::mul(b, p.data(), tmp.data(), cnt);
          kern::axpy(T(-2) * s0 * s0, tmp.data(), x.grad.im.data(), cnt);
        }
        break;
      }
      case Func::Relu: {
        const T* xv = x.val.re.data();
        T* gx = x.grad.re.data();
        const T* g = gre.data();
        for (std::size_t i = 0; i < cnt; ++i) gx[i] += xv[i] > T(0) ? g[i] : T(0);
        break;
      }
      default:
        break;
    }
  }
};

}  // namespace wire
