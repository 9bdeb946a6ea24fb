#include <doctest.h>

#include <complex>
#include <cstring>
#include <functional>
#include <random>
#include <vector>

#include "wire/autodiff.hpp"

using wire::Func;
using wire::Graph;
using wire::Tensor;

namespace {

std::vector<double> randu(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                          double hi = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
  return v;
}

// central finite differences through an arbitrary scalar-valued rebuild
double fd_derivative(std::function<double()> eval, double* slot, double h = 1e-5) {
  double saved = *slot;
  *slot = saved + h;
  double up = eval();
  *slot = saved - h;
  double down = eval();
  *slot = saved;
  return (up - down) / (2 * h);
}

double rel_err(double a, double b) {
  double den = std::max({std::abs(a), std::abs(b), 1e-4});
  return std::abs(a - b) / den;
}

}  // namespace

TEST_SUITE_BEGIN("autodiff");

TEST_CASE("matmul scalar identities") {
  Graph<double> g;
  Tensor<double> a({1, 1}, false), b({1, 1}, false);
  a.re[0] = 1.0;
  b.re[0] = 2.0;
  int c = g.matmul(g.input(a), g.input(b));
  CHECK(g.value(c).re[0] == 2.0);
  CHECK(!g.value(c).is_complex());

  Tensor<double> ja({1, 1}, true), jb({1, 1}, true);
  ja.im[0] = 1.0;
  jb.im[0] = 1.0;
  int jj = g.matmul(g.input(ja), g.input(jb));
  CHECK(g.value(jj).re[0] == -1.0);
  CHECK(g.value(jj).im[0] == 0.0);
}

TEST_CASE("matmul random case matches brute-force complex oracle") {
  std::mt19937_64 rng(42);
  Tensor<double> a({3, 4}, true), b({4, 2}, true);
  a.re = randu(12, rng);
  a.im = randu(12, rng);
  b.re = randu(8, rng);
  b.im = randu(8, rng);

  Graph<double> g;
  int c = g.matmul(g.input(a), g.input(b));

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) {
      std::complex<double> s{0.0, 0.0};
      for (int k = 0; k < 4; ++k)
        s += std::complex<double>(a.re[i * 4 + k], a.im[i * 4 + k]) *
             std::complex<double>(b.re[k * 2 + j], b.im[k * 2 + j]);
      CHECK(g.value(c).re[i * 2 + j] == doctest::Approx(s.real()).epsilon(1e-12));
      CHECK(g.value(c).im[i * 2 + j] == doctest::Approx(s.imag()).epsilon(1e-12));
    }
}

TEST_CASE("matmul shape error names both shapes") {
  Graph<double> g;
  int a = g.input(Tensor<double>({3, 4}, false));
  int b = g.input(Tensor<double>({5, 2}, false));
  CHECK_THROWS_WITH_AS(g.matmul(a, b), doctest::Contains("[3x4]"), std::invalid_argument);
}

TEST_CASE("add_bias broadcast and identities") {
  Graph<double> g;
  Tensor<double> x({2, 2}, false), b({2}, false);
  b.re = {1.0, 2.0};
  int out = g.add_bias(g.input(x), g.input(b));
  CHECK(g.value(out).re == std::vector<double>{1, 2, 1, 2});

  std::mt19937_64 rng(1);
  Tensor<double> y({3, 5}, false);
  y.re = randu(15, rng);
  int keep = g.add_bias(g.input(y), g.input(Tensor<double>({5}, false)));
  CHECK(g.value(keep).re == y.re);  // additive identity

  Tensor<double> br({5}, false);
  br.re = randu(5, rng);
  int r = g.add_bias(g.input(y), g.input(br));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(g.value(r).re[i * 5 + j] == doctest::Approx(y.re[i * 5 + j] + br.re[j]));
}

TEST_CASE("elementwise examples") {
  Graph<double> g;
  Tensor<double> z({1}, true);  // 0 + 0j
  int e = g.elementwise(g.input(z), Func::Exp);
  CHECK(g.value(e).re[0] == 1.0);
  CHECK(g.value(e).im[0] == 0.0);

  Tensor<double> w({1}, true);
  w.re[0] = 3.0;
  w.im[0] = 4.0;
  int sq = g.elementwise(g.input(w), Func::SquareMagnitude);
  CHECK(g.value(sq).re[0] == 25.0);
  CHECK(!g.value(sq).is_complex());

  Tensor<double> x({1}, false);
  x.re[0] = -2.0;
  int r = g.elementwise(g.input(x), Func::Relu);
  CHECK(g.value(r).re[0] == 0.0);

  CHECK_THROWS_AS(g.elementwise(r, static_cast<Func>(99)), std::invalid_argument);
  CHECK_THROWS_AS(g.elementwise(g.input(w), Func::Sin), std::invalid_argument);
}

TEST_CASE("real_part forward and gradient routing") {
  Graph<double> g;
  Tensor<double> z({1}, true);
  z.re[0] = 3.0;
  z.im[0] = 4.0;
  int rp = g.real_part(g.input(z));
  CHECK(g.value(rp).re[0] == 3.0);
  CHECK(!g.value(rp).is_complex());

  // L = real_part(w)^2 at w = 1 + 1j -> dL/dre = 2, dL/dim = 0
  Tensor<double> w({1}, true);
  w.re[0] = 1.0;
  w.im[0] = 1.0;
  Graph<double> g2;
  int wi = g2.param(w);
  int L = g2.elementwise(g2.real_part(wi), Func::SquareMagnitude);
  g2.backward(L);
  CHECK(g2.grad(wi).re[0] == doctest::Approx(2.0));
  CHECK(g2.grad(wi).im[0] == doctest::Approx(0.0));

  // agreement with central finite differences
  auto eval = [&] {
    Graph<double> gg;
    int id = gg.param(w);
    return gg.value(gg.elementwise(gg.real_part(id), Func::SquareMagnitude)).re[0];
  };
  CHECK(rel_err(fd_derivative(eval, &w.re[0]), 2.0) < 1e-6);
  CHECK(std::abs(fd_derivative(eval, &w.im[0])) < 1e-9);
}

TEST_CASE("l2_loss examples") {
  std::mt19937_64 rng(9);
  Tensor<double> p({4, 3}, false);
  p.re = randu(12, rng);

  Graph<double> g;
  int ip = g.input(p);
  CHECK(g.value(g.l2_loss(ip, p)).re[0] == 0.0);

  Tensor<double> t = p;
  for (auto& v : t.re) v += 1.0;
  CHECK(g.value(g.l2_loss(ip, t)).re[0] == doctest::Approx(1.0));

  Tensor<double> t2({4, 3}, false);
  t2.re = randu(12, rng);
  double acc = 0;
  for (int i = 0; i < 12; ++i) acc += (p.re[i] - t2.re[i]) * (p.re[i] - t2.re[i]);
  CHECK(g.value(g.l2_loss(ip, t2)).re[0] == doctest::Approx(acc / 12).epsilon(1e-14));

  CHECK_THROWS_AS(g.l2_loss(ip, Tensor<double>({2, 2}, false)), std::invalid_argument);
}

TEST_CASE("backward basics: re(w) and |w|^2") {
  Tensor<double> w({1}, true);  // w = 0
  Graph<double> g;
  int wi = g.param(w);
  g.backward(g.real_part(wi));
  CHECK(g.grad(wi).re[0] == 1.0);
  CHECK(g.grad(wi).im[0] == 0.0);

  Tensor<double> w2({1}, true);
  w2.re[0] = 1.0;
  w2.im[0] = 2.0;
  Graph<double> g2;
  int wi2 = g2.param(w2);
  g2.backward(g2.elementwise(wi2, Func::SquareMagnitude));
  CHECK(g2.grad(wi2).re[0] == doctest::Approx(2.0));
  CHECK(g2.grad(wi2).im[0] == doctest::Approx(4.0));
}

namespace {

// hand-assembled two-layer network with the complex wavelet activation,
// exercised end to end against finite differences
struct TinyComplexNet {
  Tensor<double> w1{{2, 3}, true}, b1{{3}, true};
  Tensor<double> w2{{3, 1}, true}, b2{{1}, true};
  Tensor<double> coords{{5, 2}, false};
  Tensor<double> target{{5, 1}, false};
  double omega0 = 7.0, sigma0 = 2.0;

  struct Built {
    Graph<double> g;
    int w1_id, b1_id, w2_id, b2_id, loss;
  };

  void build(Built& r) const {
    auto& g = r.g;
    int x = g.input(coords);
    r.w1_id = g.param(w1);
    r.b1_id = g.param(b1);
    r.w2_id = g.param(w2);
    r.b2_id = g.param(b2);
    int z = g.add_bias(g.matmul(x, r.w1_id), r.b1_id);
    int rot = g.scale(z, 0.0, omega0);  // j*omega0*z
    int env = g.scale(g.elementwise(z, Func::SquareMagnitude), -sigma0 * sigma0);
    int act = g.elementwise(g.add(rot, env), Func::Exp);
    int out = g.real_part(g.add_bias(g.matmul(act, r.w2_id), r.b2_id));
    r.loss = g.l2_loss(out, target);
  }

  double loss_value() const {
    Built r;
    build(r);
    return r.g.value(r.loss).re[0];
  }
};

void randomize(TinyComplexNet& net, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  net.w1.re = randu(6, rng);
  net.w1.im = randu(6, rng);
  net.b1.re = randu(3, rng);
  net.b1.im = randu(3, rng);
  net.w2.re = randu(3, rng);
  net.w2.im = randu(3, rng);
  net.b2.re = randu(1, rng);
  net.b2.im = randu(1, rng);
  net.coords.re = randu(10, rng);
  net.target.re = randu(5, rng);
}

}  // namespace

TEST_CASE("full complex network: every parameter passes finite differences") {
  TinyComplexNet net;
  randomize(net, 77);

  TinyComplexNet::Built built;
  net.build(built);
  built.g.backward(built.loss);

  auto check_tensor = [&](Tensor<double>& src, int id) {
    const Tensor<double>& ad = built.g.grad(id);
    for (std::size_t i = 0; i < src.numel(); ++i) {
      double fd = fd_derivative([&] { return net.loss_value(); }, &src.re[i]);
      CHECK(rel_err(ad.re[i], fd) < 1e-4);
      fd = fd_derivative([&] { return net.loss_value(); }, &src.im[i]);
      CHECK(rel_err(ad.im[i], fd) < 1e-4);
    }
  };
  check_tensor(net.w1, built.w1_id);
  check_tensor(net.b1, built.b1_id);
  check_tensor(net.w2, built.w2_id);
  check_tensor(net.b2, built.b2_id);
}

TEST_CASE("linearity: backward of alpha*L scales gradients") {
  TinyComplexNet net;
  randomize(net, 5);

  TinyComplexNet::Built a, b;
  net.build(a);
  a.g.backward(a.loss);
  net.build(b);
  b.g.backward(b.g.scale(b.loss, 3.5));
  for (std::size_t i = 0; i < net.w1.numel(); ++i) {
    CHECK(b.g.grad(b.w1_id).re[i] == doctest::Approx(3.5 * a.g.grad(a.w1_id).re[i]));
    CHECK(b.g.grad(b.w1_id).im[i] == doctest::Approx(3.5 * a.g.grad(a.w1_id).im[i]));
  }
}

TEST_CASE("determinism: identical builds give bit-identical values and gradients") {
  TinyComplexNet net;
  randomize(net, 11);

  TinyComplexNet::Built a, b;
  net.build(a);
  a.g.backward(a.loss);
  net.build(b);
  b.g.backward(b.loss);
  CHECK(a.g.value(a.loss).re[0] == b.g.value(b.loss).re[0]);
  CHECK(a.g.grad(a.w1_id).re == b.g.grad(b.w1_id).re);
  CHECK(a.g.grad(a.w1_id).im == b.g.grad(b.w1_id).im);
}

TEST_CASE("real closure: real leaves and real ops never grow imaginary parts") {
  std::mt19937_64 rng(3);
  Graph<double> g;
  Tensor<double> x({4, 3}, false), w({3, 2}, false), b({2}, false);
  x.re = randu(12, rng);
  w.re = randu(6, rng);
  b.re = randu(2, rng);
  int wi = g.param(w);
  int z = g.add_bias(g.matmul(g.input(x), wi), g.param(b));
  int s = g.elementwise(z, Func::Sin);
  int e = g.elementwise(g.scale(g.elementwise(z, Func::SquareMagnitude), -1.0), Func::Exp);
  int out = g.mul(s, e);
  CHECK(!g.value(z).is_complex());
  CHECK(!g.value(out).is_complex());
  g.backward(g.l2_loss(out, Tensor<double>({4, 2}, false)));
  CHECK(!g.grad(wi).is_complex());
}

TEST_CASE("backward twice without reset is an error; reset allows rerun") {
  Tensor<double> w({1}, true);
  w.re[0] = 0.5;
  Graph<double> g;
  int wi = g.param(w);
  int L = g.elementwise(wi, Func::SquareMagnitude);
  g.backward(L);
  CHECK_THROWS_AS(g.backward(L), std::runtime_error);
  g.reset_grads();
  g.backward(L);
  CHECK(g.grad(wi).re[0] == doctest::Approx(1.0));

  Graph<double> g2;
  int a = g2.input(Tensor<double>({2, 2}, false));
  CHECK_THROWS_AS(g2.backward(a), std::invalid_argument);  // non-scalar loss
}

TEST_SUITE_END();
