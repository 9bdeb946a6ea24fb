#include <doctest.h>

#include <cmath>
#include <random>

#include "wire/linalg.hpp"
#include "wire/metrics.hpp"
#include "wire/ntk.hpp"
#include "wire/rng.hpp"
#include "wire/signal.hpp"

using wire::ActivationKind;
using wire::InrModel;
using wire::ModelConfig;
using wire::NtkFlow;
using wire::NtkMatrix;
using wire::Tensor;

namespace {

ModelConfig ntk_model_cfg(ActivationKind act, int features = 8, int in_dim = 2) {
  ModelConfig c;
  c.input_dim = in_dim;
  c.output_dim = 1;
  c.hidden_layers = 2;
  c.hidden_features = features;
  c.activation = act;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("ntk");

TEST_CASE("eigen_symmetric: analytic 2x2") {
  std::vector<double> a = {2, 1, 1, 2};
  std::vector<double> w;
  wire::eigen_symmetric(a, w, 2);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(3.0).epsilon(1e-14));
  // eigenvector for 3 is (1,1)/sqrt(2) up to sign
  CHECK(std::abs(a[0 * 2 + 1]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(a[0 * 2 + 1] == doctest::Approx(a[1 * 2 + 1]).epsilon(1e-12));
}

TEST_CASE("eigen_symmetric: random matrix reconstructs and is orthonormal") {
  const int n = 40;
  wire::Rng rng(5);
  std::vector<double> a(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      a[i * n + j] = a[j * n + i] = rng.uniform(-1, 1);
  std::vector<double> orig = a, w;
  wire::eigen_symmetric(a, w, n);

  for (int j = 1; j < n; ++j) CHECK(w[j - 1] <= w[j]);  // ascending

  // U^T U = I
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double dot = 0;
      for (int k = 0; k < n; ++k) dot += a[k * n + i] * a[k * n + j];
      CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }

  // A = U diag(w) U^T
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0;
      for (int k = 0; k < n; ++k) acc += a[i * n + k] * w[k] * a[j * n + k];
      CHECK(std::abs(acc - orig[i * n + j]) < 1e-9);
    }
}

TEST_CASE("empirical ntk: single coordinate gives a positive 1x1 gram") {
  auto model = InrModel<double>::build(ntk_model_cfg(ActivationKind::wire(7, 3)));
  Tensor<double> one({1, 2}, false);
  one.re = {0.3, -0.2};
  auto k = wire::empirical_ntk(model, one);
  CHECK(k.p == 1);
  CHECK(k.k[0] > 0.0);
}

TEST_CASE("empirical ntk: duplicated coordinates give identical entries") {
  auto model = InrModel<double>::build(ntk_model_cfg(ActivationKind::gauss(4)));
  Tensor<double> coords({3, 2}, false);
  coords.re = {0.5, 0.1, 0.5, 0.1, -0.4, 0.9};  // rows 0 and 1 identical
  auto k = wire::empirical_ntk(model, coords);
  CHECK(k.k[0 * 3 + 0] == k.k[1 * 3 + 1]);
  CHECK(k.k[0 * 3 + 0] == k.k[0 * 3 + 1]);
}

TEST_CASE("empirical ntk matches a finite-difference jacobian oracle") {
  auto cfg = ntk_model_cfg(ActivationKind::wire(5, 2), 2, 1);
  cfg.hidden_layers = 1;
  auto model = InrModel<double>::build(cfg);
  Tensor<double> coords({3, 1}, false);
  coords.re = {-0.7, 0.1, 0.8};
  auto k = wire::empirical_ntk(model, coords);

  // finite-difference jacobian over every real parameter coordinate
  const double h = 1e-6;
  auto params = model.parameters();
  std::vector<std::vector<double>> jac(3);
  for (auto* p : params) {
    for (auto* plane : {&p->re, &p->im}) {
      if (plane->empty()) continue;
      for (auto& slot : *plane) {
        double saved = slot;
        slot = saved + h;
        auto up = model.forward(coords);
        slot = saved - h;
        auto dn = model.forward(coords);
        slot = saved;
        for (int r = 0; r < 3; ++r)
          jac[r].push_back((up.re[r] - dn.re[r]) / (2 * h));
      }
    }
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (std::size_t q = 0; q < jac[i].size(); ++q) acc += jac[i][q] * jac[j][q];
      CHECK(k.k[i * 3 + j] == doctest::Approx(acc).epsilon(1e-5));
    }
}

TEST_CASE("kernel is symmetric psd for every activation kind") {
  const std::vector<ActivationKind> kinds = {
      ActivationKind::wire(7, 3),      ActivationKind::wire_real(7, 3),
      ActivationKind::wire2d(7, 3, 2), ActivationKind::constant_q(21, 7),
      ActivationKind::siren(9),        ActivationKind::gauss(4),
      ActivationKind::relu_pe(3)};
  auto grid = wire::make_grid({3, 3});
  for (const auto& act : kinds) {
    CAPTURE(act.name());
    auto model = InrModel<double>::build(ntk_model_cfg(act));
    auto k = wire::empirical_ntk(model, grid.coords);
    double max_asym = 0;
    for (int i = 0; i < k.p; ++i)
      for (int j = 0; j < k.p; ++j)
        max_asym = std::max(max_asym,
                            std::abs(k.k[i * k.p + j] - k.k[j * k.p + i]));
    CHECK(max_asym <= 1e-8);
    auto flow = NtkFlow::from(k);  // throws if not psd within tolerance
    CHECK(flow.eigvals.back() > 0.0);
  }
}

TEST_CASE("cap exceeded raises an error naming the cap") {
  auto model = InrModel<double>::build(ntk_model_cfg(ActivationKind::gauss(4)));
  auto grid = wire::make_grid({5, 5});
  CHECK_THROWS_WITH_AS(wire::empirical_ntk(model, grid.coords, 16),
                       doctest::Contains("16"), std::runtime_error);
}

TEST_CASE("flow endpoints: zeros at t=0, the target as t grows") {
  // full-rank kernel from a random jacobian
  const int p = 12;
  wire::Rng rng(3);
  std::vector<double> j(p * 40);
  for (auto& v : j) v = rng.uniform(-1, 1);
  NtkMatrix k;
  k.p = p;
  k.k.assign(p * p, 0.0);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < p; ++b) {
      double acc = 0;
      for (int q = 0; q < 40; ++q) acc += j[a * 40 + q] * j[b * 40 + q];
      k.k[a * p + b] = acc;
    }
  std::vector<double> g(p);
  for (auto& v : g) v = rng.uniform(-1, 1);

  auto flow = NtkFlow::from(k);
  auto zero = flow.predict(g, 0.0);
  for (double v : zero) CHECK(std::abs(v) < 1e-12);

  double lam_min = flow.eigvals.front();
  REQUIRE(lam_min > 0.0);
  auto full = flow.predict(g, 20.0 / lam_min);
  double num = 0, den = 0;
  for (int i = 0; i < p; ++i) {
    num += (full[i] - g[i]) * (full[i] - g[i]);
    den += g[i] * g[i];
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("rank-deficient kernel never fits the null-space component") {
  // K = u u^T, so anything orthogonal to u is in the null space
  const int p = 3;
  std::vector<double> u = {0.6, -0.8, 0.0};
  NtkMatrix k;
  k.p = p;
  k.k.assign(p * p, 0.0);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) k.k[i * p + j] = u[i] * u[j];
  std::vector<double> v = {0.8, 0.6, 0.0};  // orthogonal to u
  std::vector<double> g = {0.3, 0.9, -0.5};

  auto flow = NtkFlow::from(k);
  for (double t : {0.1, 1.0, 100.0, 1e6}) {
    auto pred = flow.predict(g, t);
    double along_v = 0, along_z = pred[2];
    for (int i = 0; i < p; ++i) along_v += pred[i] * v[i];
    CHECK(std::abs(along_v) < 1e-9);
    CHECK(std::abs(along_z) < 1e-9);
  }
}

TEST_CASE("per-eigencomponent progress is monotone in t") {
  auto model = InrModel<double>::build(ntk_model_cfg(ActivationKind::wire(7, 3)));
  auto grid = wire::make_grid({3, 3});
  auto k = wire::empirical_ntk(model, grid.coords);
  auto flow = NtkFlow::from(k);
  wire::Rng rng(9);
  std::vector<double> g(flow.p);
  for (auto& v : g) v = rng.uniform(-1, 1);

  std::vector<double> prev(flow.p, 0.0);
  for (double t : {0.0, 0.01, 0.1, 1.0, 10.0, 1000.0}) {
    auto pred = flow.predict(g, t);
    for (int j = 0; j < flow.p; ++j) {
      double proj = 0;
      for (int i = 0; i < flow.p; ++i) proj += flow.eigvecs[i * flow.p + j] * pred[i];
      CHECK(std::abs(proj) >= prev[j] - 1e-12);
      prev[j] = std::abs(proj);
    }
  }
}

TEST_CASE("denoising trajectory endpoints") {
  auto model = InrModel<double>::build(ntk_model_cfg(ActivationKind::wire(7, 3), 12));
  auto grid = wire::make_grid({4, 4});
  auto img = wire::synth_signal("natural", {4, 4}, wire::SynthParams{}, 7);
  wire::Rng rng(13);
  std::vector<double> clean = img.values.re, noisy = clean;
  for (auto& v : noisy) v += 0.05 * rng.normal();

  auto k = wire::empirical_ntk(model, grid.coords);
  auto flow = NtkFlow::from(k);
  REQUIRE(flow.eigvals.front() > 0.0);  // generically full rank here

  auto traj = wire::denoising_trajectory(
      flow, clean, noisy, {0.0, 20.0 / flow.eigvals.front()});

  Tensor<double> zeros({flow.p}, false), ref({flow.p}, false), noisy_t({flow.p}, false);
  ref.re = clean;
  noisy_t.re = noisy;
  CHECK(traj[0].psnr == doctest::Approx(wire::psnr(zeros, ref)).epsilon(1e-12));
  CHECK(traj[1].psnr == doctest::Approx(wire::psnr(noisy_t, ref)).epsilon(1e-6));
}

TEST_SUITE_END();
