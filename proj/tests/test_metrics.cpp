#include <doctest.h>

#include <cmath>

#include "wire/metrics.hpp"
#include "wire/rng.hpp"
#include "wire/signal.hpp"

using wire::iou;
using wire::psnr;
using wire::ssim;
using wire::Tensor;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("psnr identities") {
  Tensor<double> x({4, 4}, false);
  for (int i = 0; i < 16; ++i) x.re[i] = i / 16.0;
  CHECK(std::isinf(psnr(x, x)));

  // mse = 0.01 -> 20 dB; mse = 1e-4 -> 40 dB
  Tensor<double> y = x;
  for (auto& v : y.re) v += 0.1;
  CHECK(psnr(x, y) == doctest::Approx(20.0).epsilon(1e-12));
  Tensor<double> z = x;
  for (auto& v : z.re) v += 0.01;
  CHECK(psnr(x, z) == doctest::Approx(40.0).epsilon(1e-12));

  CHECK(psnr(x, y) == psnr(y, x));  // symmetry
  CHECK_THROWS_AS(psnr(x, Tensor<double>({2, 2}, false)), std::invalid_argument);
}

TEST_CASE("psnr decreases as noise grows") {
  auto img = wire::synth_signal("natural", {32, 32}, wire::SynthParams{}, 3);
  double prev = 1e9;
  for (double sigma : {0.01, 0.05, 0.1}) {
    wire::Rng rng(11);
    Tensor<double> noisy = img.values;
    for (auto& v : noisy.re) v += sigma * rng.normal();
    double p = psnr(noisy, img.values);
    CHECK(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim identities") {
  auto img = wire::synth_signal("natural", {32, 32}, wire::SynthParams{}, 9);
  CHECK(ssim(img.values, img.values, 32, 32) == doctest::Approx(1.0).epsilon(1e-12));

  // anti-correlated textured image scores poorly
  Tensor<double> inv = img.values;
  for (auto& v : inv.re) v = 1.0 - v;
  CHECK(ssim(img.values, inv, 32, 32) < 0.5);

  CHECK_THROWS_AS(ssim(img.values, img.values, 8, 8), std::invalid_argument);
}

TEST_CASE("ssim of two constants follows the closed-form luminance term") {
  const double mu1 = 0.4, mu2 = 0.5, c1 = 0.01 * 0.01;
  Tensor<double> a({16, 16}, false), b({16, 16}, false);
  for (auto& v : a.re) v = mu1;
  for (auto& v : b.re) v = mu2;
  double want = (2 * mu1 * mu2 + c1) / (mu1 * mu1 + mu2 * mu2 + c1);
  CHECK(ssim(a, b, 16, 16) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("iou identities") {
  Tensor<double> a({4, 4, 4}, false), b({4, 4, 4}, false);
  for (int i = 0; i < 32; ++i) a.re[i] = 1.0;  // first half occupied
  CHECK(iou(a, a) == 1.0);

  for (int i = 32; i < 64; ++i) b.re[i] = 1.0;  // second half occupied
  CHECK(iou(a, b) == 0.0);

  // half-overlapping equal cubes: |A| = |B| = 32, overlap 16 -> 16/48 = 1/3
  Tensor<double> c({4, 4, 4}, false);
  for (int i = 16; i < 48; ++i) c.re[i] = 1.0;
  CHECK(iou(a, c) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(iou(c, a) == iou(a, c));

  Tensor<double> empty({4, 4, 4}, false);
  CHECK(iou(empty, empty) == 1.0);  // empty-union convention

  CHECK_THROWS_AS(iou(a, Tensor<double>({2, 2}, false)), std::invalid_argument);
}

TEST_SUITE_END();
