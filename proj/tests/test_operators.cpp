#include <doctest.h>

#include <cmath>

#include "wire/metrics.hpp"
#include "wire/operators.hpp"
#include "wire/rng.hpp"
#include "wire/signal.hpp"

using wire::ForwardOperator;
using wire::NoiseModel;
using wire::Tensor;
using wire::WarpSpec;

namespace {

Tensor<double> random_image(int h, int w, std::uint64_t seed) {
  Tensor<double> t({h * w, 1}, false);
  wire::Rng rng(seed);
  for (auto& v : t.re) v = rng.uniform();
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("operators");

TEST_CASE("downsample identities") {
  // constant image stays constant
  Tensor<double> c({16 * 16, 1}, false);
  for (auto& v : c.re) v = 0.3;
  auto lo = wire::downsample_image(c, 16, 16, 1, 4);
  CHECK(lo.numel() == 16);
  for (double v : lo.re) CHECK(v == doctest::Approx(0.3).epsilon(1e-15));

  // factor 1 is the identity
  auto same = wire::downsample_image(c, 16, 16, 1, 1);
  CHECK(same.re == std::vector<double>(c.re.begin(), c.re.end()));

  // 4x4 checkerboard -> single pixel 0.5
  Tensor<double> cb({16, 1}, false);
  for (int r = 0; r < 4; ++r)
    for (int col = 0; col < 4; ++col) cb.re[r * 4 + col] = (r + col) % 2;
  auto one = wire::downsample_image(cb, 4, 4, 1, 4);
  CHECK(one.numel() == 1);
  CHECK(one.re[0] == doctest::Approx(0.5));

  CHECK_THROWS_AS(wire::downsample_image(cb, 4, 4, 1, 3), std::invalid_argument);
}

TEST_CASE("warp identities") {
  auto img = random_image(16, 16, 3);

  // zero transform is bit-exact identity
  auto same = wire::warp_image(img, 16, 16, 1, WarpSpec{});
  CHECK(same.re == img.re);

  // integer shift moves interior pixels exactly
  auto shifted = wire::warp_image(img, 16, 16, 1, WarpSpec{1.0, 0.0, 0.0});
  for (int r = 0; r < 16; ++r)
    for (int c = 1; c < 16; ++c)
      CHECK(shifted.re[r * 16 + c] == doctest::Approx(img.re[r * 16 + c - 1]));
}

TEST_CASE("warp then inverse warp recovers a smooth image on the interior") {
  auto smooth = wire::synth_signal("natural", {64, 64}, wire::SynthParams{}, 13).values;
  const double rot = 2.0 * 3.14159265358979323846 / 180.0;
  const double dx = 0.7, dy = -0.4;
  auto fwd = wire::warp_image(smooth, 64, 64, 1, WarpSpec{dx, dy, rot});
  // inverse of [rotate r, then shift s] is rotation -r with shift -R(r)*s
  double inv_dx = -(std::cos(rot) * dx - std::sin(rot) * dy);
  double inv_dy = -(std::sin(rot) * dx + std::cos(rot) * dy);
  auto back = wire::warp_image(fwd, 64, 64, 1, WarpSpec{inv_dx, inv_dy, -rot});

  // interior crop (8px margin)
  Tensor<double> a({48 * 48, 1}, false), b({48 * 48, 1}, false);
  for (int r = 0; r < 48; ++r)
    for (int c = 0; c < 48; ++c) {
      a.re[r * 48 + c] = smooth.re[(r + 8) * 64 + (c + 8)];
      b.re[r * 48 + c] = back.re[(r + 8) * 64 + (c + 8)];
    }
  CHECK(wire::psnr(a, b) > 40.0);
}

TEST_CASE("radon basics") {
  auto angles = wire::uniform_angles(12);

  // all-zero image -> all-zero sinogram
  Tensor<double> zero({32 * 32, 1}, false);
  auto s0 = wire::radon_sinogram(zero, 32, angles, 32);
  for (double v : s0.re) CHECK(v == 0.0);

  CHECK_THROWS_AS(wire::radon_sinogram(zero, 32, {}, 32), std::invalid_argument);

  // centered disk (smooth edge, so pixel aliasing does not mask the
  // operator's rotational symmetry): every projection identical within 1%
  const int s = 64;
  Tensor<double> disk({s * s, 1}, false);
  for (int r = 0; r < s; ++r)
    for (int c = 0; c < s; ++c) {
      double y = r - (s - 1) / 2.0, x = c - (s - 1) / 2.0;
      disk.re[r * s + c] = 0.5 * (1.0 - std::tanh((std::hypot(x, y) - s * 0.3) / 1.5));
    }
  auto sino = wire::radon_sinogram(disk, s, angles, s);
  std::vector<double> ref(sino.re.begin(), sino.re.begin() + s);
  double ref_norm = 0;
  for (double v : ref) ref_norm += v * v;
  for (std::size_t a = 1; a < angles.size(); ++a) {
    double diff = 0;
    for (int d = 0; d < s; ++d) {
      double e = sino.re[a * s + d] - ref[d];
      diff += e * e;
    }
    CHECK(std::sqrt(diff / ref_norm) < 0.01);
  }

  // mass conservation within 1% for an interior-supported image
  double img_mass = 0;
  for (double v : disk.re) img_mass += v;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    double proj_mass = 0;
    for (int d = 0; d < s; ++d) proj_mass += sino.re[a * s + d];
    CHECK(proj_mass == doctest::Approx(img_mass).epsilon(0.01));
  }
}

TEST_CASE("radon of a shifted impulse traces a sinusoid") {
  const int s = 64;
  const int detectors = 64;
  Tensor<double> impulse({s * s, 1}, false);
  const int py = 20, px = 44;  // offset from center
  impulse.re[py * s + px] = 1.0;
  auto angles = wire::uniform_angles(24);
  auto sino = wire::radon_sinogram(impulse, s, angles, detectors);

  const double ctr = (s - 1) / 2.0;
  const double rx = px - ctr, ry = py - ctr;
  for (std::size_t a = 0; a < angles.size(); ++a) {
    int argmax = 0;
    for (int d = 1; d < detectors; ++d)
      if (sino.re[a * detectors + d] > sino.re[a * detectors + argmax]) argmax = d;
    // detector coordinate of the impulse: u = x*cos + y*sin
    double u = rx * std::cos(angles[a]) + ry * std::sin(angles[a]);
    double expect = u / (static_cast<double>(s) / detectors) + (detectors - 1) / 2.0;
    CHECK(std::abs(argmax - expect) <= 1.0);
  }
}

TEST_CASE("noise models") {
  auto img = wire::synth_signal("natural", {16, 16}, wire::SynthParams{}, 2).values;

  auto same = wire::apply_noise(img, NoiseModel::none(), 9);
  CHECK(same.re == img.re);

  // gaussian sigma=0.05: empirical std within 5% at 256^2 samples
  Tensor<double> grey({256 * 256, 1}, false);
  for (auto& v : grey.re) v = 0.5;
  auto noisy = wire::apply_noise(grey, NoiseModel::gaussian(0.05), 123);
  double var = 0;
  for (double v : noisy.re) var += (v - 0.5) * (v - 0.5);
  var /= noisy.numel();
  CHECK(std::sqrt(var) == doctest::Approx(0.05).epsilon(0.05));

  // photon noise reproducible bit for bit, and within the expected psnr band
  auto big = wire::synth_signal("natural", {64, 64}, wire::SynthParams{}, 21).values;
  auto p1 = wire::apply_noise(big, NoiseModel::photon(30, 2), 7);
  auto p2 = wire::apply_noise(big, NoiseModel::photon(30, 2), 7);
  CHECK(p1.re == p2.re);
  double input_psnr = wire::psnr(p1, big);
  CHECK(input_psnr > 14.0);
  CHECK(input_psnr < 21.0);

  Tensor<double> neg({4, 1}, false);
  neg.re[0] = -0.1;
  CHECK_THROWS_AS(wire::apply_noise(neg, NoiseModel::photon(30, 2), 1),
                  std::invalid_argument);
}

TEST_CASE("operator application and measurement stacks") {
  auto img = random_image(16, 16, 5);
  auto ident = ForwardOperator::identity({16, 16});
  auto out = ident.apply_clean(img);
  CHECK(out.re == img.re);

  std::vector<WarpSpec> warps = {{0, 0, 0}, {0.5, 0.25, 0.01}, {-0.3, 0.6, -0.012},
                                 {0.25, -0.5, 0.02}};
  auto multi = ForwardOperator::warp_downsample({16, 16}, warps, 4);
  CHECK(multi.output_dims == wire::Shape{4, 4, 4});
  auto stack = multi.apply_clean(img);
  CHECK(stack.numel() == 4 * 4 * 4);

  CHECK_THROWS_AS(ForwardOperator::warp_downsample({16, 16}, {{5.0, 0, 0}}, 4),
                  std::invalid_argument);

  Tensor<double> wrong({8 * 8, 1}, false);
  CHECK_THROWS_AS(multi.apply_clean(wrong), std::invalid_argument);
}

TEST_CASE("superposition holds for every operator variant") {
  const int s = 32;
  std::vector<ForwardOperator> ops;
  ops.push_back(ForwardOperator::identity({s, s}));
  ops.push_back(ForwardOperator::downsample({s, s}, 4));
  ops.push_back(ForwardOperator::warp_downsample(
      {s, s}, {{0.5, -0.25, 0.02}, {-1.0, 0.75, -0.01}}, 4));
  ops.push_back(ForwardOperator::radon({s, s}, wire::uniform_angles(10), s));

  wire::Rng rng(77);
  for (const auto& op : ops) {
    for (int trial = 0; trial < 20; ++trial) {
      auto a = random_image(s, s, rng.raw());
      auto b = random_image(s, s, rng.raw());
      CHECK(wire::superposition_check(op, a, b, rng.uniform(-2, 2)));
    }
  }
}

TEST_CASE("downsample-of-warp is homogeneous") {
  auto img = random_image(16, 16, 31);
  auto op = ForwardOperator::warp_downsample({16, 16}, {{0.5, 0.5, 0.01}}, 4);
  Tensor<double> scaled = img;
  for (auto& v : scaled.re) v *= 3.25;
  auto y1 = op.apply_clean(scaled);
  auto y2 = op.apply_clean(img);
  for (std::size_t i = 0; i < y1.numel(); ++i)
    CHECK(y1.re[i] == doctest::Approx(3.25 * y2.re[i]).epsilon(1e-12));
}

TEST_CASE("adjoint is the exact transpose") {
  // <A x, y> == <x, A' y> for random vectors
  const int s = 24;
  auto op = ForwardOperator::radon({s, s}, wire::uniform_angles(7), 20);
  wire::Rng rng(3);
  std::vector<double> x(s * s), y(7 * 20), ax(7 * 20), aty(s * s);
  for (auto& v : x) v = rng.uniform(-1, 1);
  for (auto& v : y) v = rng.uniform(-1, 1);
  op.frames[0]->apply(x.data(), ax.data());
  op.frames[0]->adjoint(y.data(), aty.data());
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < ax.size(); ++i) lhs += ax[i] * y[i];
  for (std::size_t i = 0; i < x.size(); ++i) rhs += x[i] * aty[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("bilinear upsample baseline recovers constants") {
  Tensor<double> c({8 * 8, 1}, false);
  for (auto& v : c.re) v = 0.42;
  auto up = wire::bilinear_upsample(c, 8, 8, 4);
  CHECK(up.numel() == 32 * 32);
  for (double v : up.re) CHECK(v == doctest::Approx(0.42));
}

TEST_SUITE_END();
