#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "wire/io.hpp"
#include "wire/signal.hpp"

using wire::make_grid;
using wire::SignalGrid;
using wire::synth_signal;
using wire::SynthParams;
using wire::Tensor;

TEST_SUITE_BEGIN("signal_io");

TEST_CASE("grid basics") {
  auto g = make_grid({3});
  CHECK(g.coords.re == std::vector<double>{-1.0, 0.0, 1.0});

  auto g2 = make_grid({2, 2});
  CHECK(g2.coords.shape == wire::Shape{4, 2});
  CHECK(g2.coords.re == std::vector<double>{-1, -1, -1, 1, 1, -1, 1, 1});

  auto g3 = make_grid({5, 7});
  CHECK(g3.coords.shape == wire::Shape{35, 2});
  double min0 = 1e9, max0 = -1e9, min1 = 1e9, max1 = -1e9;
  for (int i = 0; i < 35; ++i) {
    min0 = std::min(min0, g3.coords.re[i * 2]);
    max0 = std::max(max0, g3.coords.re[i * 2]);
    min1 = std::min(min1, g3.coords.re[i * 2 + 1]);
    max1 = std::max(max1, g3.coords.re[i * 2 + 1]);
  }
  CHECK(min0 == -1.0);
  CHECK(max0 == 1.0);
  CHECK(min1 == -1.0);
  CHECK(max1 == 1.0);

  // uniform spacing within 1e-12
  auto g4 = make_grid({9});
  for (int i = 1; i < 9; ++i)
    CHECK(std::abs((g4.coords.re[i] - g4.coords.re[i - 1]) - 0.25) < 1e-12);

  // single-sample axes pinned at 0
  auto g5 = make_grid({1, 3});
  for (int i = 0; i < 3; ++i) CHECK(g5.coords.re[i * 2] == 0.0);

  CHECK_THROWS_AS(make_grid({0}), std::invalid_argument);
}

TEST_CASE("pgm round trip is byte-identical") {
  SignalGrid img;
  img.dims = {5, 7};
  img.channels = 1;
  img.values = Tensor<double>({35, 1}, false);
  for (int i = 0; i < 35; ++i) img.values.re[i] = (i * 7 % 256) / 255.0;

  wire::save_image(img, "t_rt.pgm");
  auto back = wire::load_image("t_rt.pgm");
  CHECK(back.dims == img.dims);
  CHECK(back.channels == 1);
  wire::save_image(back, "t_rt2.pgm");

  std::ifstream a("t_rt.pgm", std::ios::binary), b("t_rt2.pgm", std::ios::binary);
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  std::remove("t_rt.pgm");
  std::remove("t_rt2.pgm");
}

TEST_CASE("ppm all-255 and known 2x2 bytes") {
  {
    std::ofstream os("t_w.ppm", std::ios::binary);
    os << "P6\n2 1\n255\n";
    unsigned char bytes[6] = {255, 255, 255, 255, 255, 255};
    os.write(reinterpret_cast<char*>(bytes), 6);
  }
  auto img = wire::load_image("t_w.ppm");
  CHECK(img.channels == 3);
  for (double v : img.values.re) CHECK(v == 1.0);
  std::remove("t_w.ppm");

  {
    std::ofstream os("t_k.pgm", std::ios::binary);
    os << "P5\n# a comment\n2 2\n255\n";
    unsigned char bytes[4] = {0, 51, 102, 255};
    os.write(reinterpret_cast<char*>(bytes), 4);
  }
  auto k = wire::load_image("t_k.pgm");
  CHECK(k.values.re[0] == 0.0);
  CHECK(k.values.re[1] == doctest::Approx(51.0 / 255.0));
  CHECK(k.values.re[2] == doctest::Approx(102.0 / 255.0));
  CHECK(k.values.re[3] == 1.0);
  std::remove("t_k.pgm");

  {
    std::ofstream os("t_bad.pgm", std::ios::binary);
    os << "P5\n2 2\n65535\n";
    os << "aaaaaaaa";
  }
  CHECK_THROWS_AS(wire::load_image("t_bad.pgm"), std::runtime_error);
  std::remove("t_bad.pgm");
}

TEST_CASE("tensor container round trip, bad magic, scalar") {
  Tensor<double> t({3, 4}, false);
  for (int i = 0; i < 12; ++i) t.re[i] = 0.1 * i - 0.37;
  wire::save_tensor(t, "t_c.bin");
  auto back = wire::load_tensor("t_c.bin");
  CHECK(back.shape == t.shape);
  CHECK(back.re == t.re);

  Tensor<double> scalar({}, false);
  scalar.re = {2.5};
  // zero-dim tensor has numel 1
  REQUIRE(scalar.numel() == 1);
  wire::save_tensor(scalar, "t_s.bin");
  auto s2 = wire::load_tensor("t_s.bin");
  CHECK(s2.shape.empty());
  CHECK(s2.re[0] == 2.5);

  {
    std::ofstream os("t_c.bin", std::ios::binary);
    os << "WRONGMAG000000000";
  }
  CHECK_THROWS_AS(wire::load_tensor("t_c.bin"), std::runtime_error);
  std::remove("t_c.bin");
  std::remove("t_s.bin");
}

TEST_CASE("synthetic signals") {
  SynthParams p;
  p.radius = 0.0;
  auto sphere0 = synth_signal("sphere_occupancy", {8, 8, 8}, p, 1);
  for (double v : sphere0.values.re) CHECK(v == 0.0);

  p.radius = 0.6;
  auto sphere = synth_signal("sphere_occupancy", {16, 16, 16}, p, 1);
  double occupied = 0;
  for (double v : sphere.values.re) {
    CHECK((v == 0.0 || v == 1.0));
    occupied += v;
  }
  CHECK(occupied > 0);

  SynthParams pf;
  pf.count = 256;
  auto points = synth_signal("point_field", {256, 256}, pf, 7);
  double ones = 0;
  for (double v : points.values.re) {
    CHECK((v == 0.0 || v == 1.0));
    ones += v;
  }
  CHECK(ones == 256.0);

  auto star = synth_signal("siemens_star", {32, 32}, SynthParams{}, 1);
  for (double v : star.values.re) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  auto phantom = synth_signal("shepp_logan", {64, 64}, SynthParams{}, 1);
  double mass = 0;
  for (double v : phantom.values.re) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    mass += v;
  }
  CHECK(mass > 0);

  auto nat = synth_signal("natural", {64, 64}, SynthParams{}, 5);
  for (double v : nat.values.re) {
    CHECK(v >= 0.05);
    CHECK(v <= 0.95);
  }

  // purity: identical arguments give identical signals
  auto nat2 = synth_signal("natural", {64, 64}, SynthParams{}, 5);
  CHECK(nat.values.re == nat2.values.re);
  auto nat3 = synth_signal("natural", {64, 64}, SynthParams{}, 6);
  CHECK(nat.values.re != nat3.values.re);

  CHECK_THROWS_AS(synth_signal("nope", {8, 8}, SynthParams{}, 1), std::invalid_argument);
}

TEST_CASE("trace csv shape") {
  std::vector<wire::TraceRow> rows(2);
  rows[0].step = 0;
  rows[0].loss = 0.5;
  rows[0].psnr = 3.0103;
  rows[0].has_psnr = true;
  rows[1].step = 1;
  rows[1].loss = 0.25;
  wire::write_trace_csv("t_tr.csv", rows);
  std::ifstream is("t_tr.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,wall_time_s,lr,loss,psnr,ssim");
  std::getline(is, line);
  CHECK(line.substr(0, 2) == "0,");
  CHECK(line.find("3.0103") != std::string::npos);
  std::remove("t_tr.csv");
}

TEST_SUITE_END();
