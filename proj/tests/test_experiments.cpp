#include <doctest.h>

#include <complex>
#include <filesystem>
#include <fstream>

#include "wire/activations.hpp"
#include "wire/experiments.hpp"
#include "wire/io.hpp"
#include "wire/model.hpp"
#include "wire/signal.hpp"

using nlohmann::json;
using wire::ExperimentConfig;
using wire::parse_config;
using wire::run_experiment;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

json base_fit_config(const std::string& out) {
  json j;
  j["task"] = "fit";
  j["model"] = {{"hidden_layers", 2}, {"hidden_features", 16}, {"activation", "wire"}};
  j["train"] = {{"steps", 30}, {"seed", 3}, {"lr", 0.01}};
  j["io"] = {{"synth", {{"kind", "natural"}, {"dims", {16, 16}}, {"seed", 7}}},
             {"out", out}};
  return j;
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(fs::path("tmp_test") / name) {
    fs::remove_all(path);
  }
  ~TmpDir() { fs::remove_all(path.parent_path()); }
};

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("strict config parsing rejects unknown keys with a path") {
  json j = base_fit_config("x");
  j["model"]["bogus_key"] = 1;
  CHECK_THROWS_WITH_AS(parse_config(j), doctest::Contains("model.bogus_key"),
                       std::invalid_argument);

  json j2 = base_fit_config("x");
  j2["task"] = "unknown";
  CHECK_THROWS_AS(parse_config(j2), std::invalid_argument);

  json j3 = base_fit_config("x");
  wire::apply_override(j3, "train.lr=0.5");
  wire::apply_override(j3, "model.activation=gauss");
  auto cfg = parse_config(j3);
  CHECK(cfg.train.lr == 0.5);
  CHECK(cfg.model.activation == "gauss");
}

TEST_CASE("fit writes a report with finite psnr and all artifacts") {
  TmpDir dir("fit");
  auto cfg = parse_config(base_fit_config((dir.path).string()));
  json report = run_experiment(cfg);
  CHECK(report["metrics"]["psnr_db"].is_number());
  CHECK(report["metrics"]["psnr_db"].get<double>() > 5.0);
  for (const char* f : {"report.json", "trace.csv", "recon.pgm", "checkpoint.bin"})
    CHECK(fs::exists(dir.path / f));

  // the embedded config carries resolved defaults
  CHECK(report["config"]["train"]["lr"] == 0.01);
  CHECK(report["config"]["model"]["omega0"] == 20.0);
  CHECK(!report["config"]["io"].contains("out"));
}

TEST_CASE("zero steps reports the initial model evaluation") {
  TmpDir dir("fit0");
  json j = base_fit_config(dir.path.string());
  j["train"]["steps"] = 0;
  auto cfg = parse_config(j);
  json report = run_experiment(cfg);

  auto img = wire::synth_signal("natural", {16, 16}, wire::SynthParams{}, 7);
  auto grid = wire::make_grid({16, 16});
  auto model = wire::InrModel<float>::build(cfg.model_config(2, 1));
  auto out = model.forward(grid.coords.cast<float>()).cast<double>();
  out.shape = img.values.shape;
  CHECK(report["metrics"]["psnr_db"].get<double>() ==
        doctest::Approx(wire::psnr(out, img.values)).epsilon(1e-12));
}

TEST_CASE("identical config and seed produce byte-identical artifacts") {
  TmpDir dir("det");
  json j1 = base_fit_config((dir.path / "a").string());
  json j2 = base_fit_config((dir.path / "b").string());
  run_experiment(parse_config(j1));
  run_experiment(parse_config(j2));
  CHECK(slurp(dir.path / "a" / "report.json") == slurp(dir.path / "b" / "report.json"));
  CHECK(slurp(dir.path / "a" / "recon.pgm") == slurp(dir.path / "b" / "recon.pgm"));
  CHECK(slurp(dir.path / "a" / "checkpoint.bin") == slurp(dir.path / "b" / "checkpoint.bin"));
}

TEST_CASE("denoise with no noise degenerates to fit") {
  TmpDir dir("deg");
  json jf = base_fit_config((dir.path / "fit").string());
  json jd = base_fit_config((dir.path / "den").string());
  jd["task"] = "denoise";
  jd["operator"] = {{"noise", "none"}};
  jd["train"]["lr"] = 0.01;  // keep the task-default lr out of the comparison

  json rf = run_experiment(parse_config(jf));
  json rd = run_experiment(parse_config(jd));
  double pf = rf["metrics"]["psnr_db"].get<double>();
  double pd = rd["metrics"]["psnr_db"].get<double>();
  CHECK(pd == doctest::Approx(pf).epsilon(1e-12));  // identical pipeline
}

TEST_CASE("multisr records the measurement stack shape") {
  TmpDir dir("msr");
  json j = base_fit_config(dir.path.string());
  j["task"] = "multisr";
  j["io"]["synth"]["dims"] = {32, 32};
  j["train"]["steps"] = 5;
  j["operator"] = {{"factor", 4}};
  json report = run_experiment(parse_config(j));
  auto dims = report["metrics"]["measurement_dims"].get<std::vector<int>>();
  CHECK(dims == std::vector<int>{4, 8, 8});
  CHECK(report["metrics"].contains("bilinear_psnr_db"));
  CHECK(fs::exists(dir.path / "measurements.wt"));
}

TEST_CASE("ct run writes the sinogram and reports the angle count") {
  TmpDir dir("ct");
  json j = base_fit_config(dir.path.string());
  j["task"] = "ct";
  j["io"]["synth"] = {{"kind", "shepp_logan"}, {"dims", {24, 24}}};
  j["train"]["steps"] = 5;
  j["operator"] = {{"angles", 10}};
  json report = run_experiment(parse_config(j));
  CHECK(report["metrics"]["angle_count"] == 10);
  auto sino = wire::load_tensor((dir.path / "sinogram.wt").string());
  CHECK(sino.shape == wire::Shape{10, 24});
}

TEST_CASE("sweep emits one row per cell and aliases the axis cells") {
  TmpDir dir("sweep");
  json j = base_fit_config(dir.path.string());
  j["task"] = "sweep";
  j["train"]["steps"] = 12;
  j["sweep"] = {{"axis", "omega0_sigma0"}, {"task", "fit"},
                {"omega0", {0.0, 10.0}}, {"sigma0", {5.0, 10.0}}};
  json report = run_experiment(parse_config(j));
  CHECK(report["metrics"]["cell_count"] == 4);

  std::ifstream csv(dir.path / "sweep.csv");
  std::string line;
  int rows = 0;
  std::getline(csv, line);  // header
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);

  // cell 0 is omega0=0, sigma0=5 -> a gauss(5) run, byte-identical to the
  // direct run at the same seed
  json direct = base_fit_config((dir.path / "direct").string());
  direct["train"]["steps"] = 12;
  direct["model"]["activation"] = "gauss";
  direct["model"]["sigma0"] = 5.0;
  run_experiment(parse_config(direct));
  CHECK(slurp(dir.path / "cell_0" / "report.json") ==
        slurp(dir.path / "direct" / "report.json"));
  CHECK(slurp(dir.path / "cell_0" / "recon.pgm") ==
        slurp(dir.path / "direct" / "recon.pgm"));
}

TEST_CASE("ntk task writes kernel, spectrum, and trajectory files") {
  TmpDir dir("ntk");
  json j = base_fit_config(dir.path.string());
  j["task"] = "ntk";
  j["model"]["hidden_features"] = 8;
  j["ntk"] = {{"grid", {6, 6}}, {"times", 8}, {"activations", {"wire", "relu_pe"}}};
  json report = run_experiment(parse_config(j));
  for (const char* f :
       {"ntk_kernel_wire.wt", "ntk_spectrum_wire.csv", "ntk_trajectory_wire.csv",
        "ntk_kernel_relu_pe.wt", "ntk_spectrum_relu_pe.csv",
        "ntk_trajectory_relu_pe.csv"})
    CHECK(fs::exists(dir.path / f));

  auto k = wire::load_tensor((dir.path / "ntk_kernel_wire.wt").string());
  CHECK(k.shape == wire::Shape{36, 36});
  for (int i = 0; i < 36; ++i)
    for (int jx = 0; jx < 36; ++jx)
      CHECK(k.re[i * 36 + jx] == doctest::Approx(k.re[jx * 36 + i]).epsilon(1e-10));
  CHECK(report["metrics"]["per_activation"]["wire"]["effective_rank"].get<int>() > 0);
}

TEST_CASE("dump-activations writes per-unit maps that follow the wavelet atoms") {
  TmpDir dir("dump");
  // width 16 complex model: hidden_features 23 -> round(23/sqrt(2)) = 16
  wire::ModelConfig mc;
  mc.input_dim = 2;
  mc.output_dim = 1;
  mc.hidden_layers = 2;
  mc.hidden_features = 23;
  mc.activation = wire::ActivationKind::wire(20, 10);
  mc.seed = 9;
  auto model = wire::InrModel<double>::build(mc);
  REQUIRE(model.width == 16);
  fs::create_directories(dir.path);
  model.save_checkpoint((dir.path / "model.bin").string());

  json j;
  j["task"] = "dump_activations";
  j["dump"] = {{"checkpoint", (dir.path / "model.bin").string()}, {"grid", {32, 32}}};
  j["io"] = {{"out", (dir.path / "maps").string()}};
  json report = run_experiment(parse_config(j));

  int pgms = 0;
  for (const auto& e : fs::directory_iterator(dir.path / "maps"))
    if (e.path().extension() == ".pgm") ++pgms;
  CHECK(pgms == 2 * 16 * 2);  // layers x units x (re, im)

  for (const auto& layer : report["metrics"]["layers"]) {
    double s = layer["sparsity"].get<double>();
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }

  // untrained first-layer maps are the wavelet atoms psi(W1 x + b1)
  auto grid = wire::make_grid({32, 32});
  auto hidden = model.hidden_activations(grid.coords);
  for (int i = 0; i < 32 * 32; i += 97)
    for (int u = 0; u < model.width; u += 5) {
      std::complex<double> w1{model.layers[0].w[0].re[u], model.layers[0].w[0].im[u]};
      std::complex<double> w2{model.layers[0].w[0].re[model.width + u],
                              model.layers[0].w[0].im[model.width + u]};
      std::complex<double> b{model.layers[0].b[0].re[u], model.layers[0].b[0].im[u]};
      std::complex<double> z = w1 * grid.coords.re[i * 2] +
                               w2 * grid.coords.re[i * 2 + 1] + b;
      auto want = wire::gabor_eval(z, 20.0, 10.0);
      CHECK(hidden[0].re[(std::size_t)i * model.width + u] ==
            doctest::Approx(want.real()).epsilon(1e-10));
      CHECK(hidden[0].im[(std::size_t)i * model.width + u] ==
            doctest::Approx(want.imag()).epsilon(1e-10));
    }
}

TEST_CASE("dump task validates its inputs") {
  json j;
  j["task"] = "dump_activations";
  j["io"] = {{"out", "tmp_test/dumpbad"}};
  CHECK_THROWS_AS(run_experiment(parse_config(j)), std::invalid_argument);
  fs::remove_all("tmp_test");
}

TEST_SUITE_END();
