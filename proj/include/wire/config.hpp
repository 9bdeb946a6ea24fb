#pragma once

// Declarative experiment configuration: strict JSON parsing (unknown keys are
// rejected with a field path), per-task defaults, and re-emission of the
// fully resolved configuration for provenance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wire/activations.hpp"
#include "wire/model.hpp"
#include "wire/operators.hpp"
#include "wire/optim.hpp"
#include "wire/tensor.hpp"

namespace wire {

struct ModelSpec {
  int hidden_layers = 3;
  int hidden_features = 256;  // real-model reference width (parity applies)
  std::string activation = "wire";
  std::optional<double> omega0, sigma0, q;
  std::optional<int> pe_frequencies, windows;
  std::string init = "standard_uniform";

  ActivationKind resolve_activation() const;
};

struct TrainSpec {
  std::optional<double> lr;  // default depends on the task
  int steps = 2000;
  double lr_final_factor = 0.1;
  std::optional<int> batch;  // default: full batch up to 128^2 coordinates
  std::uint64_t seed = 1;
  bool track_best = true;
  std::string precision = "f32";  // f32 | f64
  int eval_every = 25;
  int ssim_every = 0;
};

struct OperatorSpec {
  std::string noise = "none";  // none | gaussian | photon
  double sigma = 0.05;
  double max_photons = 30.0;
  double readout = 2.0;
  int factor = 4;  // superres / multisr
  struct Warp {
    double dx = 0, dy = 0, rot_deg = 0;
  };
  std::vector<Warp> warps;  // multisr; defaults filled when empty
  int angles = 50;          // ct
  int detectors = 0;        // ct; 0 = image side

  NoiseModel resolve_noise() const;
};

struct NtkSpec {
  Shape grid = {16, 16};
  int cap = 4096;
  std::vector<std::string> activations;  // empty = just the model activation
  int times = 32;
  double noise_sigma = 0.05;
};

struct SweepSpec {
  std::string axis = "omega0_sigma0";  // omega0_sigma0 | lr | layers | features | projections
  std::string task = "fit";            // experiment run in each cell
  std::vector<double> omega0, sigma0, values;
};

struct IoSpec {
  std::string input;  // PGM/PPM path; empty = synthesize
  std::string synth_kind = "natural";
  Shape synth_dims = {64, 64};
  std::uint64_t synth_seed = 7;
  SynthParams synth_params;
  std::string out = "out";
};

struct DumpSpec {
  std::string checkpoint;
  Shape grid = {32, 32};
};

struct ExperimentConfig {
  int version = 1;
  std::string task = "fit";
  ModelSpec model;
  TrainSpec train;
  OperatorSpec op;
  NtkSpec ntk;
  SweepSpec sweep;
  IoSpec io;
  DumpSpec dump;

  double resolved_lr() const;    // task default when train.lr is unset
  int resolved_batch(std::size_t grid_points) const;
  ModelConfig model_config(int input_dim, int output_dim) const;
  TrainConfig train_config(std::size_t grid_points) const;

  // resolved form, defaults included; io.out is intentionally omitted so that
  // reports are location-independent
  nlohmann::json resolved_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// dotted-path override, e.g. "train.lr=0.01" or "model.activation=gauss"
void apply_override(nlohmann::json& j, const std::string& assignment);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace wire
