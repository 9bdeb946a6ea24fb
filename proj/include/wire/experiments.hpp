#pragma once

// End-to-end experiment runner behind the CLI. Computes everything first and
// writes artifacts at the end, so failed validation never leaves partial
// output behind.

#include <string>

#include <json.hpp>

#include "wire/config.hpp"

namespace wire {

// Runs one experiment, writes artifacts under cfg.io.out (report.json,
// trace.csv, recon and measurement files, checkpoints), and returns the
// report.
nlohmann::json run_experiment(const ExperimentConfig& cfg);

}  // namespace wire
