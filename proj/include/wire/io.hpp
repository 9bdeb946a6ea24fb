#pragma once

// File formats: binary PGM/PPM images (8-bit), the versioned tensor
// container, and CSV traces. All round-trips are lossless at their declared
// precision.

#include <string>
#include <vector>

#include "wire/signal.hpp"
#include "wire/tensor.hpp"

namespace wire {

// 8-bit binary PGM (P5) / PPM (P6); load maps [0,255] -> [0,1], save rounds
// half-up. Only maxval 255 is accepted.
SignalGrid load_image(const std::string& path);
void save_image(const SignalGrid& img, const std::string& path);

// Versioned tensor container: magic, version, dtype=float64, dim count, dims,
// row-major little-endian payload. Zero-dim (scalar) tensors are allowed.
void save_tensor(const Tensor<double>& t, const std::string& path);
Tensor<double> load_tensor(const std::string& path);

struct TraceRow {
  int step = 0;
  double wall_time_s = 0;
  double lr = 0;
  double loss = 0;
  double psnr = 0;
  double ssim = 0;
  bool has_psnr = false;
  bool has_ssim = false;
};

// columns: step, wall_time_s, lr, loss, psnr, ssim (blank when not computed)
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);

// generic CSV writer for small tables
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);  // shortest round-trip decimal form

}  // namespace wire
