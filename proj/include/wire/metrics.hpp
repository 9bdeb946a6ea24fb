#pragma once

// PSNR, SSIM, IOU. PSNR of an exact match returns the +infinity sentinel.

#include <limits>

#include "wire/tensor.hpp"

namespace wire {

struct MetricReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double iou = 0.0;
  bool has_ssim = false;
  bool has_iou = false;
};

// 10*log10(peak^2 / MSE); channels pooled into a single MSE
double psnr(const Tensor<double>& x, const Tensor<double>& ref, double peak = 1.0);

// mean local SSIM with an 11x11 Gaussian window (sigma 1.5), C1=(0.01)^2,
// C2=(0.03)^2 at unit dynamic range. x is interpreted as [h x w]; images
// smaller than the window are rejected. Multi-channel data is averaged per
// channel by the caller.
double ssim(const Tensor<double>& x, const Tensor<double>& ref, int h, int w);

// |a AND b| / |a OR b| with threshold applied to real-valued predictions;
// the empty-union case is 1 by convention
double iou(const Tensor<double>& a, const Tensor<double>& b, double threshold = 0.5);

inline constexpr double kPsnrInf = std::numeric_limits<double>::infinity();

}  // namespace wire
