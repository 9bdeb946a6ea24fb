#include "wire/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace wire {

double psnr(const Tensor<double>& x, const Tensor<double>& ref, double peak) {
  if (x.shape != ref.shape)
    throw std::invalid_argument("psnr: shape mismatch: " + shape_str(x.shape) + " vs " +
                                shape_str(ref.shape));
  double mse = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    double d = x.re[i] - ref.re[i];
    mse += d * d;
  }
  mse /= static_cast<double>(x.numel());
  if (mse == 0.0) return kPsnrInf;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Tensor<double>& x, const Tensor<double>& ref, int h, int w) {
  if (x.shape != ref.shape)
    throw std::invalid_argument("ssim: shape mismatch: " + shape_str(x.shape) + " vs " +
                                shape_str(ref.shape));
  if (static_cast<std::size_t>(h) * w != x.numel())
    throw std::invalid_argument("ssim: dims do not match tensor size");
  constexpr int kWin = 11;
  if (h < kWin || w < kWin)
    throw std::invalid_argument("ssim: image smaller than the 11x11 window");

  // 11x11 Gaussian window, sigma = 1.5, normalized
  static const std::vector<double> win = [] {
    std::vector<double> v(kWin * kWin);
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i)
      for (int j = 0; j < kWin; ++j) {
        double dy = i - 5, dx = j - 5;
        v[i * kWin + j] = std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
        sum += v[i * kWin + j];
      }
    for (auto& e : v) e /= sum;
    return v;
  }();

  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  double acc = 0.0;
  int count = 0;
  for (int r = 0; r + kWin <= h; ++r)
    for (int c = 0; c + kWin <= w; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          double wgt = win[i * kWin + j];
          double a = x.re[(std::size_t)(r + i) * w + (c + j)];
          double b = ref.re[(std::size_t)(r + i) * w + (c + j)];
          mx += wgt * a;
          my += wgt * b;
          sxx += wgt * a * a;
          syy += wgt * b * b;
          sxy += wgt * a * b;
        }
      double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
      double val = ((2 * mx * my + c1) * (2 * cov + c2)) /
                   ((mx * mx + my * my + c1) * (vx + vy + c2));
      acc += val;
      ++count;
    }
  return acc / count;
}

double iou(const Tensor<double>& a, const Tensor<double>& b, double threshold) {
  if (a.shape != b.shape)
    throw std::invalid_argument("iou: shape mismatch: " + shape_str(a.shape) + " vs " +
                                shape_str(b.shape));
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    bool oa = a.re[i] > threshold, ob = b.re[i] > threshold;
    inter += oa && ob;
    uni += oa || ob;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace wire
