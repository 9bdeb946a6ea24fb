#pragma once

// Linear measurement operators and noise models. Every variant is realized as
// an explicit sparse matrix (or a chain of them), which makes apply/adjoint
// exactly transposed pairs and keeps superposition exact to rounding.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wire/autodiff.hpp"
#include "wire/linear_map.hpp"
#include "wire/tensor.hpp"

namespace wire {

struct NoiseModel {
  enum class Kind { None, Gaussian, Photon };
  Kind kind = Kind::None;
  double sigma = 0.05;        // Gaussian: additive std
  double max_photons = 30.0;  // Photon: maximum mean photon count
  double readout = 2.0;       // Photon: readout noise std, in counts

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double s) { return {Kind::Gaussian, s, 30.0, 2.0}; }
  static NoiseModel photon(double maxp, double rd) {
    return {Kind::Photon, 0.05, maxp, rd};
  }
};

// Gaussian: y = x + N(0, sigma^2). Photon: y = (Poisson(max*x) + N(0, r^2))/max,
// defined for x in [0,1] and not clipped on output. Deterministic per seed.
Tensor<double> apply_noise(const Tensor<double>& clean, const NoiseModel& noise,
                           std::uint64_t seed);

class SparseMap : public LinearMap {
 public:
  SparseMap(std::size_t rows, std::size_t cols,
            std::vector<std::vector<std::pair<std::uint32_t, double>>> row_entries);
  std::size_t in_size() const override { return cols_; }
  std::size_t out_size() const override { return rows_; }
  void apply(const double* x, double* y) const override;
  void adjoint(const double* y, double* x) const override;

 private:
  std::size_t rows_, cols_;
  std::vector<std::uint32_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
};

class ChainMap : public LinearMap {
 public:
  explicit ChainMap(std::vector<std::shared_ptr<const LinearMap>> stages);
  std::size_t in_size() const override { return stages_.front()->in_size(); }
  std::size_t out_size() const override { return stages_.back()->out_size(); }
  void apply(const double* x, double* y) const override;
  void adjoint(const double* y, double* x) const override;

 private:
  std::vector<std::shared_ptr<const LinearMap>> stages_;
};

struct WarpSpec {
  double dx = 0.0;   // pixels, content moves right
  double dy = 0.0;   // pixels, content moves down
  double rot = 0.0;  // radians about the image center
};

// Stand-alone map builders (single channel [h x w] unless noted).
std::shared_ptr<const LinearMap> make_identity_map(std::size_t n);
// area averaging over f x f blocks, then decimation; [h x w x c]
std::shared_ptr<const LinearMap> make_downsample_map(int h, int w, int c, int factor);
// bilinear rigid resample about the center, out-of-bounds clamped to the edge
std::shared_ptr<const LinearMap> make_warp_map(int h, int w, int c, const WarpSpec& spec);
// parallel-beam line integrals; sinogram [angles x detectors]
std::shared_ptr<const LinearMap> make_radon_map(int s, const std::vector<double>& angles,
                                                int detector_count);

// The measurement process A (one or more stacked linear frames) plus noise.
struct ForwardOperator {
  std::string kind;
  Shape input_dims;   // e.g. {h, w} or {h, w, c}
  Shape output_dims;  // measurement stack shape
  NoiseModel noise;
  std::vector<std::shared_ptr<const LinearMap>> frames;

  static ForwardOperator identity(const Shape& dims, NoiseModel n = {});
  static ForwardOperator downsample(const Shape& dims, int factor, NoiseModel n = {});
  static ForwardOperator warp_downsample(const Shape& dims,
                                         const std::vector<WarpSpec>& warps, int factor,
                                         NoiseModel n = {});
  static ForwardOperator radon(const Shape& dims, const std::vector<double>& angles,
                               int detector_count, NoiseModel n = {});

  // noise-free deterministic application
  Tensor<double> apply_clean(const Tensor<double>& img) const;
  // apply_clean followed by apply_noise
  Tensor<double> measure(const Tensor<double>& img, std::uint64_t seed) const;

  template <class T>
  int apply_graph(Graph<T>& g, int img_node) const {
    if (frames.size() == 1)
      return g.apply_linear(img_node, frames[0].get(), output_dims);
    std::vector<int> parts;
    Shape frame_shape(output_dims.begin() + 1, output_dims.end());
    for (const auto& f : frames)
      parts.push_back(g.apply_linear(img_node, f.get(), frame_shape));
    return g.concat(parts);
  }
};

// A(alpha*a + b) == alpha*A(a) + A(b) within tol, noise disabled
bool superposition_check(const ForwardOperator& op, const Tensor<double>& a,
                         const Tensor<double>& b, double alpha, double tol = 1e-9);

// plain bilinear upsampling, the classical single-frame baseline
Tensor<double> bilinear_upsample(const Tensor<double>& img, int h, int w, int factor);

// convenience wrappers over the maps
Tensor<double> downsample_image(const Tensor<double>& img, int h, int w, int c,
                                int factor);
Tensor<double> warp_image(const Tensor<double>& img, int h, int w, int c,
                          const WarpSpec& spec);
Tensor<double> radon_sinogram(const Tensor<double>& img, int s,
                              const std::vector<double>& angles, int detector_count);

std::vector<double> uniform_angles(int count);  // count angles over [0, pi)

}  // namespace wire
