#pragma once

// Empirical neural tangent kernel of small models and the linearized
// gradient-flow predictor F_t = (I - e^{-tK}) g, with the per-time denoising
// trajectories built on top. All NTK work runs in double precision.
//
// K[i,j] = <grad_theta F(x_i), grad_theta F(x_j)>, where complex parameters
// contribute their re and im gradient components as separate coordinates.

#include <cstdint>
#include <string>
#include <vector>

#include "wire/model.hpp"
#include "wire/tensor.hpp"

namespace wire {

struct NtkMatrix {
  int p = 0;                 // evaluation coordinates x output channels
  std::vector<double> k;     // p x p Gram matrix
  Shape coord_dims;          // provenance only
  std::string fingerprint;   // activation/widths/seed
};

// Gram matrix of per-output parameter gradients at the model's current
// parameters. Throws when p = rows * output_dim exceeds the cap.
NtkMatrix empirical_ntk(const InrModel<double>& model, const Tensor<double>& coords,
                        int cap = 4096);

// Eigendecomposition of an NtkMatrix, reused across flow evaluations.
struct NtkFlow {
  int p = 0;
  std::vector<double> eigvals;  // ascending; tiny negatives clamped to zero
  std::vector<double> eigvecs;  // column j = eigenvector j (row-major p x p)

  // Verifies symmetry and positive semidefiniteness within tolerances before
  // decomposing; throws with a precision hint otherwise.
  static NtkFlow from(const NtkMatrix& k, double psd_tol = 1e-8);

  // U (I - e^{-t Lambda}) U^T g
  std::vector<double> predict(const std::vector<double>& g, double t) const;
};

// convenience wrapper: decompose and predict in one call
std::vector<double> ntk_flow(const NtkMatrix& k, const std::vector<double>& g, double t);

struct TrajectoryPoint {
  double t = 0;
  double psnr = 0;
};

// PSNR of the flow prediction against the clean signal, per time point, with
// g = the noisy signal.
std::vector<TrajectoryPoint> denoising_trajectory(const NtkFlow& flow,
                                                  const std::vector<double>& clean,
                                                  const std::vector<double>& noisy,
                                                  const std::vector<double>& times);

// Plain gradient descent on the 0.5*sum-of-squares objective (the flow's
// normalization), recording the model's predictions before each step;
// element s of the result is the prediction after s steps, so it corresponds
// to flow time t = lr * s.
std::vector<std::vector<double>> gd_prediction_trajectory(InrModel<double> model,
                                                          const Tensor<double>& coords,
                                                          const Tensor<double>& target,
                                                          double lr, int steps);

// log-spaced time grid [t_lo, t_hi]
std::vector<double> log_time_grid(double t_lo, double t_hi, int count);

}  // namespace wire
