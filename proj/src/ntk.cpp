#include "wire/ntk.hpp"

#include <cmath>
#include <stdexcept>

#include "wire/autodiff.hpp"
#include "wire/kernels.hpp"
#include "wire/linalg.hpp"
#include "wire/metrics.hpp"

namespace wire {

NtkMatrix empirical_ntk(const InrModel<double>& model, const Tensor<double>& coords,
                        int cap) {
  const int rows = coords.shape.at(0);
  const int ch = model.cfg.output_dim;
  const long p = static_cast<long>(rows) * ch;
  if (p > cap)
    throw std::runtime_error("empirical_ntk: " + std::to_string(p) +
                             " outputs exceed the cap of " + std::to_string(cap));
  const std::size_t n_params = model.parameter_count();

  // Jacobian rows: gradient of each output w.r.t. every real parameter
  // coordinate (re planes then im planes, in parameter order)
  std::vector<double> jac(static_cast<std::size_t>(p) * n_params, 0.0);
  const Tensor<double> encoded = model.encode(coords);
  const int enc_dim = encoded.shape[1];

  for (int r = 0; r < rows; ++r) {
    Tensor<double> one({1, enc_dim}, false);
    for (int j = 0; j < enc_dim; ++j) one.re[j] = encoded.re[(std::size_t)r * enc_dim + j];
    Graph<double> g;
    auto bound = model.bind(g, g.input(one), true);
    std::vector<int> picks;
    for (int c = 0; c < ch; ++c) picks.push_back(g.select(bound.output, c));
    for (int c = 0; c < ch; ++c) {
      g.reset_grads();
      g.backward(picks[c]);
      double* row = jac.data() + (static_cast<std::size_t>(r) * ch + c) * n_params;
      std::size_t off = 0;
      for (int id : bound.params) {
        if (!g.has_grad(id)) {  // parameter unused by this output
          const Tensor<double>& v = g.value(id);
          off += v.numel() * (v.is_complex() ? 2 : 1);
          continue;
        }
        const Tensor<double>& gr = g.grad(id);
        for (double v : gr.re) row[off++] = v;
        for (double v : gr.im) row[off++] = v;
      }
    }
  }

  NtkMatrix out;
  out.p = static_cast<int>(p);
  out.coord_dims = coords.shape;
  out.fingerprint = model.cfg.activation.name() + "/w" + std::to_string(model.width) +
                    "/L" + std::to_string(model.cfg.hidden_layers) + "/seed" +
                    std::to_string(model.cfg.seed);
  out.k.assign(static_cast<std::size_t>(p) * p, 0.0);
  std::vector<double> jac_t(jac.size());
  kern::transpose(jac.data(), jac_t.data(), static_cast<int>(p),
                  static_cast<int>(n_params));
  kern::matmul(jac.data(), jac_t.data(), out.k.data(), static_cast<int>(p),
               static_cast<int>(n_params), static_cast<int>(p), kern::Accum::Set);
  return out;
}

NtkFlow NtkFlow::from(const NtkMatrix& km, double psd_tol) {
  const int p = km.p;
  // symmetry audit
  double max_abs = 0.0, max_asym = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      max_abs = std::max(max_abs, std::abs(km.k[(std::size_t)i * p + j]));
      max_asym = std::max(max_asym, std::abs(km.k[(std::size_t)i * p + j] -
                                             km.k[(std::size_t)j * p + i]));
    }
  if (max_asym > psd_tol * std::max(max_abs, 1.0))
    throw std::runtime_error("ntk_flow: kernel is not symmetric within tolerance");

  NtkFlow flow;
  flow.p = p;
  flow.eigvecs = km.k;
  eigen_symmetric(flow.eigvecs, flow.eigvals, p);
  const double max_eig = flow.eigvals.empty() ? 0.0 : flow.eigvals.back();
  for (double v : flow.eigvals)
    if (v < -psd_tol * std::max(max_eig, 1.0))
      throw std::runtime_error(
          "ntk_flow: kernel is not positive semidefinite within tolerance; "
          "increase precision");
  for (double& v : flow.eigvals)
    if (v < 0.0) v = 0.0;
  return flow;
}

std::vector<double> NtkFlow::predict(const std::vector<double>& g, double t) const {
  if (static_cast<int>(g.size()) != p)
    throw std::invalid_argument("ntk_flow: target length mismatch");
  if (t < 0) throw std::invalid_argument("ntk_flow: time must be >= 0");
  // y = U^T g
  std::vector<double> y(p, 0.0);
  for (int j = 0; j < p; ++j) {
    double acc = 0.0;
    for (int i = 0; i < p; ++i) acc += eigvecs[(std::size_t)i * p + j] * g[i];
    y[j] = acc * (1.0 - std::exp(-t * eigvals[j]));
  }
  std::vector<double> out(p, 0.0);
  for (int i = 0; i < p; ++i) {
    double acc = 0.0;
    for (int j = 0; j < p; ++j) acc += eigvecs[(std::size_t)i * p + j] * y[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> ntk_flow(const NtkMatrix& k, const std::vector<double>& g, double t) {
  return NtkFlow::from(k).predict(g, t);
}

std::vector<TrajectoryPoint> denoising_trajectory(const NtkFlow& flow,
                                                  const std::vector<double>& clean,
                                                  const std::vector<double>& noisy,
                                                  const std::vector<double>& times) {
  if (clean.size() != noisy.size() || static_cast<int>(clean.size()) != flow.p)
    throw std::invalid_argument("denoising_trajectory: length mismatch");
  std::vector<TrajectoryPoint> out;
  Tensor<double> ref({flow.p}, false);
  ref.re = clean;
  for (double t : times) {
    Tensor<double> pred({flow.p}, false);
    pred.re = flow.predict(noisy, t);
    out.push_back({t, psnr(pred, ref)});
  }
  return out;
}

std::vector<std::vector<double>> gd_prediction_trajectory(InrModel<double> model,
                                                          const Tensor<double>& coords,
                                                          const Tensor<double>& target,
                                                          double lr, int steps) {
  std::vector<std::vector<double>> preds;
  const Tensor<double> encoded = model.encode(coords);
  const double count = static_cast<double>(target.numel());
  for (int s = 0; s <= steps; ++s) {
    Graph<double> g;
    auto bound = model.bind(g, g.input(encoded), true);
    preds.push_back(g.value(bound.output).re);
    if (s == steps) break;
    // 0.5 * sum of squares = mean-squared-error * count / 2
    int loss = g.scale(g.l2_loss(bound.output, target), count / 2.0);
    g.backward(loss);
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!g.has_grad(bound.params[i])) continue;
      const Tensor<double>& gr = g.grad(bound.params[i]);
      kern::axpy(-lr, gr.re.data(), params[i]->re.data(), gr.re.size());
      if (params[i]->is_complex())
        kern::axpy(-lr, gr.im.data(), params[i]->im.data(), gr.im.size());
    }
  }
  return preds;
}

std::vector<double> log_time_grid(double t_lo, double t_hi, int count) {
  if (count < 2 || t_lo <= 0 || t_hi <= t_lo)
    throw std::invalid_argument("log_time_grid: bad range");
  std::vector<double> out(count);
  const double la = std::log(t_lo), lb = std::log(t_hi);
  for (int i = 0; i < count; ++i)
    out[i] = std::exp(la + (lb - la) * i / (count - 1));
  return out;
}

}  // namespace wire
