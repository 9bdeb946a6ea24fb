#pragma once

// Adam, the geometric learning-rate decay, and the training loops for direct
// signal fitting and linear inverse problems. Early stopping is realized as
// best-checkpoint retention: the parameters with the best reconstruction
// metric seen along the trajectory are kept alongside the final ones.

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wire/autodiff.hpp"
#include "wire/io.hpp"
#include "wire/kernels.hpp"
#include "wire/metrics.hpp"
#include "wire/model.hpp"
#include "wire/operators.hpp"
#include "wire/rng.hpp"
#include "wire/tensor.hpp"

namespace wire {

struct TrainConfig {
  double lr = 5e-3;
  int steps = 2000;
  double lr_final_factor = 0.1;  // lr decays to this fraction by the last step
  int batch = 0;                 // coordinates per step; 0 = full batch
  std::uint64_t seed = 1;
  bool track_best = true;
  int eval_every = 25;  // full-data metric cadence for minibatch runs
  int ssim_every = 0;   // 0 = never during the trace
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  void validate() const {
    if (steps < 0) throw std::invalid_argument("train: steps must be >= 0");
    if (!(lr_final_factor > 0.0 && lr_final_factor <= 1.0))
      throw std::invalid_argument("train: lr_final_factor must be in (0, 1]");
    if (batch < 0) throw std::invalid_argument("train: batch must be >= 0");
  }
};

// lr(step) = lr * lr_final_factor^(step / total_steps)
inline double lr_at(int step, const TrainConfig& cfg) {
  if (cfg.steps == 0) return cfg.lr;
  return cfg.lr * std::pow(cfg.lr_final_factor,
                           static_cast<double>(step) / static_cast<double>(cfg.steps));
}

template <class T>
struct AdamState {
  struct Plane {
    std::vector<T> m, v;
  };
  std::vector<Plane> re, im;  // one entry per parameter tensor
  long step_count = 0;

  template <class Model>
  static AdamState init(const Model& model) {
    AdamState s;
    for (const Tensor<T>* p : model.parameters()) {
      s.re.push_back({std::vector<T>(p->numel(), T(0)), std::vector<T>(p->numel(), T(0))});
      s.im.push_back(p->is_complex()
                         ? Plane{std::vector<T>(p->numel(), T(0)),
                                 std::vector<T>(p->numel(), T(0))}
                         : Plane{});
    }
    return s;
  }
};

template <class T>
std::string parameter_name(const InrModel<T>& model, std::size_t flat_index) {
  std::size_t i = flat_index;
  for (std::size_t li = 0; li < model.layers.size(); ++li) {
    const auto& l = model.layers[li];
    for (std::size_t k = 0; k < l.w.size(); ++k) {
      if (i == 0) return "layer " + std::to_string(li) + " window " + std::to_string(k) +
                         " weights";
      --i;
      if (i == 0)
        return "layer " + std::to_string(li) + " window " + std::to_string(k) + " bias";
      --i;
    }
  }
  return "parameter #" + std::to_string(flat_index);
}

// One bias-corrected Adam step over every parameter; re and im planes are
// treated as independent real parameter arrays.
template <class T>
void adam_step(InrModel<T>& model, const std::vector<const Tensor<T>*>& grads,
               AdamState<T>& state, double lr, const TrainConfig& cfg) {
  auto params = model.parameters();
  if (grads.size() != params.size())
    throw std::invalid_argument("adam: gradient count mismatch");
  ++state.step_count;
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T bc1 =
      static_cast<T>(1.0 / (1.0 - std::pow(cfg.beta1, (double)state.step_count)));
  const T bc2 =
      static_cast<T>(1.0 / (1.0 - std::pow(cfg.beta2, (double)state.step_count)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor<T>& g = *grads[i];
    Tensor<T>& p = *params[i];
    if (!kern::all_finite(g.re.data(), g.re.size()) ||
        (!g.im.empty() && !kern::all_finite(g.im.data(), g.im.size())))
      throw std::runtime_error("adam: non-finite gradient in " + parameter_name(model, i));
    kern::adam_update(p.re.data(), g.re.data(), state.re[i].m.data(),
                      state.re[i].v.data(), p.re.size(), static_cast<T>(lr), b1, b2,
                      static_cast<T>(cfg.eps), bc1, bc2);
    if (p.is_complex())
      kern::adam_update(p.im.data(), g.im.data(), state.im[i].m.data(),
                        state.im[i].v.data(), p.im.size(), static_cast<T>(lr), b1, b2,
                        static_cast<T>(cfg.eps), bc1, bc2);
  }
}

template <class T>
struct FitResult {
  std::vector<TraceRow> trace;
  bool diverged = false;
  int best_step = -1;
  double best_psnr = -std::numeric_limits<double>::infinity();
  std::vector<Tensor<T>> best_params;
  double final_loss = std::numeric_limits<double>::quiet_NaN();

  void restore_best(InrModel<T>& model) const {
    if (best_params.empty()) return;
    auto params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best_params[i];
  }
};

namespace fit_detail {

template <class T>
Tensor<T> gather_rows(const Tensor<T>& src, const std::vector<std::size_t>& rows) {
  const int w = src.shape[1];
  Tensor<T> out({static_cast<int>(rows.size()), w}, src.is_complex());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < w; ++j)
      out.re[i * w + j] = src.re[rows[i] * w + j];
  return out;
}

inline double mse_to_psnr(double mse) {
  if (mse <= 0.0) return kPsnrInf;
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace fit_detail

// Minimizes ||A(F(coords)) - y||^2 with Adam under the decaying schedule.
// When eval_target is given, the trace also carries reconstruction PSNR
// against it and (with track_best) the best parameters are retained.
// Minibatching is only meaningful for direct fits, so it requires the
// identity operator.
template <class T>
FitResult<T> fit_inverse(InrModel<T>& model, const ForwardOperator& op,
                         const Tensor<double>& measurements,
                         const Tensor<double>& coords, const TrainConfig& cfg,
                         const Tensor<double>* eval_target = nullptr,
                         const Shape* eval_hw = nullptr) {
  cfg.validate();
  if (measurements.numel() != shape_numel(op.output_dims))
    throw std::invalid_argument("fit: measurement size " + shape_str(measurements.shape) +
                                " does not match operator output " +
                                shape_str(op.output_dims));
  const bool batched = cfg.batch > 0;
  if (batched && op.kind != "identity")
    throw std::invalid_argument("fit: minibatching requires the identity operator");

  const Tensor<T> encoded = model.encode(coords.template cast<T>());
  const Tensor<T> meas_t = measurements.template cast<T>();
  const std::size_t n_rows = static_cast<std::size_t>(encoded.shape[0]);
  const int meas_cols =
      measurements.shape.size() == 2 ? measurements.shape[1] : 1;

  AdamState<T> state = AdamState<T>::init(model);
  Rng rng(cfg.seed);
  FitResult<T> result;
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  // full-data metric: reconstruction PSNR when a target is known, otherwise
  // measurement-space PSNR
  auto eval_psnr_full = [&]() -> double {
    Tensor<T> out = model.forward(coords.template cast<T>());
    if (eval_target) {
      Tensor<T> ref = eval_target->template cast<T>();
      double mse =
          kern::reduce_sumsq_diff(out.re.data(), ref.re.data(), out.numel()) /
          out.numel();
      return fit_detail::mse_to_psnr(mse);
    }
    Tensor<double> meas = op.apply_clean(out.template cast<double>());
    double mse = kern::reduce_sumsq_diff(meas.re.data(), measurements.re.data(),
                                         meas.numel()) /
                 meas.numel();
    return fit_detail::mse_to_psnr(mse);
  };

  auto snapshot_best = [&](int step, double metric) {
    result.best_step = step;
    result.best_psnr = metric;
    if (cfg.track_best) {
      result.best_params.clear();
      for (const Tensor<T>* p : model.parameters()) result.best_params.push_back(*p);
    }
  };

  for (int step = 0; step < cfg.steps; ++step) {
    const double lr = lr_at(step, cfg);
    Graph<T> g;
    int loss_node = -1;
    int out_node = -1;
    typename InrModel<T>::Bound bound;

    if (batched) {
      std::vector<std::size_t> rows(static_cast<std::size_t>(cfg.batch));
      for (auto& r : rows) r = rng.below(n_rows);
      Tensor<T> enc_b = fit_detail::gather_rows(encoded, rows);
      Tensor<T> tgt({cfg.batch, meas_cols}, false);
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < meas_cols; ++j)
          tgt.re[i * meas_cols + j] = meas_t.re[rows[i] * meas_cols + j];
      bound = model.bind(g, g.input(enc_b), true);
      out_node = bound.output;
      loss_node = g.l2_loss(out_node, tgt);
    } else {
      bound = model.bind(g, g.input(encoded), true);
      out_node = bound.output;
      int meas_node = op.apply_graph(g, out_node);
      Tensor<T> tgt = g.value(meas_node);  // borrow the node's shape
      std::copy(meas_t.re.begin(), meas_t.re.end(), tgt.re.begin());
      loss_node = g.l2_loss(meas_node, tgt);
    }

    const double loss = static_cast<double>(g.value(loss_node).re[0]);
    if (!std::isfinite(loss)) {
      result.diverged = true;
      break;
    }
    result.final_loss = loss;

    TraceRow row;
    row.step = step;
    row.lr = lr;
    row.loss = loss;

    double metric = -std::numeric_limits<double>::infinity();
    bool have_metric = false;
    if (!batched) {
      if (eval_target) {
        double mse = kern::reduce_sumsq_diff(g.value(out_node).re.data(),
                                             eval_target->template cast<T>().re.data(),
                                             g.value(out_node).numel()) /
                     g.value(out_node).numel();
        metric = fit_detail::mse_to_psnr(mse);
      } else {
        metric = fit_detail::mse_to_psnr(loss);
      }
      have_metric = true;
      if (eval_target && eval_hw && cfg.ssim_every > 0 && step % cfg.ssim_every == 0 &&
          eval_hw->size() == 2) {
        row.ssim = ssim(g.value(out_node).template cast<double>(), *eval_target,
                        (*eval_hw)[0], (*eval_hw)[1]);
        row.has_ssim = true;
      }
    } else if (cfg.eval_every > 0 &&
               (step % cfg.eval_every == 0 || step + 1 == cfg.steps)) {
      metric = eval_psnr_full();
      have_metric = true;
    }
    if (have_metric) {
      row.psnr = metric;
      row.has_psnr = true;
      if (metric > result.best_psnr) snapshot_best(step, metric);
    }
    row.wall_time_s = wall();
    result.trace.push_back(row);

    g.backward(loss_node);
    std::vector<const Tensor<T>*> grads;
    grads.reserve(bound.params.size());
    for (int id : bound.params) grads.push_back(&g.grad(id));
    adam_step(model, grads, state, lr, cfg);
  }

  // the final parameters may beat the last traced metric
  if (cfg.steps > 0 && !result.diverged) {
    double final_metric = eval_psnr_full();
    if (final_metric > result.best_psnr) snapshot_best(cfg.steps, final_metric);
  }
  return result;
}

// Direct signal fitting: the identity operator with no noise.
template <class T>
FitResult<T> fit_signal(InrModel<T>& model, const Tensor<double>& coords,
                        const Tensor<double>& values, const TrainConfig& cfg,
                        const Shape* eval_hw = nullptr) {
  ForwardOperator op = ForwardOperator::identity(values.shape);
  return fit_inverse(model, op, values, coords, cfg, &values, eval_hw);
}

}  // namespace wire
