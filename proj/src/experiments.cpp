#include "wire/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>

#include "wire/io.hpp"
#include "wire/metrics.hpp"
#include "wire/ntk.hpp"
#include "wire/optim.hpp"
#include "wire/signal.hpp"

namespace wire {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json json_num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

SignalGrid load_or_synth(const ExperimentConfig& cfg) {
  if (!cfg.io.input.empty()) {
    SignalGrid img = load_image(cfg.io.input);
    if (img.channels != 1) {
      // channels are pooled to grayscale for the reconstruction tasks
      SignalGrid grey;
      grey.dims = img.dims;
      grey.channels = 1;
      grey.values = Tensor<double>({img.dims[0] * img.dims[1], 1}, false);
      for (int i = 0; i < img.dims[0] * img.dims[1]; ++i) {
        double acc = 0;
        for (int c = 0; c < img.channels; ++c)
          acc += img.values.re[(std::size_t)i * img.channels + c];
        grey.values.re[i] = acc / img.channels;
      }
      return grey;
    }
    return img;
  }
  return synth_signal(cfg.io.synth_kind, cfg.io.synth_dims, cfg.io.synth_params,
                      cfg.io.synth_seed);
}

SignalGrid tensor_as_image(const Tensor<double>& flat, const Shape& dims) {
  SignalGrid img;
  img.dims = dims;
  img.channels = 1;
  img.values = flat;
  img.values.shape = {static_cast<int>(shape_numel(dims)), 1};
  return img;
}

struct FitOutcome {
  Tensor<double> recon;     // [N x C] on the full grid
  json metrics;             // task metrics
  std::vector<TraceRow> trace;
  json checkpoint_writer;   // unused marker
  std::function<void(const std::string&)> save_checkpoint;
};

template <class T>
FitOutcome run_fit_typed(const ExperimentConfig& cfg, const SignalGrid& gt,
                         const ForwardOperator& op, const Tensor<double>& measurements,
                         const Tensor<double>* eval_target) {
  CoordinateGrid grid = make_grid(gt.dims);
  ModelConfig mc = cfg.model_config(static_cast<int>(gt.dims.size()), gt.channels);
  auto model = std::make_shared<InrModel<T>>(InrModel<T>::build(mc));
  TrainConfig tc = cfg.train_config(grid.coords.shape[0]);

  Shape hw = gt.dims;
  auto res = fit_inverse(*model, op, measurements, grid.coords, tc, eval_target,
                         gt.dims.size() == 2 ? &hw : nullptr);
  if (tc.track_best) res.restore_best(*model);

  FitOutcome out;
  out.recon = model->forward(grid.coords.template cast<T>()).template cast<double>();
  out.trace = std::move(res.trace);
  out.metrics["diverged"] = res.diverged;
  out.metrics["best_step"] = res.best_step;
  out.metrics["best_psnr_db"] = json_num(res.best_psnr);
  out.metrics["final_loss"] = json_num(res.final_loss);
  out.metrics["parameter_count"] = model->parameter_count();
  out.metrics["hidden_width"] = model->width;
  out.save_checkpoint = [model](const std::string& path) {
    model->save_checkpoint(path);
  };
  return out;
}

FitOutcome run_fit(const ExperimentConfig& cfg, const SignalGrid& gt,
                   const ForwardOperator& op, const Tensor<double>& measurements,
                   const Tensor<double>* eval_target) {
  if (cfg.train.precision == "f64")
    return run_fit_typed<double>(cfg, gt, op, measurements, eval_target);
  return run_fit_typed<float>(cfg, gt, op, measurements, eval_target);
}

void add_image_metrics(json& metrics, const Tensor<double>& recon, const SignalGrid& gt) {
  Tensor<double> ref = gt.values;
  Tensor<double> rec = recon;
  rec.shape = ref.shape;
  metrics["psnr_db"] = json_num(psnr(rec, ref));
  if (gt.dims.size() == 2 && gt.channels == 1 && gt.dims[0] >= 11 && gt.dims[1] >= 11)
    metrics["ssim"] = json_num(ssim(rec, ref, gt.dims[0], gt.dims[1]));
  if (gt.dims.size() == 3) metrics["iou"] = json_num(iou(rec, ref));
}

json make_report(const ExperimentConfig& cfg, json metrics,
                 std::vector<std::string> artifacts) {
  std::sort(artifacts.begin(), artifacts.end());
  json report;
  report["task"] = cfg.task;
  report["config"] = cfg.resolved_json();
  report["metrics"] = std::move(metrics);
  report["artifacts"] = artifacts;
  return report;
}

void write_report(const fs::path& dir, const json& report) {
  std::ofstream os(dir / "report.json");
  os << report.dump(2) << "\n";
}

void save_grid_image(const Tensor<double>& values, const Shape& dims,
                     const fs::path& path) {
  SignalGrid img = tensor_as_image(values, dims);
  for (auto& v : img.values.re) v = std::min(1.0, std::max(0.0, v));
  save_image(img, path.string());
}

ForwardOperator build_operator(const ExperimentConfig& cfg, const SignalGrid& gt) {
  const Shape& dims = gt.dims;
  if (cfg.task == "fit" || cfg.task == "denoise") {
    NoiseModel n = cfg.task == "denoise" ? cfg.op.resolve_noise() : NoiseModel::none();
    return ForwardOperator::identity(gt.values.shape, n);
  }
  if (cfg.task == "superres")
    return ForwardOperator::downsample(dims, cfg.op.factor, cfg.op.resolve_noise());
  if (cfg.task == "multisr") {
    std::vector<WarpSpec> warps;
    for (const auto& w : cfg.op.warps)
      warps.push_back({w.dx, w.dy, w.rot_deg * 3.14159265358979323846 / 180.0});
    return ForwardOperator::warp_downsample(dims, warps, cfg.op.factor,
                                            cfg.op.resolve_noise());
  }
  if (cfg.task == "ct") {
    int det = cfg.op.detectors > 0 ? cfg.op.detectors : dims.at(1);
    return ForwardOperator::radon(dims, uniform_angles(cfg.op.angles), det,
                                  cfg.op.resolve_noise());
  }
  throw std::invalid_argument("no operator for task " + cfg.task);
}

json run_reconstruction_task(const ExperimentConfig& cfg) {
  SignalGrid gt = load_or_synth(cfg);
  ForwardOperator op = build_operator(cfg, gt);
  Tensor<double> measurements = op.measure(gt.values, derive_seed(cfg.train.seed, 1));

  FitOutcome out = run_fit(cfg, gt, op, measurements, &gt.values);
  add_image_metrics(out.metrics, out.recon, gt);

  std::vector<std::string> artifacts = {"report.json", "trace.csv", "checkpoint.bin"};
  const fs::path dir(cfg.io.out);
  fs::create_directories(dir);

  if (cfg.task == "denoise") {
    out.metrics["input_psnr_db"] = json_num(psnr(measurements, gt.values));
    if (gt.dims.size() == 2) {
      save_grid_image(measurements, gt.dims, dir / "noisy.pgm");
      artifacts.push_back("noisy.pgm");
    }
  } else if (cfg.task == "superres") {
    Shape lo = {gt.dims[0] / cfg.op.factor, gt.dims[1] / cfg.op.factor};
    save_grid_image(measurements, lo, dir / "lowres.pgm");
    artifacts.push_back("lowres.pgm");
    Tensor<double> base = bilinear_upsample(measurements, lo[0], lo[1], cfg.op.factor);
    base.shape = gt.values.shape;
    out.metrics["bilinear_psnr_db"] = json_num(psnr(base, gt.values));
  } else if (cfg.task == "multisr") {
    save_tensor(measurements, (dir / "measurements.wt").string());
    artifacts.push_back("measurements.wt");
    out.metrics["measurement_dims"] = op.output_dims;
    // classical baseline: frame 0 upsampled bilinearly
    Shape lo = {gt.dims[0] / cfg.op.factor, gt.dims[1] / cfg.op.factor};
    Tensor<double> frame0({lo[0] * lo[1], 1}, false);
    std::copy(measurements.re.begin(), measurements.re.begin() + frame0.numel(),
              frame0.re.begin());
    Tensor<double> base = bilinear_upsample(frame0, lo[0], lo[1], cfg.op.factor);
    base.shape = gt.values.shape;
    out.metrics["bilinear_psnr_db"] = json_num(psnr(base, gt.values));
  } else if (cfg.task == "ct") {
    save_tensor(measurements, (dir / "sinogram.wt").string());
    artifacts.push_back("sinogram.wt");
    out.metrics["angle_count"] = cfg.op.angles;
  }

  if (gt.dims.size() == 2) {
    save_grid_image(out.recon, gt.dims, dir / "recon.pgm");
    save_grid_image(gt.values, gt.dims, dir / "ground_truth.pgm");
    artifacts.push_back("recon.pgm");
    artifacts.push_back("ground_truth.pgm");
  } else {
    Tensor<double> vol = out.recon;
    vol.shape = gt.dims;
    save_tensor(vol, (dir / "recon.wt").string());
    artifacts.push_back("recon.wt");
  }
  write_trace_csv((dir / "trace.csv").string(), out.trace);
  out.save_checkpoint((dir / "checkpoint.bin").string());

  json report = make_report(cfg, out.metrics, artifacts);
  write_report(dir, report);
  return report;
}

json run_ntk_task(const ExperimentConfig& cfg) {
  SignalGrid base = synth_signal(cfg.io.synth_kind, cfg.ntk.grid, cfg.io.synth_params,
                                 cfg.io.synth_seed);
  if (!cfg.io.input.empty()) {
    SignalGrid img = load_image(cfg.io.input);
    if (img.dims != cfg.ntk.grid || img.channels != 1)
      throw std::invalid_argument("ntk: input image must match ntk.grid, single channel");
    base = img;
  }
  CoordinateGrid grid = make_grid(cfg.ntk.grid);
  std::vector<double> clean = base.values.re;
  Tensor<double> noisy_t =
      apply_noise(base.values, NoiseModel::gaussian(cfg.ntk.noise_sigma),
                  derive_seed(cfg.train.seed, 1));
  std::vector<double> noisy = noisy_t.re;

  std::vector<std::string> acts = cfg.ntk.activations;
  if (acts.empty()) acts.push_back(cfg.model.activation);

  const fs::path dir(cfg.io.out);
  fs::create_directories(dir);
  std::vector<std::string> artifacts = {"report.json"};
  json per_act;

  for (const std::string& name : acts) {
    ModelSpec spec = cfg.model;
    if (name != cfg.model.activation) {
      spec = ModelSpec{};
      spec.hidden_layers = cfg.model.hidden_layers;
      spec.hidden_features = cfg.model.hidden_features;
      spec.activation = name;
      spec.init = cfg.model.init;
    }
    ExperimentConfig sub = cfg;
    sub.model = spec;
    ModelConfig mc = sub.model_config(2, 1);
    auto model = InrModel<double>::build(mc);

    NtkMatrix k = empirical_ntk(model, grid.coords, cfg.ntk.cap);
    Tensor<double> kt({k.p, k.p}, false);
    kt.re = k.k;
    save_tensor(kt, (dir / ("ntk_kernel_" + name + ".wt")).string());
    artifacts.push_back("ntk_kernel_" + name + ".wt");

    NtkFlow flow = NtkFlow::from(k);
    std::vector<std::vector<std::string>> spec_rows;
    for (int i = 0; i < flow.p; ++i)
      spec_rows.push_back({std::to_string(i), format_double(flow.eigvals[i])});
    write_csv((dir / ("ntk_spectrum_" + name + ".csv")).string(), {"index", "eigenvalue"},
              spec_rows);
    artifacts.push_back("ntk_spectrum_" + name + ".csv");

    double lam_max = flow.eigvals.back();
    double lam_min_pos = lam_max;
    int effective_rank = 0;
    for (double v : flow.eigvals) {
      if (v > 1e-6 * lam_max) {
        ++effective_rank;
        lam_min_pos = std::min(lam_min_pos, v);
      }
    }
    std::vector<double> times = {0.0};
    for (double t : log_time_grid(0.01 / lam_max, 50.0 / lam_min_pos,
                                  std::max(2, cfg.ntk.times - 1)))
      times.push_back(t);
    auto traj = denoising_trajectory(flow, clean, noisy, times);
    std::vector<std::vector<std::string>> traj_rows;
    double best_traj = -1e300;
    for (const auto& pt : traj) {
      traj_rows.push_back({format_double(pt.t), format_double(pt.psnr)});
      best_traj = std::max(best_traj, pt.psnr);
    }
    write_csv((dir / ("ntk_trajectory_" + name + ".csv")).string(), {"t", "psnr_db"},
              traj_rows);
    artifacts.push_back("ntk_trajectory_" + name + ".csv");

    Tensor<double> noisy_img = noisy_t;
    json entry;
    entry["effective_rank"] = effective_rank;
    entry["lambda_max"] = json_num(lam_max);
    entry["lambda_min_effective"] = json_num(lam_min_pos);
    entry["best_trajectory_psnr_db"] = json_num(best_traj);
    entry["noisy_psnr_db"] = json_num(psnr(noisy_img, base.values));
    per_act[name] = entry;
  }

  json metrics;
  metrics["per_activation"] = per_act;
  metrics["grid_points"] = static_cast<int>(shape_numel(cfg.ntk.grid));
  json report = make_report(cfg, metrics, artifacts);
  write_report(dir, report);
  return report;
}

ExperimentConfig sweep_cell_config(const ExperimentConfig& cfg, std::size_t index,
                                   const std::string& out_dir) {
  ExperimentConfig cell = cfg;
  cell.task = cfg.sweep.task;
  cell.sweep = SweepSpec{};
  cell.io.out = out_dir;
  if (cell.task == "denoise" && cell.op.noise == "none") {
    // the parameter-sweep denoising setup: photon noise, 50-photon maximum
    cell.op.noise = "photon";
    cell.op.max_photons = 50.0;
    cell.op.readout = 2.0;
  }
  (void)index;
  return cell;
}

void apply_wavelet_cell(ExperimentConfig& cell, double w0, double s0) {
  cell.model.omega0.reset();
  cell.model.sigma0.reset();
  cell.model.q.reset();
  if (w0 > 0 && s0 > 0) {
    cell.model.activation = "wire";
    cell.model.omega0 = w0;
    cell.model.sigma0 = s0;
  } else if (w0 == 0 && s0 > 0) {
    cell.model.activation = "gauss";
    cell.model.sigma0 = s0;
  } else if (w0 > 0 && s0 == 0) {
    cell.model.activation = "siren";
    cell.model.omega0 = w0;
  } else {
    cell.model.activation = "relu";
  }
}

json run_sweep_task(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.io.out);
  fs::create_directories(dir);

  struct Cell {
    std::string label;
    ExperimentConfig config;
  };
  std::vector<Cell> cells;

  if (cfg.sweep.axis == "omega0_sigma0") {
    if (cfg.sweep.omega0.empty() || cfg.sweep.sigma0.empty())
      throw std::invalid_argument("sweep: omega0 and sigma0 lists must be non-empty");
    std::size_t idx = 0;
    for (double w0 : cfg.sweep.omega0)
      for (double s0 : cfg.sweep.sigma0) {
        Cell c{"omega0=" + format_double(w0) + ",sigma0=" + format_double(s0),
               sweep_cell_config(cfg, idx, (dir / ("cell_" + std::to_string(idx))).string())};
        apply_wavelet_cell(c.config, w0, s0);
        cells.push_back(std::move(c));
        ++idx;
      }
  } else {
    if (cfg.sweep.values.empty())
      throw std::invalid_argument("sweep: values list must be non-empty");
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i) {
      double v = cfg.sweep.values[i];
      Cell c{cfg.sweep.axis + "=" + format_double(v),
             sweep_cell_config(cfg, i, (dir / ("cell_" + std::to_string(i))).string())};
      if (cfg.sweep.axis == "lr")
        c.config.train.lr = v;
      else if (cfg.sweep.axis == "layers")
        c.config.model.hidden_layers = static_cast<int>(v);
      else if (cfg.sweep.axis == "features")
        c.config.model.hidden_features = static_cast<int>(v);
      else if (cfg.sweep.axis == "projections")
        c.config.op.angles = static_cast<int>(v);
      cells.push_back(std::move(c));
    }
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> artifacts = {"report.json", "sweep.csv"};
  json cell_reports = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    json rep = run_experiment(cells[i].config);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const json& m = rep["metrics"];
    auto num_or_blank = [&](const char* key) {
      return m.contains(key) && m[key].is_number()
                 ? format_double(m[key].get<double>())
                 : std::string("");
    };
    rows.push_back({std::to_string(i), cells[i].label, num_or_blank("psnr_db"),
                    num_or_blank("best_psnr_db"), format_double(wall)});
    json entry;
    entry["cell"] = i;
    entry["label"] = cells[i].label;
    entry["metrics"] = m;
    cell_reports.push_back(entry);
  }
  write_csv((dir / "sweep.csv").string(),
            {"cell", "parameters", "final_psnr_db", "best_psnr_db", "wall_time_s"}, rows);

  json metrics;
  metrics["cells"] = cell_reports;
  metrics["cell_count"] = cells.size();
  json report = make_report(cfg, metrics, artifacts);
  write_report(dir, report);
  return report;
}

json run_dump_task(const ExperimentConfig& cfg) {
  if (cfg.dump.checkpoint.empty())
    throw std::invalid_argument("dump_activations: dump.checkpoint path required");
  if (cfg.dump.grid.size() != 2)
    throw std::invalid_argument("dump_activations: 2-D grid required");
  auto model = InrModel<double>::load_checkpoint(cfg.dump.checkpoint);
  if (model.cfg.input_dim != 2)
    throw std::invalid_argument("dump_activations: checkpoint is not a 2-D model");
  CoordinateGrid grid = make_grid(cfg.dump.grid);
  auto hidden = model.hidden_activations(grid.coords);

  const fs::path dir(cfg.io.out);
  fs::create_directories(dir);
  std::vector<std::string> artifacts = {"report.json"};
  json layer_stats = json::array();

  for (std::size_t li = 0; li < hidden.size(); ++li) {
    const Tensor<double>& h = hidden[li];
    const int units = h.shape[1];
    const int n = h.shape[0];
    double max_mag = 0;
    for (int i = 0; i < n * units; ++i)
      max_mag = std::max(max_mag,
                         std::hypot(h.re[i], h.is_complex() ? h.im[i] : 0.0));
    std::size_t sparse = 0;
    for (int i = 0; i < n * units; ++i)
      if (std::hypot(h.re[i], h.is_complex() ? h.im[i] : 0.0) < 0.01 * max_mag) ++sparse;

    auto write_unit = [&](int u, bool imag) {
      Tensor<double> map({n, 1}, false);
      double lo = 1e300, hi = -1e300;
      for (int i = 0; i < n; ++i) {
        double v = imag ? h.im[(std::size_t)i * units + u] : h.re[(std::size_t)i * units + u];
        map.re[i] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      double span = hi > lo ? hi - lo : 1.0;
      for (auto& v : map.re) v = (v - lo) / span;
      std::string name = "act_l" + std::to_string(li) + "_u" + std::to_string(u) +
                         (imag ? "_im.pgm" : "_re.pgm");
      save_grid_image(map, cfg.dump.grid, dir / name);
      artifacts.push_back(name);
    };
    for (int u = 0; u < units; ++u) {
      write_unit(u, false);
      if (h.is_complex()) write_unit(u, true);
    }
    json stat;
    stat["layer"] = li;
    stat["units"] = units;
    stat["sparsity"] = json_num(static_cast<double>(sparse) / (n * units));
    layer_stats.push_back(stat);
  }

  json metrics;
  metrics["layers"] = layer_stats;
  metrics["hidden_width"] = model.width;
  json report = make_report(cfg, metrics, artifacts);
  write_report(dir, report);
  return report;
}

}  // namespace

json run_experiment(const ExperimentConfig& cfg) {
  if (cfg.task == "fit" || cfg.task == "denoise" || cfg.task == "superres" ||
      cfg.task == "multisr" || cfg.task == "ct") {
    ExperimentConfig resolved = cfg;
    if (resolved.task == "multisr" && resolved.op.warps.empty())
      resolved.op.warps = {{0.0, 0.0, 0.0},
                           {0.5, 0.25, 0.6},
                           {-0.3, 0.6, -0.7},
                           {0.25, -0.5, 0.3}};
    return run_reconstruction_task(resolved);
  }
  if (cfg.task == "ntk") return run_ntk_task(cfg);
  if (cfg.task == "sweep") return run_sweep_task(cfg);
  if (cfg.task == "dump_activations") return run_dump_task(cfg);
  throw std::invalid_argument("unknown task: " + cfg.task);
}

}  // namespace wire
