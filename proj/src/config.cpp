#include "wire/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace wire {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config: " + path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
}

double get_num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}
int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}
bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}
std::string get_str(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}
Shape get_dims(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of sizes");
  Shape out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<int>() < 1) fail(path, "sizes must be >= 1");
    out.push_back(v.get<int>());
  }
  return out;
}
std::vector<double> get_num_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(path, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void parse_model(const json& j, ModelSpec& m) {
  check_keys(j, "model",
             {"hidden_layers", "hidden_features", "activation", "omega0", "sigma0", "q",
              "pe_frequencies", "windows", "init"});
  if (j.contains("hidden_layers")) m.hidden_layers = get_int(j["hidden_layers"], "model.hidden_layers");
  if (j.contains("hidden_features"))
    m.hidden_features = get_int(j["hidden_features"], "model.hidden_features");
  if (j.contains("activation")) m.activation = get_str(j["activation"], "model.activation");
  if (j.contains("omega0")) m.omega0 = get_num(j["omega0"], "model.omega0");
  if (j.contains("sigma0")) m.sigma0 = get_num(j["sigma0"], "model.sigma0");
  if (j.contains("q")) m.q = get_num(j["q"], "model.q");
  if (j.contains("pe_frequencies"))
    m.pe_frequencies = get_int(j["pe_frequencies"], "model.pe_frequencies");
  if (j.contains("windows")) m.windows = get_int(j["windows"], "model.windows");
  if (j.contains("init")) m.init = get_str(j["init"], "model.init");
}

void parse_train(const json& j, TrainSpec& t) {
  check_keys(j, "train",
             {"lr", "steps", "lr_final_factor", "batch", "seed", "track_best",
              "precision", "eval_every", "ssim_every"});
  if (j.contains("lr")) t.lr = get_num(j["lr"], "train.lr");
  if (j.contains("steps")) t.steps = get_int(j["steps"], "train.steps");
  if (j.contains("lr_final_factor"))
    t.lr_final_factor = get_num(j["lr_final_factor"], "train.lr_final_factor");
  if (j.contains("batch")) t.batch = get_int(j["batch"], "train.batch");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      fail("train.seed", "expected an integer");
    t.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("track_best")) t.track_best = get_bool(j["track_best"], "train.track_best");
  if (j.contains("precision")) {
    t.precision = get_str(j["precision"], "train.precision");
    if (t.precision != "f32" && t.precision != "f64")
      fail("train.precision", "must be f32 or f64");
  }
  if (j.contains("eval_every")) t.eval_every = get_int(j["eval_every"], "train.eval_every");
  if (j.contains("ssim_every")) t.ssim_every = get_int(j["ssim_every"], "train.ssim_every");
}

void parse_operator(const json& j, OperatorSpec& o) {
  check_keys(j, "operator",
             {"noise", "sigma", "max_photons", "readout", "factor", "warps", "angles",
              "detectors"});
  if (j.contains("noise")) {
    o.noise = get_str(j["noise"], "operator.noise");
    if (o.noise != "none" && o.noise != "gaussian" && o.noise != "photon")
      fail("operator.noise", "must be none, gaussian, or photon");
  }
  if (j.contains("sigma")) o.sigma = get_num(j["sigma"], "operator.sigma");
  if (j.contains("max_photons")) o.max_photons = get_num(j["max_photons"], "operator.max_photons");
  if (j.contains("readout")) o.readout = get_num(j["readout"], "operator.readout");
  if (j.contains("factor")) o.factor = get_int(j["factor"], "operator.factor");
  if (j.contains("angles")) o.angles = get_int(j["angles"], "operator.angles");
  if (j.contains("detectors")) o.detectors = get_int(j["detectors"], "operator.detectors");
  if (j.contains("warps")) {
    if (!j["warps"].is_array()) fail("operator.warps", "expected an array");
    for (const auto& w : j["warps"]) {
      check_keys(w, "operator.warps[]", {"dx", "dy", "rot_deg"});
      OperatorSpec::Warp ws;
      if (w.contains("dx")) ws.dx = get_num(w["dx"], "operator.warps[].dx");
      if (w.contains("dy")) ws.dy = get_num(w["dy"], "operator.warps[].dy");
      if (w.contains("rot_deg")) ws.rot_deg = get_num(w["rot_deg"], "operator.warps[].rot_deg");
      o.warps.push_back(ws);
    }
  }
}

void parse_ntk(const json& j, NtkSpec& n) {
  check_keys(j, "ntk", {"grid", "cap", "activations", "times", "noise_sigma"});
  if (j.contains("grid")) n.grid = get_dims(j["grid"], "ntk.grid");
  if (j.contains("cap")) n.cap = get_int(j["cap"], "ntk.cap");
  if (j.contains("times")) n.times = get_int(j["times"], "ntk.times");
  if (j.contains("noise_sigma")) n.noise_sigma = get_num(j["noise_sigma"], "ntk.noise_sigma");
  if (j.contains("activations")) {
    if (!j["activations"].is_array()) fail("ntk.activations", "expected an array");
    for (const auto& a : j["activations"])
      n.activations.push_back(get_str(a, "ntk.activations[]"));
  }
}

void parse_sweep(const json& j, SweepSpec& s) {
  check_keys(j, "sweep", {"axis", "task", "omega0", "sigma0", "values"});
  if (j.contains("axis")) {
    s.axis = get_str(j["axis"], "sweep.axis");
    static const std::set<std::string> axes = {"omega0_sigma0", "lr", "layers",
                                               "features", "projections"};
    if (!axes.count(s.axis)) fail("sweep.axis", "unknown axis " + s.axis);
  }
  if (j.contains("task")) s.task = get_str(j["task"], "sweep.task");
  if (j.contains("omega0")) s.omega0 = get_num_list(j["omega0"], "sweep.omega0");
  if (j.contains("sigma0")) s.sigma0 = get_num_list(j["sigma0"], "sweep.sigma0");
  if (j.contains("values")) s.values = get_num_list(j["values"], "sweep.values");
}

void parse_io(const json& j, IoSpec& io) {
  check_keys(j, "io", {"input", "synth", "out"});
  if (j.contains("input")) io.input = get_str(j["input"], "io.input");
  if (j.contains("out")) io.out = get_str(j["out"], "io.out");
  if (j.contains("synth")) {
    const json& s = j["synth"];
    check_keys(s, "io.synth", {"kind", "dims", "seed", "spokes", "count", "radius",
                               "noise_sigma"});
    if (s.contains("kind")) io.synth_kind = get_str(s["kind"], "io.synth.kind");
    if (s.contains("dims")) io.synth_dims = get_dims(s["dims"], "io.synth.dims");
    if (s.contains("seed")) io.synth_seed = s["seed"].get<std::uint64_t>();
    if (s.contains("spokes")) io.synth_params.spokes = get_int(s["spokes"], "io.synth.spokes");
    if (s.contains("count")) io.synth_params.count = get_int(s["count"], "io.synth.count");
    if (s.contains("radius")) io.synth_params.radius = get_num(s["radius"], "io.synth.radius");
    if (s.contains("noise_sigma"))
      io.synth_params.noise_sigma = get_num(s["noise_sigma"], "io.synth.noise_sigma");
  }
}

void parse_dump(const json& j, DumpSpec& d) {
  check_keys(j, "dump", {"checkpoint", "grid"});
  if (j.contains("checkpoint")) d.checkpoint = get_str(j["checkpoint"], "dump.checkpoint");
  if (j.contains("grid")) d.grid = get_dims(j["grid"], "dump.grid");
}

}  // namespace

ActivationKind ModelSpec::resolve_activation() const {
  ActivationKind act = ActivationKind::parse(activation);
  if (omega0) act.omega0 = *omega0;
  if (sigma0) act.sigma0 = *sigma0;
  if (q) {
    act.q = *q;
    if (act.type != ActivationKind::Type::ConstantQ)
      act.q = *q;  // stored but only constant_q consumes it
  }
  if (pe_frequencies) act.pe_frequencies = *pe_frequencies;
  if (windows) act.windows = *windows;
  act.validate();
  return act;
}

NoiseModel OperatorSpec::resolve_noise() const {
  if (noise == "gaussian") return NoiseModel::gaussian(sigma);
  if (noise == "photon") return NoiseModel::photon(max_photons, readout);
  return NoiseModel::none();
}

double ExperimentConfig::resolved_lr() const {
  if (train.lr) return *train.lr;
  return task == "denoise" ? 2e-2 : 5e-3;
}

int ExperimentConfig::resolved_batch(std::size_t grid_points) const {
  if (train.batch) return *train.batch;
  return grid_points <= 128u * 128u ? 0 : 8192;
}

ModelConfig ExperimentConfig::model_config(int input_dim, int output_dim) const {
  ModelConfig mc;
  mc.input_dim = input_dim;
  mc.output_dim = output_dim;
  mc.hidden_layers = model.hidden_layers;
  mc.hidden_features = model.hidden_features;
  mc.activation = model.resolve_activation();
  mc.init = parse_init_scheme(model.init);
  mc.seed = train.seed;
  return mc;
}

TrainConfig ExperimentConfig::train_config(std::size_t grid_points) const {
  TrainConfig tc;
  tc.lr = resolved_lr();
  tc.steps = train.steps;
  tc.lr_final_factor = train.lr_final_factor;
  tc.batch = resolved_batch(grid_points);
  tc.seed = derive_seed(train.seed, 2);
  tc.track_best = train.track_best;
  tc.eval_every = train.eval_every;
  tc.ssim_every = train.ssim_every;
  tc.validate();
  return tc;
}

nlohmann::json ExperimentConfig::resolved_json() const {
  nlohmann::json j;
  j["version"] = version;
  j["task"] = task;
  ActivationKind act = model.resolve_activation();
  j["model"] = {{"hidden_layers", model.hidden_layers},
                {"hidden_features", model.hidden_features},
                {"activation", act.name()},
                {"omega0", act.omega0},
                {"sigma0", act.sigma0},
                {"q", act.q},
                {"pe_frequencies", act.pe_frequencies},
                {"windows", act.windows},
                {"init", model.init}};
  j["train"] = {{"lr", resolved_lr()},
                {"steps", train.steps},
                {"lr_final_factor", train.lr_final_factor},
                {"batch", train.batch ? nlohmann::json(*train.batch) : nlohmann::json("auto")},
                {"seed", train.seed},
                {"track_best", train.track_best},
                {"precision", train.precision},
                {"eval_every", train.eval_every},
                {"ssim_every", train.ssim_every}};
  nlohmann::json warps = nlohmann::json::array();
  for (const auto& w : op.warps)
    warps.push_back({{"dx", w.dx}, {"dy", w.dy}, {"rot_deg", w.rot_deg}});
  j["operator"] = {{"noise", op.noise},       {"sigma", op.sigma},
                   {"max_photons", op.max_photons}, {"readout", op.readout},
                   {"factor", op.factor},     {"warps", warps},
                   {"angles", op.angles},     {"detectors", op.detectors}};
  j["ntk"] = {{"grid", ntk.grid},
              {"cap", ntk.cap},
              {"activations", ntk.activations},
              {"times", ntk.times},
              {"noise_sigma", ntk.noise_sigma}};
  j["sweep"] = {{"axis", sweep.axis},
                {"task", sweep.task},
                {"omega0", sweep.omega0},
                {"sigma0", sweep.sigma0},
                {"values", sweep.values}};
  j["io"] = {{"input", io.input},
             {"synth",
              {{"kind", io.synth_kind},
               {"dims", io.synth_dims},
               {"seed", io.synth_seed},
               {"spokes", io.synth_params.spokes},
               {"count", io.synth_params.count},
               {"radius", io.synth_params.radius},
               {"noise_sigma", io.synth_params.noise_sigma}}}};
  j["dump"] = {{"checkpoint", dump.checkpoint}, {"grid", dump.grid}};
  return j;
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "config",
             {"version", "task", "model", "train", "operator", "ntk", "sweep", "io",
              "dump"});
  ExperimentConfig cfg;
  if (j.contains("version")) {
    cfg.version = get_int(j["version"], "version");
    if (cfg.version != 1) fail("version", "unsupported config version");
  }
  if (j.contains("task")) {
    cfg.task = get_str(j["task"], "task");
    static const std::set<std::string> tasks = {"fit",  "denoise", "superres",
                                                "multisr", "ct",   "ntk",
                                                "sweep", "dump_activations"};
    if (!tasks.count(cfg.task)) fail("task", "unknown task " + cfg.task);
  }
  if (j.contains("model")) parse_model(j["model"], cfg.model);
  if (j.contains("train")) parse_train(j["train"], cfg.train);
  if (j.contains("operator")) parse_operator(j["operator"], cfg.op);
  if (j.contains("ntk")) parse_ntk(j["ntk"], cfg.ntk);
  if (j.contains("sweep")) parse_sweep(j["sweep"], cfg.sweep);
  if (j.contains("io")) parse_io(j["io"], cfg.io);
  if (j.contains("dump")) parse_dump(j["dump"], cfg.dump);
  cfg.model.resolve_activation();  // validate eagerly
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path + ": " + e.what());
  }
  return parse_config(j);
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must look like key.path=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);

  nlohmann::json* cur = &j;
  std::size_t start = 0;
  while (true) {
    auto dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty()) throw std::invalid_argument("override has an empty key: " + assignment);
    if (dot == std::string::npos) {
      nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
      (*cur)[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
      return;
    }
    cur = &((*cur)[key]);
    start = dot + 1;
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  // splitmix64 step over (master + stream offset)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace wire
