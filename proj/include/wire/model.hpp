#pragma once

// Coordinate MLP: y_m = act(W_m y_{m-1} + b_m) for m = 1..M, then a final
// linear layer; complex models return the real part. Weights are stored
// [fan_in x fan_out] so coordinate batches multiply from the left.
//
// Parameter parity: a complex-weight model built with reference width F uses
// round(F / sqrt(2 * windows)) hidden features, matching the real-model
// parameter budget.

#include <cstdint>
#include <cstring>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wire/activations.hpp"
#include "wire/autodiff.hpp"
#include "wire/rng.hpp"
#include "wire/tensor.hpp"

namespace wire {

enum class InitScheme { StandardUniform, SirenLike };

inline const char* init_scheme_name(InitScheme s) {
  return s == InitScheme::StandardUniform ? "standard_uniform" : "siren_like";
}
inline InitScheme parse_init_scheme(const std::string& s) {
  if (s == "standard_uniform") return InitScheme::StandardUniform;
  if (s == "siren_like") return InitScheme::SirenLike;
  throw std::invalid_argument("unknown init scheme: " + s);
}

struct ModelConfig {
  int input_dim = 2;
  int output_dim = 1;
  int hidden_layers = 3;
  int hidden_features = 256;  // reference width of the real-weight model
  ActivationKind activation;
  InitScheme init = InitScheme::StandardUniform;
  std::uint64_t seed = 1;
};

template <class T>
struct InrModel {
  ModelConfig cfg;
  int width = 0;              // parity-adjusted hidden width
  int encoded_input_dim = 0;  // after positional encoding, if any

  struct Layer {
    std::vector<Tensor<T>> w;  // one per window; [fan_in x fan_out]
    std::vector<Tensor<T>> b;  // one per window; [fan_out]
  };
  std::vector<Layer> layers;  // hidden_layers entries + final linear layer

  static int parity_width(int features, const ActivationKind& act) {
    if (!act.complex_weights()) return features;
    double d = std::sqrt(2.0 * act.window_count());
    return static_cast<int>(std::lround(features / d));
  }

  static InrModel build(const ModelConfig& cfg) {
    cfg.activation.validate();
    if (cfg.input_dim < 1 || cfg.output_dim < 1 || cfg.hidden_layers < 1 ||
        cfg.hidden_features < 1)
      throw std::invalid_argument("model: all dimensions must be >= 1");
    InrModel m;
    m.cfg = cfg;
    m.width = parity_width(cfg.hidden_features, cfg.activation);
    if (m.width < 1) throw std::invalid_argument("model: parity width underflow");
    const bool relu_pe = cfg.activation.type == ActivationKind::Type::ReluPE;
    const int L = cfg.activation.pe_frequencies;
    m.encoded_input_dim = relu_pe && L >= 1 ? 2 * L * cfg.input_dim : cfg.input_dim;

    const bool cplx = cfg.activation.complex_weights();
    const int d = cfg.activation.window_count();
    int fan_in = m.encoded_input_dim;
    for (int layer = 0; layer < cfg.hidden_layers; ++layer) {
      Layer l;
      for (int k = 0; k < d; ++k) {
        l.w.push_back(Tensor<T>({fan_in, m.width}, cplx));
        l.b.push_back(Tensor<T>({m.width}, cplx));
      }
      m.layers.push_back(std::move(l));
      fan_in = m.width;
    }
    Layer fin;
    fin.w.push_back(Tensor<T>({fan_in, cfg.output_dim}, cplx));
    fin.b.push_back(Tensor<T>({cfg.output_dim}, cplx));
    m.layers.push_back(std::move(fin));

    m.init_weights(cfg.init, cfg.seed);
    return m;
  }

  // StandardUniform: U(-1/sqrt(N), 1/sqrt(N)) everywhere.
  // SirenLike: first layer U(-1/N, 1/N), later layers
  // U(-sqrt(6/(omega0*N)), sqrt(6/(omega0*N))); N = fan-in.
  // Complex parameters draw re and im independently from the same law;
  // biases are drawn like the weights of their layer.
  void init_weights(InitScheme scheme, std::uint64_t seed) {
    if (scheme == InitScheme::SirenLike && cfg.activation.eff_omega0() <= 0)
      throw std::invalid_argument("siren_like init requires omega0 > 0");
    cfg.init = scheme;
    cfg.seed = seed;
    Rng rng(seed);
    for (std::size_t li = 0; li < layers.size(); ++li) {
      const int fan_in = layers[li].w[0].shape[0];
      double c;
      if (scheme == InitScheme::StandardUniform)
        c = 1.0 / std::sqrt(static_cast<double>(fan_in));
      else if (li == 0)
        c = 1.0 / static_cast<double>(fan_in);
      else
        c = std::sqrt(6.0 / (cfg.activation.eff_omega0() * fan_in));
      for (std::size_t k = 0; k < layers[li].w.size(); ++k) {
        fill_uniform(layers[li].w[k], c, rng);
        fill_uniform(layers[li].b[k], c, rng);
      }
    }
  }

  std::vector<Tensor<T>*> parameters() {
    std::vector<Tensor<T>*> out;
    for (auto& l : layers) {
      for (std::size_t k = 0; k < l.w.size(); ++k) {
        out.push_back(&l.w[k]);
        out.push_back(&l.b[k]);
      }
    }
    return out;
  }
  std::vector<const Tensor<T>*> parameters() const {
    std::vector<const Tensor<T>*> out;
    for (auto& l : layers) {
      for (std::size_t k = 0; k < l.w.size(); ++k) {
        out.push_back(&l.w[k]);
        out.push_back(&l.b[k]);
      }
    }
    return out;
  }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const Tensor<T>* p : parameters()) n += p->numel() * (p->is_complex() ? 2 : 1);
    return n;
  }

  Tensor<T> encode(const Tensor<T>& coords) const {
    if (coords.shape.size() != 2 || coords.shape[1] != cfg.input_dim)
      throw std::invalid_argument("coordinate dimension mismatch: expected [N x " +
                                  std::to_string(cfg.input_dim) + "], got " +
                                  shape_str(coords.shape));
    if (cfg.activation.type == ActivationKind::Type::ReluPE &&
        cfg.activation.pe_frequencies >= 1)
      return positional_encoding(coords, cfg.activation.pe_frequencies);
    return coords;
  }

  struct Bound {
    std::vector<int> params;  // leaf ids, same order as parameters()
    std::vector<int> hidden;  // post-activation node per hidden layer
    int output = -1;          // real [N x output_dim]
  };

  // Assembles the forward graph over already-encoded inputs. When train is
  // false the parameters enter as plain inputs and backward never touches
  // them.
  Bound bind(Graph<T>& g, int encoded_input_node, bool train) const {
    Bound r;
    int h = encoded_input_node;
    for (std::size_t li = 0; li < layers.size(); ++li) {
      const Layer& l = layers[li];
      std::vector<int> zs;
      std::vector<int> wids;
      for (std::size_t k = 0; k < l.w.size(); ++k) {
        int wid = train ? g.param(l.w[k]) : g.input(l.w[k]);
        int bid = train ? g.param(l.b[k]) : g.input(l.b[k]);
        r.params.push_back(wid);
        r.params.push_back(bid);
        zs.push_back(g.add_bias(g.matmul(h, wid), bid));
      }
      if (li + 1 < layers.size()) {
        h = apply_activation(g, cfg.activation, zs);
        r.hidden.push_back(h);
      } else {
        h = zs[0];
      }
    }
    r.output = g.real_part(h);
    return r;
  }

  Tensor<T> forward(const Tensor<T>& coords) const {
    Graph<T> g;
    Bound b = bind(g, g.input(encode(coords)), false);
    return g.value(b.output);
  }

  std::vector<Tensor<T>> hidden_activations(const Tensor<T>& coords) const {
    Graph<T> g;
    Bound b = bind(g, g.input(encode(coords)), false);
    std::vector<Tensor<T>> out;
    for (int id : b.hidden) out.push_back(g.value(id));
    return out;
  }

  void save_checkpoint(const std::string& path) const;
  static InrModel load_checkpoint(const std::string& path);

 private:
  static void fill_uniform(Tensor<T>& t, double c, Rng& rng) {
    for (auto& v : t.re) v = static_cast<T>(c * (2.0 * rng.uniform() - 1.0));
    for (auto& v : t.im) v = static_cast<T>(c * (2.0 * rng.uniform() - 1.0));
  }
};

// ---- checkpoint container (versioned, little-endian, f64 payload) ----------

namespace ckpt_detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}
inline void put_f64(std::ostream& os, double d) {
  std::uint64_t v;
  static_assert(sizeof v == sizeof d);
  std::memcpy(&v, &d, sizeof v);
  put_u64(os, v);
}
inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw std::runtime_error("checkpoint: truncated payload");
  return (std::uint32_t)b[0] | ((std::uint32_t)b[1] << 8) | ((std::uint32_t)b[2] << 16) |
         ((std::uint32_t)b[3] << 24);
}
inline std::uint64_t get_u64(std::istream& is) {
  std::uint64_t lo = get_u32(is);
  std::uint64_t hi = get_u32(is);
  return lo | (hi << 32);
}
inline double get_f64(std::istream& is) {
  std::uint64_t v = get_u64(is);
  double d;
  std::memcpy(&d, &v, sizeof d);
  return d;
}

inline constexpr char kMagic[8] = {'W', 'I', 'R', 'E', 'C', 'K', 'P', '1'};

}  // namespace ckpt_detail

template <class T>
void InrModel<T>::save_checkpoint(const std::string& path) const {
  namespace cd = ckpt_detail;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path);
  os.write(cd::kMagic, 8);
  cd::put_u32(os, 1);  // version
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.activation.type));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.init));
  cd::put_f64(os, cfg.activation.omega0);
  cd::put_f64(os, cfg.activation.sigma0);
  cd::put_f64(os, cfg.activation.q);
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.activation.pe_frequencies));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.activation.windows));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.input_dim));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.output_dim));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.hidden_layers));
  cd::put_u32(os, static_cast<std::uint32_t>(cfg.hidden_features));
  cd::put_u64(os, cfg.seed);

  auto params = parameters();
  cd::put_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const Tensor<T>* p : params) {
    cd::put_u32(os, p->is_complex() ? 1 : 0);
    cd::put_u32(os, static_cast<std::uint32_t>(p->shape.size()));
    for (int d : p->shape) cd::put_u32(os, static_cast<std::uint32_t>(d));
    for (T v : p->re) cd::put_f64(os, static_cast<double>(v));
    for (T v : p->im) cd::put_f64(os, static_cast<double>(v));
  }
  if (!os) throw std::runtime_error("checkpoint: write failed: " + path);
}

template <class T>
InrModel<T> InrModel<T>::load_checkpoint(const std::string& path) {
  namespace cd = ckpt_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, cd::kMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path);
  std::uint32_t version = cd::get_u32(is);
  if (version != 1)
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));

  ModelConfig cfg;
  cfg.activation.type = static_cast<ActivationKind::Type>(cd::get_u32(is));
  cfg.init = static_cast<InitScheme>(cd::get_u32(is));
  cfg.activation.omega0 = cd::get_f64(is);
  cfg.activation.sigma0 = cd::get_f64(is);
  cfg.activation.q = cd::get_f64(is);
  cfg.activation.pe_frequencies = static_cast<int>(cd::get_u32(is));
  cfg.activation.windows = static_cast<int>(cd::get_u32(is));
  cfg.input_dim = static_cast<int>(cd::get_u32(is));
  cfg.output_dim = static_cast<int>(cd::get_u32(is));
  cfg.hidden_layers = static_cast<int>(cd::get_u32(is));
  cfg.hidden_features = static_cast<int>(cd::get_u32(is));
  cfg.seed = cd::get_u64(is);

  InrModel m = build(cfg);
  auto params = m.parameters();
  std::uint32_t count = cd::get_u32(is);
  if (count != params.size())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (Tensor<T>* p : params) {
    bool cplx = cd::get_u32(is) != 0;
    std::uint32_t nd = cd::get_u32(is);
    Shape shape(nd);
    for (auto& d : shape) d = static_cast<int>(cd::get_u32(is));
    if (shape != p->shape || cplx != p->is_complex())
      throw std::runtime_error("checkpoint: tensor layout mismatch");
    for (auto& v : p->re) v = static_cast<T>(cd::get_f64(is));
    for (auto& v : p->im) v = static_cast<T>(cd::get_f64(is));
  }
  return m;
}

}  // namespace wire
