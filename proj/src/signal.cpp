#include "wire/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wire/rng.hpp"

namespace wire {

namespace {

double axis_value(int i, int n) {
  return n == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / (n - 1);
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// smooth random field: Gaussian bumps plus a soft-edged disk and a soft
// half-plane; a stand-in for natural image crops with a decaying spectrum
struct NaturalField {
  struct Bump {
    double cx, cy, s, amp;
  };
  std::vector<Bump> bumps;
  double disk_cx, disk_cy, disk_r, disk_amp;
  double edge_nx, edge_ny, edge_off, edge_amp;

  explicit NaturalField(std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < 40; ++i)
      bumps.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.08, 0.5),
                       rng.uniform(-0.5, 0.5)});
    disk_cx = rng.uniform(-0.4, 0.4);
    disk_cy = rng.uniform(-0.4, 0.4);
    disk_r = rng.uniform(0.3, 0.6);
    disk_amp = rng.uniform(0.25, 0.45);
    double phi = rng.uniform(0, 2 * 3.14159265358979323846);
    edge_nx = std::cos(phi);
    edge_ny = std::sin(phi);
    edge_off = rng.uniform(-0.3, 0.3);
    edge_amp = rng.uniform(0.15, 0.3);
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const auto& b : bumps) {
      double dx = x - b.cx, dy = y - b.cy;
      v += b.amp * std::exp(-(dx * dx + dy * dy) / (2 * b.s * b.s));
    }
    double dr = std::hypot(x - disk_cx, y - disk_cy) - disk_r;
    v += disk_amp * 0.5 * (1.0 - std::tanh(dr / 0.03));
    double de = edge_nx * x + edge_ny * y - edge_off;
    v += edge_amp * 0.5 * (1.0 + std::tanh(de / 0.05));
    return v;
  }
};

}  // namespace

CoordinateGrid make_grid(const Shape& dims) {
  if (dims.empty()) throw std::invalid_argument("make_grid: empty dims");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("make_grid: zero dimension");
  const int nd = static_cast<int>(dims.size());
  const std::size_t n = shape_numel(dims);
  CoordinateGrid g;
  g.dims = dims;
  g.coords = Tensor<double>({static_cast<int>(n), nd}, false);
  std::vector<int> idx(nd, 0);
  for (std::size_t row = 0; row < n; ++row) {
    for (int a = 0; a < nd; ++a) g.coords.re[row * nd + a] = axis_value(idx[a], dims[a]);
    for (int a = nd - 1; a >= 0; --a) {  // last axis fastest
      if (++idx[a] < dims[a]) break;
      idx[a] = 0;
    }
  }
  return g;
}

SignalGrid synth_signal(const std::string& kind, const Shape& dims,
                        const SynthParams& params, std::uint64_t seed) {
  SignalGrid out;
  out.dims = dims;
  out.channels = 1;
  const std::size_t n = shape_numel(dims);
  out.values = Tensor<double>({static_cast<int>(n), 1}, false);

  auto require_2d = [&] {
    if (dims.size() != 2)
      throw std::invalid_argument("synth_signal: " + kind + " needs 2-D dims");
  };

  if (kind == "siemens_star") {
    require_2d();
    const int h = dims[0], w = dims[1];
    // 2x2 supersampling softens the sector edges into [0,1]
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int sy = 0; sy < 2; ++sy)
          for (int sx = 0; sx < 2; ++sx) {
            double y = axis_value(r, h) + (sy - 0.5) / h;
            double x = axis_value(c, w) + (sx - 0.5) / w;
            double theta = std::atan2(y, x);
            acc += std::sin(params.spokes * theta) > 0 ? 1.0 : 0.0;
          }
        out.values.re[(std::size_t)r * w + c] = acc / 4.0;
      }
  } else if (kind == "point_field") {
    require_2d();
    if (params.count < 0 || static_cast<std::size_t>(params.count) > n)
      throw std::invalid_argument("synth_signal: point count out of range");
    Rng rng(seed);
    std::size_t placed = 0;
    while (placed < static_cast<std::size_t>(params.count)) {
      std::size_t p = rng.below(n);
      if (out.values.re[p] == 0.0) {
        out.values.re[p] = 1.0;
        ++placed;
      }
    }
  } else if (kind == "sphere_occupancy") {
    if (dims.size() != 3)
      throw std::invalid_argument("synth_signal: sphere_occupancy needs 3-D dims");
    CoordinateGrid g = make_grid(dims);
    for (std::size_t i = 0; i < n; ++i) {
      double x = g.coords.re[i * 3], y = g.coords.re[i * 3 + 1],
             z = g.coords.re[i * 3 + 2];
      out.values.re[i] = std::sqrt(x * x + y * y + z * z) < params.radius ? 1.0 : 0.0;
    }
  } else if (kind == "shepp_logan") {
    require_2d();
    // the usual ten-ellipse head phantom, intensities clamped to [0,1]
    static const double e[10][6] = {
        // A     a       b       x0    y0     phi(deg)
        {1.0, .69, .92, 0, 0, 0},
        {-0.8, .6624, .8740, 0, -.0184, 0},
        {-0.2, .1100, .3100, .22, 0, -18},
        {-0.2, .1600, .4100, -.22, 0, 18},
        {0.1, .2100, .2500, 0, .35, 0},
        {0.1, .0460, .0460, 0, .1, 0},
        {0.1, .0460, .0460, 0, -.1, 0},
        {0.1, .0460, .0230, -.08, -.605, 0},
        {0.1, .0230, .0230, 0, -.606, 0},
        {0.1, .0230, .0460, .06, -.605, 0}};
    const int h = dims[0], w = dims[1];
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double y = -axis_value(r, h);  // row 0 at the top
        double x = axis_value(c, w);
        double v = 0.0;
        for (const auto& el : e) {
          double phi = el[5] * 3.14159265358979323846 / 180.0;
          double xr = (x - el[3]) * std::cos(phi) + (y - el[4]) * std::sin(phi);
          double yr = -(x - el[3]) * std::sin(phi) + (y - el[4]) * std::cos(phi);
          if (xr * xr / (el[1] * el[1]) + yr * yr / (el[2] * el[2]) <= 1.0) v += el[0];
        }
        out.values.re[(std::size_t)r * w + c] = clamp01(v);
      }
  } else if (kind == "gaussian_noise_field") {
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i)
      out.values.re[i] = clamp01(0.5 + params.noise_sigma * rng.normal());
  } else if (kind == "natural") {
    require_2d();
    NaturalField f(seed);
    const int h = dims[0], w = dims[1];
    double lo = 1e300, hi = -1e300;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        double v = f(axis_value(c, w), axis_value(r, h));
        out.values.re[(std::size_t)r * w + c] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    double span = hi > lo ? hi - lo : 1.0;
    for (auto& v : out.values.re)
      v = std::min(0.95, std::max(0.05, 0.05 + 0.9 * (v - lo) / span));
  } else {
    throw std::invalid_argument("synth_signal: unknown kind: " + kind);
  }
  return out;
}

}  // namespace wire
