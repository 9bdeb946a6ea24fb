#include "wire/operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wire/rng.hpp"

namespace wire {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---- noise ------------------------------------------------------------------

Tensor<double> apply_noise(const Tensor<double>& clean, const NoiseModel& noise,
                           std::uint64_t seed) {
  Tensor<double> out = clean;
  switch (noise.kind) {
    case NoiseModel::Kind::None:
      break;
    case NoiseModel::Kind::Gaussian: {
      Rng rng(seed);
      for (auto& v : out.re) v += noise.sigma * rng.normal();
      break;
    }
    case NoiseModel::Kind::Photon: {
      if (noise.max_photons < 1)
        throw std::invalid_argument("photon noise: max_photons must be >= 1");
      for (double v : clean.re)
        if (v < 0)
          throw std::invalid_argument("photon noise: negative clean value");
      Rng rng(seed);
      for (auto& v : out.re) {
        double counts = rng.poisson(noise.max_photons * v);
        counts += noise.readout * rng.normal();
        v = counts / noise.max_photons;
      }
      break;
    }
  }
  return out;
}

// ---- sparse machinery ---------------------------------------------------------

SparseMap::SparseMap(std::size_t rows, std::size_t cols,
                     std::vector<std::vector<std::pair<std::uint32_t, double>>> entries)
    : rows_(rows), cols_(cols) {
  row_ptr_.reserve(rows + 1);
  row_ptr_.push_back(0);
  std::size_t nnz = 0;
  for (const auto& r : entries) nnz += r.size();
  col_.reserve(nnz);
  val_.reserve(nnz);
  for (auto& r : entries) {
    std::sort(r.begin(), r.end());
    const std::size_t row_start = col_.size();
    for (const auto& e : r) {
      if (col_.size() > row_start && col_.back() == e.first)
        val_.back() += e.second;  // merge duplicate columns
      else {
        col_.push_back(e.first);
        val_.push_back(e.second);
      }
    }
    row_ptr_.push_back(static_cast<std::uint32_t>(col_.size()));
  }
}

void SparseMap::apply(const double* x, double* y) const {
  for (std::size_t r = 0; r < rows_; ++r) {
    double acc = 0.0;
    for (std::uint32_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
      acc += val_[i] * x[col_[i]];
    y[r] = acc;
  }
}

void SparseMap::adjoint(const double* y, double* x) const {
  std::fill(x, x + cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::uint32_t i = row_ptr_[r]; i < row_ptr_[r + 1]; ++i)
      x[col_[i]] += val_[i] * y[r];
}

ChainMap::ChainMap(std::vector<std::shared_ptr<const LinearMap>> stages)
    : stages_(std::move(stages)) {
  for (std::size_t i = 1; i < stages_.size(); ++i)
    if (stages_[i]->in_size() != stages_[i - 1]->out_size())
      throw std::invalid_argument("chain map: stage size mismatch");
}

void ChainMap::apply(const double* x, double* y) const {
  std::vector<double> cur(x, x + stages_.front()->in_size());
  for (const auto& s : stages_) {
    std::vector<double> next(s->out_size());
    s->apply(cur.data(), next.data());
    cur = std::move(next);
  }
  std::copy(cur.begin(), cur.end(), y);
}

void ChainMap::adjoint(const double* y, double* x) const {
  std::vector<double> cur(y, y + stages_.back()->out_size());
  for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
    std::vector<double> next((*it)->in_size());
    (*it)->adjoint(cur.data(), next.data());
    cur = std::move(next);
  }
  std::copy(cur.begin(), cur.end(), x);
}

// ---- map builders --------------------------------------------------------------

std::shared_ptr<const LinearMap> make_identity_map(std::size_t n) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i].push_back({(std::uint32_t)i, 1.0});
  return std::make_shared<SparseMap>(n, n, std::move(rows));
}

std::shared_ptr<const LinearMap> make_downsample_map(int h, int w, int c, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample: factor must be >= 1");
  if (h % factor || w % factor)
    throw std::invalid_argument("downsample: dimensions " + std::to_string(h) + "x" +
                                std::to_string(w) + " not divisible by factor " +
                                std::to_string(factor));
  const int oh = h / factor, ow = w / factor;
  const double wgt = 1.0 / (factor * factor);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(
      (std::size_t)oh * ow * c);
  for (int r = 0; r < oh; ++r)
    for (int col = 0; col < ow; ++col)
      for (int ch = 0; ch < c; ++ch) {
        auto& entries = rows[((std::size_t)r * ow + col) * c + ch];
        for (int i = 0; i < factor; ++i)
          for (int j = 0; j < factor; ++j) {
            std::size_t src =
                ((std::size_t)(r * factor + i) * w + (col * factor + j)) * c + ch;
            entries.push_back({(std::uint32_t)src, wgt});
          }
      }
  return std::make_shared<SparseMap>((std::size_t)oh * ow * c, (std::size_t)h * w * c,
                                     std::move(rows));
}

std::shared_ptr<const LinearMap> make_warp_map(int h, int w, int c,
                                               const WarpSpec& spec) {
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  const double cosr = std::cos(-spec.rot), sinr = std::sin(-spec.rot);
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows((std::size_t)h * w * c);
  for (int r = 0; r < h; ++r)
    for (int col = 0; col < w; ++col) {
      // inverse transform: undo the shift, then rotate back about the center
      double px = col - spec.dx - cx;
      double py = r - spec.dy - cy;
      double sx = cosr * px - sinr * py + cx;
      double sy = sinr * px + cosr * py + cy;
      sx = std::min(std::max(sx, 0.0), (double)(w - 1));  // edge clamp
      sy = std::min(std::max(sy, 0.0), (double)(h - 1));
      int x0 = (int)std::floor(sx), y0 = (int)std::floor(sy);
      if (x0 >= w - 1) x0 = w - 2 >= 0 ? w - 2 : 0;
      if (y0 >= h - 1) y0 = h - 2 >= 0 ? h - 2 : 0;
      double fx = sx - x0, fy = sy - y0;
      if (w == 1) fx = 0;
      if (h == 1) fy = 0;
      const double tap[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx), fy * fx};
      const int px4[4] = {x0, std::min(x0 + 1, w - 1), x0, std::min(x0 + 1, w - 1)};
      const int py4[4] = {y0, y0, std::min(y0 + 1, h - 1), std::min(y0 + 1, h - 1)};
      for (int ch = 0; ch < c; ++ch) {
        auto& entries = rows[((std::size_t)r * w + col) * c + ch];
        for (int t = 0; t < 4; ++t)
          if (tap[t] != 0.0)
            entries.push_back(
                {(std::uint32_t)(((std::size_t)py4[t] * w + px4[t]) * c + ch), tap[t]});
      }
    }
  return std::make_shared<SparseMap>((std::size_t)h * w * c, (std::size_t)h * w * c,
                                     std::move(rows));
}

std::shared_ptr<const LinearMap> make_radon_map(int s, const std::vector<double>& angles,
                                                int detector_count) {
  if (angles.empty()) throw std::invalid_argument("radon: empty angle list");
  if (detector_count < 1) throw std::invalid_argument("radon: detector_count must be >= 1");
  const double ctr = (s - 1) / 2.0;
  const double det_pitch = static_cast<double>(s) / detector_count;
  const int t_max = static_cast<int>(std::ceil(s * 0.75));
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(
      (std::size_t)angles.size() * detector_count);

  for (std::size_t ai = 0; ai < angles.size(); ++ai) {
    const double ct = std::cos(angles[ai]), st = std::sin(angles[ai]);
    for (int d = 0; d < detector_count; ++d) {
      const double u = (d - (detector_count - 1) / 2.0) * det_pitch;
      std::map<std::uint32_t, double> acc;
      for (int t = -t_max; t <= t_max; ++t) {
        // beam sample: u along the detector axis, t along the ray
        double x = ctr + u * ct - t * st;
        double y = ctr + u * st + t * ct;
        if (x < 0 || y < 0 || x > s - 1 || y > s - 1) continue;
        int x0 = std::min((int)std::floor(x), s - 2 >= 0 ? s - 2 : 0);
        int y0 = std::min((int)std::floor(y), s - 2 >= 0 ? s - 2 : 0);
        double fx = x - x0, fy = y - y0;
        const double tap[4] = {(1 - fy) * (1 - fx), (1 - fy) * fx, fy * (1 - fx),
                               fy * fx};
        const int px4[4] = {x0, x0 + 1, x0, x0 + 1};
        const int py4[4] = {y0, y0, y0 + 1, y0 + 1};
        for (int k = 0; k < 4; ++k)
          if (tap[k] != 0.0) acc[(std::uint32_t)(py4[k] * s + px4[k])] += tap[k];
      }
      auto& entries = rows[ai * detector_count + d];
      entries.assign(acc.begin(), acc.end());
    }
  }
  return std::make_shared<SparseMap>((std::size_t)angles.size() * detector_count,
                                     (std::size_t)s * s, std::move(rows));
}

// ---- forward operators -----------------------------------------------------------

namespace {
void check_image_dims(const Shape& dims) {
  if (dims.size() != 2 && dims.size() != 3)
    throw std::invalid_argument("operator: dims must be [h,w] or [h,w,c], got " +
                                shape_str(dims));
}
int chan(const Shape& dims) { return dims.size() == 3 ? dims[2] : 1; }
}  // namespace

ForwardOperator ForwardOperator::identity(const Shape& dims, NoiseModel n) {
  ForwardOperator op;
  op.kind = "identity";
  op.input_dims = dims;
  op.output_dims = dims;
  op.noise = n;
  op.frames.push_back(make_identity_map(shape_numel(dims)));
  return op;
}

ForwardOperator ForwardOperator::downsample(const Shape& dims, int factor, NoiseModel n) {
  check_image_dims(dims);
  ForwardOperator op;
  op.kind = "downsample";
  op.input_dims = dims;
  op.noise = n;
  const int c = chan(dims);
  op.frames.push_back(make_downsample_map(dims[0], dims[1], c, factor));
  op.output_dims = dims.size() == 3 ? Shape{dims[0] / factor, dims[1] / factor, c}
                                    : Shape{dims[0] / factor, dims[1] / factor};
  return op;
}

ForwardOperator ForwardOperator::warp_downsample(const Shape& dims,
                                                 const std::vector<WarpSpec>& warps,
                                                 int factor, NoiseModel n) {
  check_image_dims(dims);
  if (warps.empty()) throw std::invalid_argument("warp_downsample: no warps given");
  for (const auto& wsp : warps) {
    if (std::abs(wsp.dx) > 2.0 + 1e-12 || std::abs(wsp.dy) > 2.0 + 1e-12)
      throw std::invalid_argument("warp: |shift| must be <= 2 pixels");
    if (std::abs(wsp.rot) > 5.0 * kPi / 180.0 + 1e-12)
      throw std::invalid_argument("warp: |rotation| must be <= 5 degrees");
  }
  ForwardOperator op;
  op.kind = "warp_downsample";
  op.input_dims = dims;
  op.noise = n;
  const int c = chan(dims);
  auto down = make_downsample_map(dims[0], dims[1], c, factor);
  for (const auto& wsp : warps) {
    auto warp = make_warp_map(dims[0], dims[1], c, wsp);
    op.frames.push_back(std::make_shared<ChainMap>(
        std::vector<std::shared_ptr<const LinearMap>>{warp, down}));
  }
  op.output_dims = Shape{(int)warps.size(), dims[0] / factor, dims[1] / factor};
  if (dims.size() == 3) op.output_dims.push_back(c);
  return op;
}

ForwardOperator ForwardOperator::radon(const Shape& dims,
                                       const std::vector<double>& angles,
                                       int detector_count, NoiseModel n) {
  if (dims.size() != 2 || dims[0] != dims[1])
    throw std::invalid_argument("radon: square single-channel image required, got " +
                                shape_str(dims));
  for (double a : angles)
    if (a < 0 || a >= kPi) throw std::invalid_argument("radon: angles must be in [0, pi)");
  ForwardOperator op;
  op.kind = "radon";
  op.input_dims = dims;
  op.noise = n;
  op.frames.push_back(make_radon_map(dims[0], angles, detector_count));
  op.output_dims = {(int)angles.size(), detector_count};
  return op;
}

Tensor<double> ForwardOperator::apply_clean(const Tensor<double>& img) const {
  if (img.numel() != shape_numel(input_dims))
    throw std::invalid_argument("operator: image size " + shape_str(img.shape) +
                                " does not match input dims " + shape_str(input_dims));
  Tensor<double> out(output_dims, false);
  if (frames.size() == 1) {
    frames[0]->apply(img.re.data(), out.re.data());
  } else {
    std::size_t off = 0;
    for (const auto& f : frames) {
      f->apply(img.re.data(), out.re.data() + off);
      off += f->out_size();
    }
  }
  return out;
}

Tensor<double> ForwardOperator::measure(const Tensor<double>& img,
                                        std::uint64_t seed) const {
  return apply_noise(apply_clean(img), noise, seed);
}

bool superposition_check(const ForwardOperator& op, const Tensor<double>& a,
                         const Tensor<double>& b, double alpha, double tol) {
  Tensor<double> mix = a;
  for (std::size_t i = 0; i < mix.numel(); ++i) mix.re[i] = alpha * a.re[i] + b.re[i];
  Tensor<double> lhs = op.apply_clean(mix);
  Tensor<double> ya = op.apply_clean(a);
  Tensor<double> yb = op.apply_clean(b);
  for (std::size_t i = 0; i < lhs.numel(); ++i)
    if (std::abs(lhs.re[i] - (alpha * ya.re[i] + yb.re[i])) > tol) return false;
  return true;
}

Tensor<double> bilinear_upsample(const Tensor<double>& img, int h, int w, int factor) {
  const int oh = h * factor, ow = w * factor;
  Tensor<double> out({oh, ow}, false);
  for (int r = 0; r < oh; ++r)
    for (int c = 0; c < ow; ++c) {
      double sy = (r + 0.5) / factor - 0.5;
      double sx = (c + 0.5) / factor - 0.5;
      sy = std::min(std::max(sy, 0.0), (double)(h - 1));
      sx = std::min(std::max(sx, 0.0), (double)(w - 1));
      int y0 = std::min((int)std::floor(sy), h - 2 >= 0 ? h - 2 : 0);
      int x0 = std::min((int)std::floor(sx), w - 2 >= 0 ? w - 2 : 0);
      double fy = sy - y0, fx = sx - x0;
      out.re[(std::size_t)r * ow + c] =
          (1 - fy) * ((1 - fx) * img.re[(std::size_t)y0 * w + x0] +
                      fx * img.re[(std::size_t)y0 * w + x0 + 1]) +
          fy * ((1 - fx) * img.re[(std::size_t)(y0 + 1) * w + x0] +
                fx * img.re[(std::size_t)(y0 + 1) * w + x0 + 1]);
    }
  return out;
}

Tensor<double> downsample_image(const Tensor<double>& img, int h, int w, int c,
                                int factor) {
  auto map = make_downsample_map(h, w, c, factor);
  Tensor<double> out(c > 1 ? Shape{h / factor, w / factor, c}
                           : Shape{h / factor, w / factor},
                     false);
  map->apply(img.re.data(), out.re.data());
  return out;
}

Tensor<double> warp_image(const Tensor<double>& img, int h, int w, int c,
                          const WarpSpec& spec) {
  auto map = make_warp_map(h, w, c, spec);
  Tensor<double> out(img.shape, false);
  map->apply(img.re.data(), out.re.data());
  return out;
}

Tensor<double> radon_sinogram(const Tensor<double>& img, int s,
                              const std::vector<double>& angles, int detector_count) {
  auto map = make_radon_map(s, angles, detector_count);
  Tensor<double> out({(int)angles.size(), detector_count}, false);
  map->apply(img.re.data(), out.re.data());
  return out;
}

std::vector<double> uniform_angles(int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = kPi * i / count;
  return out;
}

}  // namespace wire
