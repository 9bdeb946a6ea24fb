#include "wire/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wire/serial.hpp"

namespace wire {

namespace {

int read_pnm_token(std::istream& is) {
  // skips whitespace and '#' comments
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      is.unget();
      break;
    }
  }
  int value;
  if (!(is >> value)) throw std::runtime_error("image: malformed header");
  return value;
}

constexpr char kTensorMagic[8] = {'W', 'T', 'E', 'N', 'S', 'R', '0', '1'};

}  // namespace

SignalGrid load_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("image: cannot open: " + path);
  char p, kind;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '5' && kind != '6'))
    throw std::runtime_error("image: unsupported format (need binary P5/P6): " + path);
  int w = read_pnm_token(is);
  int h = read_pnm_token(is);
  int maxval = read_pnm_token(is);
  if (maxval != 255)
    throw std::runtime_error("image: unsupported maxval " + std::to_string(maxval));
  is.get();  // single whitespace before payload

  SignalGrid img;
  img.dims = {h, w};
  img.channels = kind == '6' ? 3 : 1;
  const std::size_t count = static_cast<std::size_t>(h) * w * img.channels;
  std::vector<unsigned char> bytes(count);
  is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (!is) throw std::runtime_error("image: truncated payload: " + path);
  img.values = Tensor<double>({h * w, img.channels}, false);
  for (std::size_t i = 0; i < count; ++i) img.values.re[i] = bytes[i] / 255.0;
  return img;
}

void save_image(const SignalGrid& img, const std::string& path) {
  if (img.dims.size() != 2)
    throw std::invalid_argument("image: save needs 2-D dims, got " + shape_str(img.dims));
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("image: channels must be 1 or 3");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("image: cannot open for writing: " + path);
  os << (img.channels == 3 ? "P6" : "P5") << "\n"
     << img.dims[1] << " " << img.dims[0] << "\n255\n";
  const std::size_t count = img.values.numel();
  std::vector<unsigned char> bytes(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = std::floor(img.values.re[i] * 255.0 + 0.5);  // round half up
    bytes[i] = static_cast<unsigned char>(v < 0 ? 0 : (v > 255 ? 255 : v));
  }
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(count));
  if (!os) throw std::runtime_error("image: write failed: " + path);
}

void save_tensor(const Tensor<double>& t, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("container: cannot open for writing: " + path);
  os.write(kTensorMagic, 8);
  serial::put_u32(os, 1);  // version
  serial::put_u32(os, 1);  // dtype: float64
  serial::put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
  for (int d : t.shape) serial::put_u64(os, static_cast<std::uint64_t>(d));
  for (double v : t.re) serial::put_f64(os, v);
  if (!os) throw std::runtime_error("container: write failed: " + path);
}

Tensor<double> load_tensor(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("container: cannot open: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kTensorMagic, 8) != 0)
    throw std::runtime_error("container: bad magic in " + path);
  std::uint32_t version = serial::get_u32(is);
  if (version != 1)
    throw std::runtime_error("container: unsupported version " + std::to_string(version));
  std::uint32_t dtype = serial::get_u32(is);
  if (dtype != 1) throw std::runtime_error("container: unsupported dtype");
  std::uint32_t nd = serial::get_u32(is);
  Shape shape(nd);
  for (auto& d : shape) d = static_cast<int>(serial::get_u64(is));
  Tensor<double> t(shape, false);
  for (auto& v : t.re) v = serial::get_f64(is);
  return t;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  // shortest representation that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("csv: cannot open for writing: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::vector<std::vector<std::string>> table;
  table.reserve(rows.size());
  for (const auto& r : rows)
    table.push_back({std::to_string(r.step), format_double(r.wall_time_s),
                     format_double(r.lr), format_double(r.loss),
                     r.has_psnr ? format_double(r.psnr) : "",
                     r.has_ssim ? format_double(r.ssim) : ""});
  write_csv(path, {"step", "wall_time_s", "lr", "loss", "psnr", "ssim"}, table);
}

}  // namespace wire
