#pragma once

// Coordinate grids and synthetic test signals. Grids span [-1, 1] per axis
// (single-sample axes pinned at 0), rows in C order with the last axis
// fastest. Signal generation is a pure function of (kind, dims, params, seed).

#include <cstdint>
#include <string>

#include "wire/tensor.hpp"

namespace wire {

struct CoordinateGrid {
  Shape dims;
  Tensor<double> coords;  // [N x dims.size()]
};

CoordinateGrid make_grid(const Shape& dims);

struct SignalGrid {
  Shape dims;
  int channels = 1;
  Tensor<double> values;  // [N x channels], [0,1] for images, {0,1} for occupancy
};

struct SynthParams {
  int spokes = 16;          // siemens_star
  int count = 256;          // point_field
  double radius = 0.6;      // sphere_occupancy
  double noise_sigma = 0.15;  // gaussian_noise_field
};

// kinds: siemens_star, point_field, sphere_occupancy, shepp_logan,
// gaussian_noise_field, natural
SignalGrid synth_signal(const std::string& kind, const Shape& dims,
                        const SynthParams& params, std::uint64_t seed);

}  // namespace wire
