#pragma once

#include <cstddef>

#include "wire/kernels.hpp"

namespace wire::kern {

// One entry per dispatched kernel, per dtype.
struct KernelTable {
  const char* name;

  void (*matmul_d)(const double*, const double*, double*, int, int, int, Accum);
  void (*matmul_f)(const float*, const float*, float*, int, int, int, Accum);

  void (*add_d)(const double*, const double*, double*, std::size_t);
  void (*add_f)(const float*, const float*, float*, std::size_t);
  void (*sub_d)(const double*, const double*, double*, std::size_t);
  void (*sub_f)(const float*, const float*, float*, std::size_t);
  void (*mul_d)(const double*, const double*, double*, std::size_t);
  void (*mul_f)(const float*, const float*, float*, std::size_t);
  void (*scale_d)(const double*, double, double*, std::size_t);
  void (*scale_f)(const float*, float, float*, std::size_t);
  void (*axpy_d)(double, const double*, double*, std::size_t);
  void (*axpy_f)(float, const float*, float*, std::size_t);
  void (*madd_d)(const double*, const double*, double*, std::size_t);
  void (*madd_f)(const float*, const float*, float*, std::size_t);
  void (*msub_d)(const double*, const double*, double*, std::size_t);
  void (*msub_f)(const float*, const float*, float*, std::size_t);

  void (*vexp_d)(const double*, double*, std::size_t);
  void (*vexp_f)(const float*, float*, std::size_t);
  void (*vsincos_d)(const double*, double*, double*, std::size_t);
  void (*vsincos_f)(const float*, float*, float*, std::size_t);

  void (*adam_d)(double*, const double*, double*, double*, std::size_t, double, double,
                 double, double, double, double);
  void (*adam_f)(float*, const float*, float*, float*, std::size_t, float, float, float,
                 float, float, float);
};

const KernelTable* scalar_table();
#ifdef WIRE_HAVE_AVX2
const KernelTable* avx2_table();
#endif
#ifdef WIRE_HAVE_AVX512
const KernelTable* avx512_table();
#endif

const KernelTable* active_table();

}  // namespace wire::kern
