#pragma once

#include <cstddef>

// Per-backend entry points. Each backend provides the same set of functions;
// the dispatch table in kernels.cpp binds the active one.
namespace causaldr::kernels::detail {

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*sq_dist)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double*, double, std::size_t);
  void (*clamp)(double*, double, double, std::size_t);
  void (*sym_rank1_update)(double*, std::size_t, double, const double*);
};

const Ops& scalar_ops();

#if defined(CAUSALDR_HAVE_AVX2)
const Ops& avx2_ops();
bool avx2_supported();
#endif

#if defined(CAUSALDR_HAVE_NEON)
const Ops& neon_ops();
#endif

}  // namespace causaldr::kernels::detail
