#include "kernels_impl.hpp"

// Reference kernels. Deliberately plain loops: these define the semantics
// the vector backends are tested against.
namespace causaldr::kernels::detail {

namespace {

double scalar_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double scalar_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double scalar_sumsq(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double scalar_sq_dist(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

void scalar_axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scalar_scale(double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void scalar_clamp(double* x, double lo, double hi, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < lo) x[i] = lo;
    if (x[i] > hi) x[i] = hi;
  }
}

void scalar_sym_rank1_update(double* g, std::size_t q, double w,
                             const double* f) {
  for (std::size_t r = 0; r < q; ++r) {
    const double wf = w * f[r];
    double* row = g + r * q;
    for (std::size_t c = r; c < q; ++c) row[c] += wf * f[c];
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {scalar_dot,   scalar_sum,   scalar_sumsq,
                          scalar_sq_dist, scalar_axpy, scalar_scale,
                          scalar_clamp, scalar_sym_rank1_update};
  return ops;
}

}  // namespace causaldr::kernels::detail
