#include "kernels_impl.hpp"

#if defined(CAUSALDR_HAVE_NEON)

#include <arm_neon.h>

namespace causaldr::kernels::detail {

namespace {

double neon_dot(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(x + i), vld1q_f64(y + i));
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i] * y[i];
  return out;
}

double neon_sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i];
  return out;
}

double neon_sumsq(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    acc = vfmaq_f64(acc, v, v);
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) out += x[i] * x[i];
  return out;
}

double neon_sq_dist(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double out = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    out += d * d;
  }
  return out;
}

void neon_axpy(double a, const double* x, double* y, std::size_t n) {
  // Separate multiply and add so results stay bit-identical to the scalar
  // reference (fma would skip the intermediate rounding).
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t prod = vmulq_f64(va, vld1q_f64(x + i));
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void neon_scale(double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void neon_clamp(double* x, double lo, double hi, std::size_t n) {
  const float64x2_t vlo = vdupq_n_f64(lo);
  const float64x2_t vhi = vdupq_n_f64(hi);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t v = vld1q_f64(x + i);
    v = vminq_f64(vmaxq_f64(v, vlo), vhi);
    vst1q_f64(x + i, v);
  }
  for (; i < n; ++i) {
    if (x[i] < lo) x[i] = lo;
    if (x[i] > hi) x[i] = hi;
  }
}

void neon_sym_rank1_update(double* g, std::size_t q, double w, const double* f) {
  for (std::size_t r = 0; r < q; ++r) {
    const double wf = w * f[r];
    const float64x2_t vwf = vdupq_n_f64(wf);
    double* row = g + r * q;
    std::size_t c = r;
    for (; c + 2 <= q; c += 2) {
      vst1q_f64(row + c, vfmaq_f64(vld1q_f64(row + c), vwf, vld1q_f64(f + c)));
    }
    for (; c < q; ++c) row[c] += wf * f[c];
  }
}

}  // namespace

const Ops& neon_ops() {
  static const Ops ops = {neon_dot,   neon_sum,   neon_sumsq,
                          neon_sq_dist, neon_axpy, neon_scale,
                          neon_clamp, neon_sym_rank1_update};
  return ops;
}

}  // namespace causaldr::kernels::detail

#endif  // CAUSALDR_HAVE_NEON
