#include "causaldr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <string>

#include "causaldr/errors.hpp"
#include "kernels_impl.hpp"

namespace causaldr::kernels {

namespace {

using detail::Ops;

Backend pick_default() {
  if (const char* env = std::getenv("CAUSAL_DR_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
#if defined(CAUSALDR_HAVE_AVX2)
    if (v == "avx2") {
      if (!detail::avx2_supported())
        throw ParameterError("CAUSAL_DR_KERNELS=avx2 but CPU lacks AVX2/FMA");
      return Backend::Avx2;
    }
#endif
#if defined(CAUSALDR_HAVE_NEON)
    if (v == "neon") return Backend::Neon;
#endif
    if (v != "auto" && !v.empty())
      throw ParameterError("unrecognized CAUSAL_DR_KERNELS value: " + v);
  }
#if defined(CAUSALDR_HAVE_AVX2)
  if (detail::avx2_supported()) return Backend::Avx2;
#endif
#if defined(CAUSALDR_HAVE_NEON)
  return Backend::Neon;
#else
  return Backend::Scalar;
#endif
}

const Ops* ops_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &detail::scalar_ops();
#if defined(CAUSALDR_HAVE_AVX2)
    case Backend::Avx2:
      return &detail::avx2_ops();
#endif
#if defined(CAUSALDR_HAVE_NEON)
    case Backend::Neon:
      return &detail::neon_ops();
#endif
    default:
      return nullptr;
  }
}

struct Dispatch {
  std::atomic<const Ops*> ops;
  std::atomic<Backend> backend;
  Dispatch() {
    const Backend b = pick_default();
    backend.store(b);
    ops.store(ops_for(b));
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

inline const Ops& ops() { return *dispatch().ops.load(std::memory_order_relaxed); }

}  // namespace

Backend active_backend() { return dispatch().backend.load(); }

bool available(Backend b) { return ops_for(b) != nullptr; }

const char* name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "?";
}

void set_backend(Backend b) {
  const Ops* o = ops_for(b);
  if (o == nullptr)
    throw ParameterError(std::string("kernel backend not available: ") + name(b));
#if defined(CAUSALDR_HAVE_AVX2)
  if (b == Backend::Avx2 && !detail::avx2_supported())
    throw ParameterError("CPU lacks AVX2/FMA support");
#endif
  dispatch().backend.store(b);
  dispatch().ops.store(o);
}

double dot(std::span<const double> x, std::span<const double> y) {
  return ops().dot(x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return ops().sum(x.data(), x.size()); }

double sumsq(std::span<const double> x) { return ops().sumsq(x.data(), x.size()); }

double sq_dist(std::span<const double> x, std::span<const double> y) {
  return ops().sq_dist(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  ops().axpy(a, x.data(), y.data(), x.size());
}

void scale(std::span<double> x, double a) { ops().scale(x.data(), a, x.size()); }

void clamp(std::span<double> x, double lo, double hi) {
  ops().clamp(x.data(), lo, hi, x.size());
}

void sym_rank1_update(double* g, std::size_t q, double w, const double* f) {
  ops().sym_rank1_update(g, q, w, f);
}

}  // namespace causaldr::kernels
