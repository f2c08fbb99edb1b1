#include "causaldr/synthdata.hpp"

#include <cmath>
#include <cstdlib>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::synthdata {

void DgpParams::validate() const {
  if (p < 1) throw ParameterError("p must be positive");
  if (!(std::abs(rho) < 1.0)) throw ParameterError("|rho| must be < 1");
  if (treat_coef.size() != static_cast<std::size_t>(p))
    throw ParameterError("treatment coefficients must have length p");
  if (outcome_coef.size() != static_cast<std::size_t>(p))
    throw ParameterError("outcome coefficients must have length p");
  if (noise_sd < 0.0) throw ParameterError("noise_sd must be nonnegative");
}

linalg::Matrix ar1_covariance(int p, double rho) {
  if (!(std::abs(rho) < 1.0)) throw ParameterError("|rho| must be < 1");
  linalg::Matrix sigma(p, p);
  for (int j = 0; j < p; ++j)
    for (int k = 0; k < p; ++k) sigma(j, k) = std::pow(rho, std::abs(j - k));
  return sigma;
}

linalg::Matrix gen_covariates(std::size_t n, const DgpParams& params, std::uint64_t seed) {
  params.validate();
  if (n < 1) throw ParameterError("n must be positive");
  const auto p = static_cast<std::size_t>(params.p);

  linalg::Matrix l = ar1_covariance(params.p, params.rho);
  if (!linalg::cholesky_lower(l))
    throw ParameterError("AR(1) covariance not positive definite");

  rng::Stream stream(seed);
  linalg::Matrix x(n, p);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z[j] = stream.next_normal();
    double* row = x.row(i);
    for (std::size_t j = 0; j < p; ++j)
      row[j] = kernels::dot({l.row(j), j + 1}, {z.data(), j + 1});
  }
  return x;
}

std::vector<int> gen_treatment(const linalg::Matrix& x, const DgpParams& params,
                               std::uint64_t seed) {
  params.validate();
  if (x.cols() != static_cast<std::size_t>(params.p))
    throw ShapeError("gen_treatment: covariate count mismatch");
  rng::Stream stream(seed);
  std::vector<int> a(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double eta = params.treat_intercept + kernels::dot(x.row_span(i), params.treat_coef);
    a[i] = stream.next_bernoulli(stats::inv_logit(eta)) ? 1 : 0;
  }
  return a;
}

std::vector<double> gen_outcome(const linalg::Matrix& x, const std::vector<int>& a,
                                const DgpParams& params, std::uint64_t seed) {
  params.validate();
  if (x.cols() != static_cast<std::size_t>(params.p))
    throw ShapeError("gen_outcome: covariate count mismatch");
  if (a.size() != x.rows()) throw ShapeError("gen_outcome: treatment length mismatch");
  rng::Stream stream(seed);
  std::vector<double> y(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    y[i] = params.outcome_intercept + params.tau * a[i] +
           kernels::dot(x.row_span(i), params.outcome_coef) +
           params.noise_sd * stream.next_normal();
  }
  return y;
}

DatasetDraw make_dataset(std::size_t n, const DgpParams& params, std::uint64_t seed) {
  params.validate();
  if (n < params.min_n()) throw ParameterError("make_dataset: n must be at least p + 2");

  for (int attempt = 0; attempt < 100; ++attempt) {
    const std::uint64_t base =
        rng::derive_key(seed, {rng::tag::kAttempt, static_cast<std::uint64_t>(attempt)});
    Dataset ds;
    ds.x = gen_covariates(n, params, rng::derive_key(base, {rng::tag::kCovariates}));
    ds.a = gen_treatment(ds.x, params, rng::derive_key(base, {rng::tag::kTreatment}));
    ds.y = gen_outcome(ds.x, ds.a, params, rng::derive_key(base, {rng::tag::kNoise}));
    if (ds.both_arms_present()) return {std::move(ds), attempt};
  }
  throw DegenerateDesignError("make_dataset: 100 consecutive single-arm draws");
}

}  // namespace causaldr::synthdata
