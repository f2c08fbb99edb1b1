#include "causaldr/estimators.hpp"

#include <cmath>
#include <tuple>

#include "causaldr/errors.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::estimators {

const char* method_name(Method m) {
  switch (m) {
    case Method::RSM:
      return "RSM";
    case Method::IPW:
      return "IPW";
    case Method::AIPW:
      return "AIPW";
  }
  return "?";
}

std::pair<double, double> wald_interval(double tau_hat, double se) {
  if (se < 0.0) throw ParameterError("wald_interval: negative standard error");
  return {tau_hat - kZ975 * se, tau_hat + kZ975 * se};
}

namespace {

void check_alignment(std::span<const double> y, std::span<const int> a,
                     const psmodels::PropensityFit& fit) {
  if (y.size() != a.size() || y.size() != fit.scores.size())
    throw ShapeError("estimator inputs misaligned");
  for (double e : fit.scores)
    if (!(e > 0.0 && e < 1.0))
      throw ContractError("propensity score outside (0, 1)");
}

EffectEstimate from_summands(const std::vector<double>& psi, Method method,
                             const psmodels::PropensityFit& fit) {
  EffectEstimate est;
  est.method = method;
  est.ps_model = fit.learner.kind;
  est.tau_hat = stats::mean(psi);
  est.se = stats::sample_sd(psi) / std::sqrt(static_cast<double>(psi.size()));
  std::tie(est.ci_low, est.ci_high) = wald_interval(est.tau_hat, est.se);
  return est;
}

}  // namespace

EffectEstimate estimate_rsm(const outcome::PotentialPredictions& preds) {
  const std::size_t n = preds.mu1.size();
  if (preds.mu0.size() != n) throw ShapeError("estimate_rsm: mu1/mu0 length mismatch");
  if (n < 2) throw ParameterError("estimate_rsm: needs at least two subjects");

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += preds.mu1[i] - preds.mu0[i];

  EffectEstimate est;
  est.method = Method::RSM;
  est.tau_hat = acc / static_cast<double>(n);
  est.se = preds.coef_tau_se;
  std::tie(est.ci_low, est.ci_high) = wald_interval(est.tau_hat, est.se);
  return est;
}

EffectEstimate estimate_ipw(std::span<const double> y, std::span<const int> a,
                            const psmodels::PropensityFit& fit) {
  check_alignment(y, a, fit);
  const std::size_t n = y.size();
  if (n < 2) throw ParameterError("estimate_ipw: needs at least two subjects");

  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = fit.scores[i];
    psi[i] = a[i] ? y[i] / e : -y[i] / (1.0 - e);
  }
  return from_summands(psi, Method::IPW, fit);
}

std::vector<double> aipw_summands(std::span<const double> y, std::span<const int> a,
                                  const psmodels::PropensityFit& fit,
                                  const outcome::PotentialPredictions& preds) {
  check_alignment(y, a, fit);
  const std::size_t n = y.size();
  if (preds.mu1.size() != n || preds.mu0.size() != n)
    throw ShapeError("estimate_aipw: predictions misaligned");

  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = fit.scores[i];
    const double ipw_term = a[i] ? y[i] / e : -y[i] / (1.0 - e);
    const double augment = (a[i] - e) / (e * (1.0 - e)) *
                           ((1.0 - e) * preds.mu1[i] + e * preds.mu0[i]);
    psi[i] = ipw_term - augment;
  }
  return psi;
}

EffectEstimate estimate_aipw(std::span<const double> y, std::span<const int> a,
                             const psmodels::PropensityFit& fit,
                             const outcome::PotentialPredictions& preds) {
  if (y.size() < 2) throw ParameterError("estimate_aipw: needs at least two subjects");
  return from_summands(aipw_summands(y, a, fit, preds), Method::AIPW, fit);
}

}  // namespace causaldr::estimators
