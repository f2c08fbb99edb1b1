#include "causaldr/outcome.hpp"

#include <array>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"

namespace causaldr::outcome {

namespace {

std::vector<int> regime_columns(OutcomeRegime regime) {
  if (regime == OutcomeRegime::Correct) return {0, 1, 2, 3, 4, 5, 6, 7, 8};
  return {0, 1, 2, 3, 4, 7, 8};  // X6 and X7 omitted
}

}  // namespace

linalg::Matrix build_outcome_features(const linalg::Matrix& x, const std::vector<int>& a,
                                      const OutcomeSpec& spec) {
  if (x.cols() != 9) throw ShapeError("build_outcome_features: expected 9 covariates");
  if (a.size() != x.rows())
    throw ShapeError("build_outcome_features: treatment length mismatch");
  const std::vector<int> cols = regime_columns(spec.regime);
  linalg::Matrix d(x.rows(), cols.size() + 2);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double* out = d.row(i);
    out[0] = 1.0;
    out[1] = static_cast<double>(a[i]);
    const double* in = x.row(i);
    for (std::size_t j = 0; j < cols.size(); ++j) out[j + 2] = in[cols[j]];
  }
  return d;
}

std::vector<double> fit_ols(const linalg::Matrix& d, const std::vector<double>& y) {
  return linalg::ols_fit(d, y).coef;
}

OutcomeFit fit_outcome(const linalg::Matrix& x, const std::vector<int>& a,
                       const std::vector<double>& y, const OutcomeSpec& spec) {
  const linalg::Matrix d = build_outcome_features(x, a, spec);
  const linalg::OlsFit ols = linalg::ols_fit(d, y);
  OutcomeFit fit;
  fit.spec = spec;
  fit.coef = ols.coef;
  fit.coef_tau_se = ols.se[1];
  fit.sigma2 = ols.sigma2;
  fit.ridge_fallback = ols.ridge_fallback;
  return fit;
}

PotentialPredictions predict_potentials(const std::vector<double>& coef,
                                        const linalg::Matrix& x, const OutcomeSpec& spec) {
  if (x.cols() != 9) throw ShapeError("predict_potentials: expected 9 covariates");
  const std::vector<int> cols = regime_columns(spec.regime);
  if (coef.size() != cols.size() + 2)
    throw ShapeError("predict_potentials: coefficient length mismatch");

  PotentialPredictions preds;
  preds.coef_tau = coef[1];
  const std::size_t n = x.rows();
  preds.mu0.resize(n);
  preds.mu1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double base = coef[0];
    const double* in = x.row(i);
    for (std::size_t j = 0; j < cols.size(); ++j) base += coef[j + 2] * in[cols[j]];
    preds.mu0[i] = base;
    preds.mu1[i] = base + coef[1];
  }
  return preds;
}

PotentialPredictions predict_potentials(const OutcomeFit& fit, const linalg::Matrix& x) {
  PotentialPredictions preds = predict_potentials(fit.coef, x, fit.spec);
  preds.coef_tau_se = fit.coef_tau_se;
  return preds;
}

}  // namespace causaldr::outcome
