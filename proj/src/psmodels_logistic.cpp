#include <algorithm>
#include <cmath>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/linalg.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::psmodels {

namespace {

constexpr double kCoefTol = 1e-8;
constexpr int kMaxIter = 50;
constexpr double kRunawayCoef = 30.0;
constexpr double kWeightFloor = 1e-10;

double bernoulli_loglik(const std::vector<double>& eta, const std::vector<int>& a) {
  double ll = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i)
    ll += a[i] * eta[i] - stats::log1p_exp(eta[i]);
  return ll;
}

void linear_predictor(const linalg::Matrix& f, const std::vector<double>& coef,
                      std::vector<double>& eta) {
  const std::size_t n = f.rows();
  for (std::size_t i = 0; i < n; ++i)
    eta[i] = coef[0] + kernels::dot(f.row_span(i), {coef.data() + 1, f.cols()});
}

}  // namespace

LogisticFit fit_logistic(const linalg::Matrix& f, const std::vector<int>& a) {
  const std::size_t n = f.rows();
  const std::size_t q = f.cols();
  const std::size_t k = q + 1;  // intercept column
  if (a.size() != n) throw ShapeError("fit_logistic: label length mismatch");
  std::size_t treated = 0;
  for (int v : a) treated += static_cast<std::size_t>(v);
  if (treated == 0 || treated == n)
    throw ContractError("fit_logistic: both arms must be non-empty");

  LogisticFit fit;
  fit.coef.assign(k, 0.0);

  std::vector<double> eta(n, 0.0), p(n), row(k), rhs(k), next(k), trial(k);
  linalg::Matrix gram(k, k);
  double loglik = bernoulli_loglik(eta, a);
  fit.loglik_path.push_back(loglik);

  for (int iter = 0; iter < kMaxIter; ++iter) {
    fit.iterations = iter + 1;
    std::fill(gram.data().begin(), gram.data().end(), 0.0);
    std::fill(rhs.begin(), rhs.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = stats::inv_logit(eta[i]);
      const double w = std::max(p[i] * (1.0 - p[i]), kWeightFloor);
      const double z = eta[i] + (a[i] - p[i]) / w;
      row[0] = 1.0;
      std::copy(f.row(i), f.row(i) + q, row.begin() + 1);
      kernels::sym_rank1_update(gram.data().data(), k, w, row.data());
      kernels::axpy(w * z, row, rhs);
    }
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = r + 1; c < k; ++c) gram(c, r) = gram(r, c);

    double trace = 0.0;
    for (std::size_t j = 0; j < k; ++j) trace += gram(j, j);
    next = linalg::solve_spd(std::move(gram), rhs, 1e-8 * trace / static_cast<double>(k));
    gram = linalg::Matrix(k, k);

    // Step halving keeps the log-likelihood non-decreasing.
    double step = 1.0;
    double new_loglik = loglik;
    for (int h = 0; h < 30; ++h) {
      for (std::size_t j = 0; j < k; ++j)
        trial[j] = fit.coef[j] + step * (next[j] - fit.coef[j]);
      linear_predictor(f, trial, eta);
      new_loglik = bernoulli_loglik(eta, a);
      if (new_loglik >= loglik - 1e-12 * std::abs(loglik)) break;
      step *= 0.5;
    }

    double max_change = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      max_change = std::max(max_change, std::abs(trial[j] - fit.coef[j]));
    fit.coef = trial;
    loglik = new_loglik;
    fit.loglik_path.push_back(loglik);
    if (max_change < kCoefTol) {
      fit.converged = true;
      break;
    }
  }

  if (!fit.converged) {
    const double max_coef =
        std::abs(*std::max_element(fit.coef.begin(), fit.coef.end(),
                                   [](double x, double y) { return std::abs(x) < std::abs(y); }));
    fit.flagged = max_coef > kRunawayCoef;
  }

  linear_predictor(f, fit.coef, eta);
  fit.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i) fit.probs[i] = stats::inv_logit(eta[i]);
  return fit;
}

}  // namespace causaldr::psmodels
