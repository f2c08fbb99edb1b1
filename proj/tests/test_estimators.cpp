#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "causaldr/errors.hpp"
#include "causaldr/estimators.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/outcome.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"
#include "causaldr/synthdata.hpp"

using namespace causaldr;
using estimators::Method;
using outcome::PotentialPredictions;
using psmodels::PropensityFit;

namespace {

PropensityFit fit_with_scores(std::vector<double> scores, double lower = 1e-9,
                              double upper = 1.0 - 1e-9) {
  PropensityFit fit;
  fit.scores = std::move(scores);
  fit.lower = lower;
  fit.upper = upper;
  return fit;
}

PotentialPredictions preds_from(std::vector<double> mu1, std::vector<double> mu0,
                                double tau_se = 0.0) {
  PotentialPredictions p;
  p.mu1 = std::move(mu1);
  p.mu0 = std::move(mu0);
  p.coef_tau = p.mu1.empty() ? 0.0 : p.mu1[0] - p.mu0[0];
  p.coef_tau_se = tau_se;
  return p;
}

}  // namespace

TEST_CASE("wald interval construction") {
  const auto [lo, hi] = estimators::wald_interval(2.0, 1.0);
  CHECK(lo == doctest::Approx(0.040036).epsilon(1e-9));
  CHECK(hi == doctest::Approx(3.959964).epsilon(1e-9));

  const auto [dlo, dhi] = estimators::wald_interval(1.5, 0.0);
  CHECK(dlo == 1.5);
  CHECK(dhi == 1.5);

  rng::Stream s(33);
  for (int i = 0; i < 50; ++i) {
    const double tau = 4.0 * s.next_double() - 2.0;
    const double se = 2.0 * s.next_double();
    const auto [l, h] = estimators::wald_interval(tau, se);
    CHECK(h - l == doctest::Approx(2.0 * 1.959964 * se).epsilon(1e-12));
    CHECK(l <= tau);
    CHECK(tau <= h);
  }

  CHECK_THROWS_AS(estimators::wald_interval(0.0, -1.0), ParameterError);
}

TEST_CASE("rsm hand values") {
  CHECK(estimators::estimate_rsm(preds_from({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0})).tau_hat == 0.0);
  CHECK(estimators::estimate_rsm(preds_from({3.0, 4.0}, {1.0, 2.0})).tau_hat ==
        doctest::Approx(2.0));
  const auto est = estimators::estimate_rsm(preds_from({3.0, 5.0}, {1.0, 2.0}, 0.25));
  CHECK(est.tau_hat == doctest::Approx(2.5));
  CHECK(est.se == 0.25);
  CHECK_FALSE(est.ps_model.has_value());
  CHECK(est.ci_low <= est.tau_hat);
  CHECK(est.tau_hat <= est.ci_high);

  CHECK_THROWS_AS(estimators::estimate_rsm(preds_from({1.0}, {0.0})), ParameterError);
}

TEST_CASE("ipw constant-score simplification") {
  const std::vector<double> y{4.0, 2.0, 3.0, 1.0};
  const std::vector<int> a{1, 1, 0, 0};
  const auto est = estimators::estimate_ipw(y, a, fit_with_scores({0.5, 0.5, 0.5, 0.5}));
  double expect = 0.0;
  for (int i = 0; i < 4; ++i) expect += a[i] ? 2.0 * y[i] : -2.0 * y[i];
  CHECK(est.tau_hat == doctest::Approx(expect / 4.0));
  CHECK(est.method == Method::IPW);
}

TEST_CASE("ipw four-subject hand computation") {
  const std::vector<double> y{4.0, 2.0, 3.0, 1.0};
  const std::vector<int> a{1, 1, 0, 0};
  const auto est = estimators::estimate_ipw(y, a, fit_with_scores({0.8, 0.4, 0.5, 0.2}));
  CHECK(est.tau_hat == doctest::Approx(0.6875).epsilon(1e-12));
}

TEST_CASE("ipw on a zero outcome is exactly zero") {
  const std::vector<double> y(6, 0.0);
  const std::vector<int> a{1, 0, 1, 0, 1, 0};
  const auto est = estimators::estimate_ipw(y, a, fit_with_scores({0.3, 0.4, 0.5, 0.6, 0.7, 0.2}));
  CHECK(est.tau_hat == 0.0);
  CHECK(est.se == 0.0);
}

TEST_CASE("ipw rejects scores outside the open unit interval") {
  const std::vector<double> y{1.0, 2.0};
  const std::vector<int> a{1, 0};
  CHECK_THROWS_AS(estimators::estimate_ipw(y, a, fit_with_scores({1.0, 0.5})), ContractError);
  CHECK_THROWS_AS(estimators::estimate_ipw(y, a, fit_with_scores({0.5, 0.0})), ContractError);
}

TEST_CASE("aipw hand evaluation of both algebraic forms") {
  // Subject 1: A=1, Y=3, e=0.5, mu1=2, mu0=1 -> psi = 3.
  const std::vector<double> y{3.0, 1.0};
  const std::vector<int> a{1, 0};
  const auto fit = fit_with_scores({0.5, 0.5});
  const auto preds = preds_from({2.0, 2.0}, {1.0, 1.0});
  const auto psi = estimators::aipw_summands(y, a, fit, preds);
  CHECK(psi[0] == doctest::Approx(3.0).epsilon(1e-14));
  // canonical form: mu1 - mu0 + A(Y-mu1)/e - (1-A)(Y-mu0)/(1-e)
  CHECK(psi[0] == doctest::Approx(2.0 - 1.0 + (3.0 - 2.0) / 0.5).epsilon(1e-14));
  CHECK(psi[1] == doctest::Approx(2.0 - 1.0 - (1.0 - 1.0) / 0.5).epsilon(1e-14));
}

TEST_CASE("aipw equals ipw when the augmentation is zero") {
  rng::Stream s(44);
  const std::size_t n = 50;
  std::vector<double> y(n), scores(n);
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = s.next_normal();
    scores[i] = 0.1 + 0.8 * s.next_double();
    a[i] = i % 2 == 0;
  }
  const auto fit = fit_with_scores(scores);
  const auto preds = preds_from(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0));
  const auto aipw = estimators::estimate_aipw(y, a, fit, preds);
  const auto ipw = estimators::estimate_ipw(y, a, fit);
  CHECK(aipw.tau_hat == doctest::Approx(ipw.tau_hat).epsilon(1e-14));
  CHECK(aipw.se == doctest::Approx(ipw.se).epsilon(1e-14));
}

TEST_CASE("perfect outcome model cancels the weighting entirely") {
  rng::Stream s(45);
  const std::size_t n = 200;
  std::vector<double> y(n), mu1(n), mu0(n), scores(n);
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu1[i] = 3.0 * s.next_double();
    mu0[i] = 2.0 * s.next_double() - 1.0;
    a[i] = s.next_bernoulli(0.5);
    y[i] = a[i] ? mu1[i] : mu0[i];  // Y = mu(A, X) exactly
    scores[i] = 0.01 + 0.98 * s.next_double();
  }
  const auto psi =
      estimators::aipw_summands(y, a, fit_with_scores(scores), preds_from(mu1, mu0));
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(psi[i] - (mu1[i] - mu0[i])) < 1e-12);
}

TEST_CASE("eq-4 summands equal the canonical form on random inputs") {
  rng::Stream s(46);
  const std::size_t n = 1000;
  std::vector<double> y(n), mu1(n), mu0(n), scores(n);
  std::vector<int> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = 4.0 * s.next_normal();
    mu1[i] = 2.0 * s.next_normal();
    mu0[i] = 2.0 * s.next_normal();
    scores[i] = 0.025 + 0.95 * s.next_double();
    a[i] = s.next_bernoulli(0.5);
  }
  const auto psi =
      estimators::aipw_summands(y, a, fit_with_scores(scores), preds_from(mu1, mu0));
  for (std::size_t i = 0; i < n; ++i) {
    const double e = scores[i];
    const double canonical = mu1[i] - mu0[i] + (a[i] ? (y[i] - mu1[i]) / e : 0.0) -
                             (a[i] ? 0.0 : (y[i] - mu0[i]) / (1.0 - e));
    CHECK(std::abs(psi[i] - canonical) < 1e-10);
  }
}

TEST_CASE("location shift moves ipw by the exact weighted-mean amount") {
  synthdata::DgpParams params;
  const auto draw = synthdata::make_dataset(300, params, 47);
  const auto features = psmodels::build_ps_features(draw.data.x, {psmodels::PsRegime::Correct});
  const auto lr = psmodels::fit_logistic(features, draw.data.a);
  PropensityFit fit;
  fit.scores = psmodels::truncate(lr.probs);
  fit.learner.kind = psmodels::PsKind::LR;

  const double c = 3.7;
  std::vector<double> shifted = draw.data.y;
  for (auto& v : shifted) v += c;

  const auto base = estimators::estimate_ipw(draw.data.y, draw.data.a, fit);
  const auto moved = estimators::estimate_ipw(shifted, draw.data.a, fit);
  double weight_mean = 0.0;
  for (std::size_t i = 0; i < draw.data.n(); ++i)
    weight_mean += draw.data.a[i] ? 1.0 / fit.scores[i] : -1.0 / (1.0 - fit.scores[i]);
  weight_mean /= double(draw.data.n());
  CHECK(moved.tau_hat == doctest::Approx(base.tau_hat + c * weight_mean).epsilon(1e-10));

  // RSM and AIPW with a refit outcome model absorb the shift entirely.
  const auto ofit =
      outcome::fit_outcome(draw.data.x, draw.data.a, draw.data.y, {outcome::OutcomeRegime::Correct});
  const auto ofit_shift =
      outcome::fit_outcome(draw.data.x, draw.data.a, shifted, {outcome::OutcomeRegime::Correct});
  const auto p0 = outcome::predict_potentials(ofit, draw.data.x);
  const auto p1 = outcome::predict_potentials(ofit_shift, draw.data.x);
  CHECK(estimators::estimate_rsm(p1).tau_hat ==
        doctest::Approx(estimators::estimate_rsm(p0).tau_hat).epsilon(1e-9));
  CHECK(estimators::estimate_aipw(shifted, draw.data.a, fit, p1).tau_hat ==
        doctest::Approx(estimators::estimate_aipw(draw.data.y, draw.data.a, fit, p0).tau_hat)
            .epsilon(1e-9));
}

TEST_CASE("ipw with the true scores is consistent at n=100000") {
  synthdata::DgpParams params;
  const auto draw = synthdata::make_dataset(100000, params, 20240808);
  std::vector<double> truth(draw.data.n());
  for (std::size_t i = 0; i < draw.data.n(); ++i) {
    const double eta = params.treat_intercept +
                       kernels::dot(draw.data.x.row_span(i), params.treat_coef);
    truth[i] = stats::inv_logit(eta);
  }
  const auto est =
      estimators::estimate_ipw(draw.data.y, draw.data.a, fit_with_scores(truth));
  CHECK(std::abs(est.tau_hat - 2.0) < 0.05);
}
