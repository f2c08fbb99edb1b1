#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"
#include "causaldr/synthdata.hpp"

using namespace causaldr;
using psmodels::PsRegime;

namespace {

struct Problem {
  linalg::Matrix f;
  std::vector<int> a;
};

Problem paper_problem(std::size_t n, std::uint64_t seed, PsRegime regime = PsRegime::Correct) {
  synthdata::DgpParams params;
  const auto x = synthdata::gen_covariates(n, params, seed);
  const auto a = synthdata::gen_treatment(x, params, seed + 1);
  return {psmodels::build_ps_features(x, {regime}), a};
}

// Gradient ascent on the mean Bernoulli log-likelihood; deliberately naive
// so it shares nothing with the IRLS path it cross-checks.
std::vector<double> gradient_descent_logistic(const linalg::Matrix& f,
                                              const std::vector<int>& a, double step,
                                              int iterations) {
  const std::size_t n = f.rows();
  const std::size_t k = f.cols() + 1;
  std::vector<double> coef(k, 0.0), grad(k);
  for (int it = 0; it < iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double eta =
          coef[0] + kernels::dot(f.row_span(i), {coef.data() + 1, f.cols()});
      const double resid = a[i] - stats::inv_logit(eta);
      grad[0] += resid;
      kernels::axpy(resid, f.row_span(i), {grad.data() + 1, f.cols()});
    }
    kernels::axpy(step / double(n), grad, coef);
  }
  return coef;
}

// Gauss-Jordan inverse for the LDA density oracle.
linalg::Matrix invert(linalg::Matrix a) {
  const std::size_t n = a.rows();
  linalg::Matrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i) inv(i, i) = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    for (std::size_t c = 0; c < n; ++c) {
      std::swap(a(pivot, c), a(col, c));
      std::swap(inv(pivot, c), inv(col, c));
    }
    const double d = a(col, col);
    for (std::size_t c = 0; c < n; ++c) {
      a(col, c) /= d;
      inv(col, c) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double fct = a(r, col);
      for (std::size_t c = 0; c < n; ++c) {
        a(r, c) -= fct * a(col, c);
        inv(r, c) -= fct * inv(col, c);
      }
    }
  }
  return inv;
}

double determinant(linalg::Matrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (pivot != col) {
      det = -det;
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
    }
    det *= a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double fct = a(r, col) / a(col, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= fct * a(col, c);
    }
  }
  return det;
}

double gaussian_density(const double* x, const std::vector<double>& mean,
                        const linalg::Matrix& cov_inv, double cov_det, std::size_t q) {
  double quad = 0.0;
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = 0; c < q; ++c)
      quad += (x[r] - mean[r]) * cov_inv(r, c) * (x[c] - mean[c]);
  const double norm = std::pow(2.0 * std::numbers::pi, double(q) / 2.0) * std::sqrt(cov_det);
  return std::exp(-0.5 * quad) / norm;
}

}  // namespace

TEST_CASE("correct PS features are the covariates themselves") {
  synthdata::DgpParams params;
  const auto x = synthdata::gen_covariates(20, params, 1);
  const auto f = psmodels::build_ps_features(x, {PsRegime::Correct});
  CHECK(f == x);
}

TEST_CASE("misspecified PS features drop X8,X9 and append interactions") {
  linalg::Matrix x(2, 9);
  const double row[9] = {1, 2, 3, 0, 0, 0, 0, 9, 9};
  for (int j = 0; j < 9; ++j) x(0, j) = row[j];
  const auto f = psmodels::build_ps_features(x, {PsRegime::Misspecified});
  REQUIRE(f.cols() == 9);
  const double expect[9] = {1, 2, 3, 0, 0, 0, 0, 2, 3};
  for (int j = 0; j < 9; ++j) CHECK(f(0, j) == expect[j]);
  for (int j = 0; j < 9; ++j) CHECK(f(1, j) == 0.0);  // zero row stays zero

  linalg::Matrix wrong(2, 8);
  CHECK_THROWS_AS(psmodels::build_ps_features(wrong, {PsRegime::Misspecified}), ShapeError);
}

TEST_CASE("truncate clamps into the closed interval") {
  CHECK(psmodels::truncate({0.001})[0] == 0.025);
  CHECK(psmodels::truncate({0.999})[0] == 0.975);
  CHECK(psmodels::truncate({0.5})[0] == 0.5);
  CHECK(psmodels::truncate({0.0, 0.025, 0.5, 0.975, 1.0}) ==
        std::vector<double>{0.025, 0.025, 0.5, 0.975, 0.975});
  CHECK_THROWS_AS(psmodels::truncate({0.5}, 0.6, 0.4), ParameterError);
  CHECK_THROWS_AS(psmodels::truncate({0.5}, 0.0, 0.9), ParameterError);
}

TEST_CASE("intercept-only logistic fit returns the treated fraction") {
  linalg::Matrix f(7, 0);
  const std::vector<int> a{1, 1, 1, 0, 0, 0, 0};
  const auto fit = psmodels::fit_logistic(f, a);
  CHECK(fit.converged);
  for (double p : fit.probs) CHECK(p == doctest::Approx(3.0 / 7.0).epsilon(1e-9));
}

TEST_CASE("logistic regression recovers the generating coefficients") {
  synthdata::DgpParams params;
  const auto x = synthdata::gen_covariates(100000, params, 21);
  const auto a = synthdata::gen_treatment(x, params, 22);
  const auto fit = psmodels::fit_logistic(x, a);
  CHECK(fit.converged);
  CHECK(std::abs(fit.coef[0] - params.treat_intercept) < 0.05);
  for (int j = 0; j < 9; ++j) CHECK(std::abs(fit.coef[j + 1] - params.treat_coef[j]) < 0.05);
}

TEST_CASE("IRLS agrees with a gradient-descent oracle") {
  const auto [f, a] = paper_problem(500, 31);
  const auto fit = psmodels::fit_logistic(f, a);
  REQUIRE(fit.converged);
  const auto oracle = gradient_descent_logistic(f, a, 1e-2, 100000);
  for (std::size_t j = 0; j < fit.coef.size(); ++j)
    CHECK(std::abs(fit.coef[j] - oracle[j]) < 1e-4);
}

TEST_CASE("IRLS log-likelihood never decreases") {
  const auto [f, a] = paper_problem(300, 41);
  const auto fit = psmodels::fit_logistic(f, a);
  for (std::size_t i = 1; i < fit.loglik_path.size(); ++i)
    CHECK(fit.loglik_path[i] >= fit.loglik_path[i - 1] - 1e-9 * std::abs(fit.loglik_path[i - 1]));
}

TEST_CASE("label swap flips logistic probabilities") {
  const auto [f, a] = paper_problem(300, 51);
  std::vector<int> swapped(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) swapped[i] = 1 - a[i];
  const auto fit = psmodels::fit_logistic(f, a);
  const auto fit_swapped = psmodels::fit_logistic(f, swapped);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(fit_swapped.probs[i] - (1.0 - fit.probs[i])) < 1e-8);
}

TEST_CASE("permuting rows permutes logistic probabilities") {
  const auto [f, a] = paper_problem(120, 61);
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0u);
  rng::Stream s(62);
  for (std::size_t i = perm.size(); i-- > 1;)
    std::swap(perm[i], perm[s.next_index(i + 1)]);

  linalg::Matrix fp(f.rows(), f.cols());
  std::vector<int> ap(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::copy(f.row(perm[i]), f.row(perm[i]) + f.cols(), fp.row(i));
    ap[i] = a[perm[i]];
  }
  const auto fit = psmodels::fit_logistic(f, a);
  const auto fitp = psmodels::fit_logistic(fp, ap);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(fitp.probs[i] - fit.probs[perm[i]]) < 1e-9);
}

TEST_CASE("logistic fit needs both arms") {
  linalg::Matrix f(4, 1);
  CHECK_THROWS_AS(psmodels::fit_logistic(f, std::vector<int>{1, 1, 1, 1}), ContractError);
}

TEST_CASE("perfect separation is flagged but probabilities still come back") {
  rng::Stream s(63);
  linalg::Matrix f(60, 1);
  std::vector<int> a(60);
  for (int i = 0; i < 60; ++i) {
    const double margin = 0.5 + s.next_double();
    a[i] = i % 2;
    f(i, 0) = a[i] ? margin : -margin;
  }
  const auto fit = psmodels::fit_logistic(f, a);
  CHECK_FALSE(fit.converged);
  CHECK(fit.flagged);
  CHECK(fit.probs.size() == 60);
  for (int i = 0; i < 60; ++i) {
    CHECK(fit.probs[i] >= 0.0);
    CHECK(fit.probs[i] <= 1.0);
    // separation pushes fitted probabilities to the boundary
    CHECK(std::abs(fit.probs[i] - a[i]) < 0.01);
  }
}

TEST_CASE("duplicate feature columns fall back to the ridge path") {
  const auto [f, a] = paper_problem(120, 64);
  linalg::Matrix dup(120, 4);
  for (std::size_t i = 0; i < 120; ++i) {
    dup(i, 0) = f(i, 0);
    dup(i, 1) = f(i, 0);  // exact copy keeps the weighted Gram singular
    dup(i, 2) = f(i, 1);
    dup(i, 3) = f(i, 2);
  }
  const auto lr = psmodels::fit_logistic(dup, a);
  for (double p : lr.probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
  const auto lda = psmodels::fit_lda(dup, a);
  for (double p : lda.probs) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("LDA posterior is one half at the mirror point") {
  // Mirrored classes, equal priors, rows at the origin in both classes.
  linalg::Matrix f(8, 2);
  const double pts[3][2] = {{1.0, 0.5}, {2.0, -0.25}, {0.5, 1.5}};
  for (int i = 0; i < 3; ++i) {
    f(i, 0) = pts[i][0];
    f(i, 1) = pts[i][1];
    f(i + 4, 0) = -pts[i][0];
    f(i + 4, 1) = -pts[i][1];
  }
  // rows 3 and 7 stay at the origin
  const std::vector<int> a{1, 1, 1, 1, 0, 0, 0, 0};
  const auto fit = psmodels::fit_lda(f, a);
  CHECK(fit.probs[3] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.probs[7] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("one-dimensional LDA midpoint probability") {
  // Class means 0 and 2, pooled variance exactly 1, equal priors; the rows
  // at value 1 sit halfway between the class means.
  linalg::Matrix f(6, 1);
  const double v[6] = {1.0, -1.0, 0.0, 1.0, 3.0, 2.0};
  for (int i = 0; i < 6; ++i) f(i, 0) = v[i];
  const std::vector<int> a{0, 0, 0, 1, 1, 1};
  const auto fit = psmodels::fit_lda(f, a);
  CHECK(fit.mean0[0] == doctest::Approx(0.0));
  CHECK(fit.mean1[0] == doctest::Approx(2.0));
  CHECK(fit.pooled_cov(0, 0) == doctest::Approx(1.0));
  CHECK(fit.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.probs[3] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("LDA posterior matches a density-formula oracle") {
  const auto [f, a] = paper_problem(60, 71);
  linalg::Matrix f4(60, 4);
  for (std::size_t i = 0; i < 60; ++i)
    for (int j = 0; j < 4; ++j) f4(i, j) = f(i, j);
  const auto fit = psmodels::fit_lda(f4, a);

  const auto cov_inv = invert(fit.pooled_cov);
  const double cov_det = determinant(fit.pooled_cov);
  for (std::size_t i = 0; i < 20; ++i) {
    const double d1 = gaussian_density(f4.row(i), fit.mean1, cov_inv, cov_det, 4);
    const double d0 = gaussian_density(f4.row(i), fit.mean0, cov_inv, cov_det, 4);
    const double posterior =
        fit.prior1 * d1 / (fit.prior1 * d1 + (1.0 - fit.prior1) * d0);
    CHECK(std::abs(fit.probs[i] - posterior) < 1e-10);
  }
}

TEST_CASE("label swap flips LDA probabilities") {
  const auto [f, a] = paper_problem(200, 81);
  std::vector<int> swapped(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) swapped[i] = 1 - a[i];
  const auto fit = psmodels::fit_lda(f, a);
  const auto fit_swapped = psmodels::fit_lda(f, swapped);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(fit_swapped.probs[i] - (1.0 - fit.probs[i])) < 1e-9);
}

TEST_CASE("LDA needs two rows per arm") {
  linalg::Matrix f(4, 1);
  f(0, 0) = 1.0;
  CHECK_THROWS_AS(psmodels::fit_lda(f, std::vector<int>{1, 0, 0, 0}), ContractError);
}

TEST_CASE("estimate_propensity truncates every learner's scores") {
  const auto [f, a] = paper_problem(150, 91);
  for (psmodels::PsKind kind :
       {psmodels::PsKind::LR, psmodels::PsKind::LDA, psmodels::PsKind::RF,
        psmodels::PsKind::SVM}) {
    psmodels::PsLearner learner;
    learner.kind = kind;
    learner.forest.trees = 50;
    const auto fit = psmodels::estimate_propensity(learner, f, a, 17);
    CHECK(fit.scores.size() == a.size());
    for (double s : fit.scores) {
      CHECK(s >= 0.025);
      CHECK(s <= 0.975);
    }
  }
}
