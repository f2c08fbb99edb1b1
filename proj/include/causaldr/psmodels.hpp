#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causaldr/linalg.hpp"

// Propensity-score learners: logistic regression (IRLS), linear discriminant
// analysis, random forest, and an RBF-kernel SVM with Platt scaling. All
// fits are pure functions of (features, labels, hyperparameters, seed).
namespace causaldr::psmodels {

enum class PsRegime { Correct, Misspecified };

struct PsSpec {
  PsRegime regime = PsRegime::Correct;
};

enum class PsKind { LR, RF, LDA, SVM };

const char* kind_name(PsKind k);

// Defaults mirror fully grown classification forests with out-of-bag vote
// fractions; in-sample votes (oob_votes = false) are available but track
// the in-bag labels closely enough to mask weighting instability.
struct ForestParams {
  int trees = 500;
  int mtry = 0;  // 0 -> floor(sqrt(q))
  int min_leaf = 1;
  int max_depth = 0;  // 0 -> unlimited
  bool oob_votes = true;

  void validate() const;

  bool operator==(const ForestParams&) const = default;
};

struct SvmParams {
  enum class Kernel { Rbf, Linear };
  double cost = 1.0;
  double gamma = 0.0;  // 0 -> 1/q
  Kernel kernel = Kernel::Rbf;
  double tol = 1e-3;
  int max_sweeps = 200;  // full passes over the sample

  void validate() const;

  bool operator==(const SvmParams&) const = default;
};

struct PsLearner {
  PsKind kind = PsKind::LR;
  ForestParams forest{};
  SvmParams svm{};

  void validate() const;

  bool operator==(const PsLearner&) const = default;
};

struct PropensityFit {
  std::vector<double> scores;  // clamped into [lower, upper]
  PsLearner learner;
  double lower = 0.025;
  double upper = 0.975;
  bool flagged = false;
};

// Correct -> the nine covariates unchanged; Misspecified -> X1..X7 plus the
// products X1*X2 and X1*X3 (X8, X9 dropped). Requires p = 9.
linalg::Matrix build_ps_features(const linalg::Matrix& x, const PsSpec& spec);

struct LogisticFit {
  std::vector<double> coef;  // intercept first
  std::vector<double> probs;
  bool converged = false;
  bool flagged = false;  // non-convergence with runaway coefficients
  int iterations = 0;
  std::vector<double> loglik_path;
};

// Bernoulli MLE with intercept via IRLS with step halving; converged when
// the largest coefficient change drops below 1e-8 (at most 50 iterations).
LogisticFit fit_logistic(const linalg::Matrix& f, const std::vector<int>& a);

struct LdaFit {
  std::vector<double> mean0, mean1;
  linalg::Matrix pooled_cov;
  double prior1 = 0.5;
  std::vector<double> probs;
};

// Gaussian class conditionals with shared pooled covariance and empirical
// priors; both arms need at least two rows.
LdaFit fit_lda(const linalg::Matrix& f, const std::vector<int>& a);

struct ForestFit {
  std::vector<double> probs;  // fraction of trees voting treatment
};

ForestFit fit_random_forest(const linalg::Matrix& f, const std::vector<int>& a,
                            std::uint64_t seed, const ForestParams& params = {});

struct SvmFit {
  std::vector<double> decision;
  std::vector<double> probs;
  double platt_intercept = 0.0;
  double platt_slope = 0.0;
  bool converged = false;
};

SvmFit fit_svm(const linalg::Matrix& f, const std::vector<int>& a, std::uint64_t seed,
               const SvmParams& params = {});

// Elementwise clamp into [lower, upper]; requires 0 < lower < upper < 1.
std::vector<double> truncate(std::vector<double> scores, double lower = 0.025,
                             double upper = 0.975);

// Fits the requested learner and truncates, producing the scores the
// estimators consume.
PropensityFit estimate_propensity(const PsLearner& learner, const linalg::Matrix& f,
                                  const std::vector<int>& a, std::uint64_t seed,
                                  double lower = 0.025, double upper = 0.975);

}  // namespace causaldr::psmodels
