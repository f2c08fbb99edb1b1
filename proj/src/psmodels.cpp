#include "causaldr/psmodels.hpp"

#include <cmath>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"

namespace causaldr::psmodels {

const char* kind_name(PsKind k) {
  switch (k) {
    case PsKind::LR:
      return "LR";
    case PsKind::RF:
      return "RF";
    case PsKind::LDA:
      return "LDA";
    case PsKind::SVM:
      return "SVM";
  }
  return "?";
}

void ForestParams::validate() const {
  if (trees < 1) throw ParameterError("forest: tree count must be >= 1");
  if (mtry < 0) throw ParameterError("forest: mtry must be >= 0");
  if (min_leaf < 1) throw ParameterError("forest: min_leaf must be >= 1");
  if (max_depth < 0) throw ParameterError("forest: max_depth must be >= 0");
}

void SvmParams::validate() const {
  if (!(cost > 0.0)) throw ParameterError("svm: cost must be positive");
  if (gamma < 0.0) throw ParameterError("svm: gamma must be nonnegative");
  if (!(tol > 0.0)) throw ParameterError("svm: tolerance must be positive");
  if (max_sweeps < 1) throw ParameterError("svm: max_sweeps must be >= 1");
}

void PsLearner::validate() const {
  forest.validate();
  svm.validate();
}

linalg::Matrix build_ps_features(const linalg::Matrix& x, const PsSpec& spec) {
  if (x.cols() != 9) throw ShapeError("build_ps_features: expected 9 covariates");
  if (spec.regime == PsRegime::Correct) return x;

  const std::size_t n = x.rows();
  linalg::Matrix f(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const double* in = x.row(i);
    double* out = f.row(i);
    for (std::size_t j = 0; j < 7; ++j) out[j] = in[j];
    out[7] = in[0] * in[1];
    out[8] = in[0] * in[2];
  }
  return f;
}

std::vector<double> truncate(std::vector<double> scores, double lower, double upper) {
  if (!(0.0 < lower && lower < upper && upper < 1.0))
    throw ParameterError("truncate: bounds must satisfy 0 < lower < upper < 1");
  kernels::clamp(scores, lower, upper);
  return scores;
}

PropensityFit estimate_propensity(const PsLearner& learner, const linalg::Matrix& f,
                                  const std::vector<int>& a, std::uint64_t seed,
                                  double lower, double upper) {
  learner.validate();
  PropensityFit fit;
  fit.learner = learner;
  fit.lower = lower;
  fit.upper = upper;
  switch (learner.kind) {
    case PsKind::LR: {
      LogisticFit lr = fit_logistic(f, a);
      fit.scores = truncate(std::move(lr.probs), lower, upper);
      fit.flagged = lr.flagged;
      break;
    }
    case PsKind::LDA: {
      LdaFit lda = fit_lda(f, a);
      fit.scores = truncate(std::move(lda.probs), lower, upper);
      break;
    }
    case PsKind::RF: {
      ForestFit rf = fit_random_forest(f, a, seed, learner.forest);
      fit.scores = truncate(std::move(rf.probs), lower, upper);
      break;
    }
    case PsKind::SVM: {
      SvmFit svm = fit_svm(f, a, seed, learner.svm);
      fit.scores = truncate(std::move(svm.probs), lower, upper);
      fit.flagged = !svm.converged;
      break;
    }
  }
  return fit;
}

}  // namespace causaldr::psmodels
