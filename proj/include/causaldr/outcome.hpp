#pragma once

#include <vector>

#include "causaldr/linalg.hpp"

// Linear outcome regression and potential-outcome prediction.
namespace causaldr::outcome {

enum class OutcomeRegime { Correct, Misspecified };

struct OutcomeSpec {
  OutcomeRegime regime = OutcomeRegime::Correct;
};

// Design matrix: intercept, treatment, then the regime's covariates in
// index order. Correct keeps X1..X9; Misspecified keeps X1..X5, X8, X9.
// Requires p = 9.
linalg::Matrix build_outcome_features(const linalg::Matrix& x, const std::vector<int>& a,
                                      const OutcomeSpec& spec);

// Least-squares coefficients for an arbitrary design (thin wrapper over the
// QR solver; ridge fallback on rank deficiency).
std::vector<double> fit_ols(const linalg::Matrix& d, const std::vector<double>& y);

struct OutcomeFit {
  OutcomeSpec spec;
  std::vector<double> coef;   // intercept, treatment, covariates
  double coef_tau_se = 0.0;   // conventional OLS SE of the treatment coefficient
  double sigma2 = 0.0;
  bool ridge_fallback = false;
};

OutcomeFit fit_outcome(const linalg::Matrix& x, const std::vector<int>& a,
                       const std::vector<double>& y, const OutcomeSpec& spec);

struct PotentialPredictions {
  std::vector<double> mu1;  // predictions with treatment forced to 1
  std::vector<double> mu0;  // predictions with treatment forced to 0
  double coef_tau = 0.0;
  double coef_tau_se = 0.0;
};

// Predictions under both treatment assignments. The coefficient layout must
// match the spec's design width (intercept + treatment + covariates).
PotentialPredictions predict_potentials(const std::vector<double>& coef,
                                        const linalg::Matrix& x, const OutcomeSpec& spec);

PotentialPredictions predict_potentials(const OutcomeFit& fit, const linalg::Matrix& x);

}  // namespace causaldr::outcome
