#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "causaldr/outcome.hpp"
#include "causaldr/psmodels.hpp"

// Average-treatment-effect estimators: outcome regression (RSM), inverse
// probability weighting (IPW), and augmented IPW (AIPW).
namespace causaldr::estimators {

enum class Method { RSM, IPW, AIPW };

const char* method_name(Method m);

// z-quantile for two-sided 95% intervals.
inline constexpr double kZ975 = 1.959964;

struct EffectEstimate {
  double tau_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  Method method = Method::RSM;
  std::optional<psmodels::PsKind> ps_model;  // absent for RSM
};

// tau_hat +/- 1.959964 * se; se must be nonnegative.
std::pair<double, double> wald_interval(double tau_hat, double se);

// Mean of mu1 - mu0; SE is the OLS standard error of the treatment
// coefficient carried by the predictions.
EffectEstimate estimate_rsm(const outcome::PotentialPredictions& preds);

// (1/n) sum [ A Y / e - (1-A) Y / (1-e) ]; SE from the sample sd of the
// per-subject summands.
EffectEstimate estimate_ipw(std::span<const double> y, std::span<const int> a,
                            const psmodels::PropensityFit& fit);

// Per-subject augmented estimating function
//   psi_i = [A Y/e - (1-A) Y/(1-e)]
//           - (A - e)/(e(1-e)) * [(1-e) mu1 + e mu0].
std::vector<double> aipw_summands(std::span<const double> y, std::span<const int> a,
                                  const psmodels::PropensityFit& fit,
                                  const outcome::PotentialPredictions& preds);

// Mean of the augmented estimating function.
EffectEstimate estimate_aipw(std::span<const double> y, std::span<const int> a,
                             const psmodels::PropensityFit& fit,
                             const outcome::PotentialPredictions& preds);

}  // namespace causaldr::estimators
