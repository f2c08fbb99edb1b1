#pragma once

#include <cstdint>
#include <vector>

#include "causaldr/dataset.hpp"
#include "causaldr/linalg.hpp"

// Simulation data generator: AR(1)-correlated Gaussian covariates, logistic
// treatment assignment, linear outcome with additive Gaussian noise.
namespace causaldr::synthdata {

struct DgpParams {
  int p = 9;
  double rho = 0.2;
  double treat_intercept = 0.0;
  std::vector<double> treat_coef = {1.2, -0.8, 0.6, 1.1, -0.9, 0.5, 0.7, -1.0, -0.9};
  double outcome_intercept = 0.0;
  std::vector<double> outcome_coef = {0.6, -0.4, 1.1, 0.5, -1.2, 0.9, -0.3, -0.8, 1.5};
  double tau = 2.0;
  double noise_sd = 1.0;

  // Throws ParameterError on |rho| >= 1, coefficient length mismatches,
  // p < 1, or negative noise_sd.
  void validate() const;

  bool operator==(const DgpParams&) const = default;

  std::size_t min_n() const { return static_cast<std::size_t>(p) + 2; }
};

// Sigma_jk = rho^{|j-k|}; positive definite for |rho| < 1.
linalg::Matrix ar1_covariance(int p, double rho);

// n i.i.d. rows from N_p(0, Sigma) via the lower Cholesky factor.
linalg::Matrix gen_covariates(std::size_t n, const DgpParams& params, std::uint64_t seed);

// A_i ~ Bernoulli(logit^{-1}(b0 + x_i . beta)).
std::vector<int> gen_treatment(const linalg::Matrix& x, const DgpParams& params,
                               std::uint64_t seed);

// Y_i = a0 + tau A_i + x_i . gamma + noise_sd * eps_i.
std::vector<double> gen_outcome(const linalg::Matrix& x, const std::vector<int>& a,
                                const DgpParams& params, std::uint64_t seed);

struct DatasetDraw {
  Dataset data;
  int redraws = 0;  // attempts discarded because one arm was empty
};

// Composes the three generators; redraws with a derived sub-seed when a
// draw leaves one arm empty (up to 100 attempts, then
// DegenerateDesignError). Requires n >= p + 2.
DatasetDraw make_dataset(std::size_t n, const DgpParams& params, std::uint64_t seed);

}  // namespace causaldr::synthdata
