#pragma once

#include <span>
#include <vector>

namespace causaldr::stats {

// logit^{-1}, stable for large |eta|.
double inv_logit(double eta);

// log(1 + exp(eta)) without overflow.
double log1p_exp(double eta);

// Standard normal CDF.
double normal_cdf(double z);

double mean(std::span<const double> x);

// Sample standard deviation, divisor n - 1.
double sample_sd(std::span<const double> x);

// Type-7 quantile (linear interpolation between order statistics);
// `sorted` must be ascending and non-empty, p in [0, 1].
double quantile_type7(std::span<const double> sorted, double p);

struct BoxStats {
  double min, q1, median, q3, max;
  std::vector<double> outliers;  // outside q1/q3 -/+ 1.5 IQR
};

BoxStats box_stats(std::vector<double> values);

}  // namespace causaldr::stats
