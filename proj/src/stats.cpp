#include "causaldr/stats.hpp"

#include <algorithm>
#include <cmath>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"

namespace causaldr::stats {

double inv_logit(double eta) {
  if (eta >= 0.0) {
    const double e = std::exp(-eta);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log1p_exp(double eta) {
  if (eta > 0.0) return eta + std::log1p(std::exp(-eta));
  return std::log1p(std::exp(eta));
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mean(std::span<const double> x) {
  if (x.empty()) throw ParameterError("mean of empty range");
  return kernels::sum(x) / static_cast<double>(x.size());
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw ParameterError("sample sd needs at least 2 values");
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(x.size() - 1));
}

double quantile_type7(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ParameterError("quantile of empty range");
  if (p < 0.0 || p > 1.0) throw ParameterError("quantile probability outside [0,1]");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw ParameterError("box_stats of empty range");
  std::sort(values.begin(), values.end());
  BoxStats s{};
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_type7(values, 0.25);
  s.median = quantile_type7(values, 0.5);
  s.q3 = quantile_type7(values, 0.75);
  const double iqr = s.q3 - s.q1;
  const double lo = s.q1 - 1.5 * iqr;
  const double hi = s.q3 + 1.5 * iqr;
  for (double v : values)
    if (v < lo || v > hi) s.outliers.push_back(v);
  return s;
}

}  // namespace causaldr::stats
