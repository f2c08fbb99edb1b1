#include <cmath>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/linalg.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::psmodels {

LdaFit fit_lda(const linalg::Matrix& f, const std::vector<int>& a) {
  const std::size_t n = f.rows();
  const std::size_t q = f.cols();
  if (a.size() != n) throw ShapeError("fit_lda: label length mismatch");
  if (q == 0) throw ShapeError("fit_lda: needs at least one feature");

  std::size_t n1 = 0;
  for (int v : a) n1 += static_cast<std::size_t>(v);
  const std::size_t n0 = n - n1;
  if (n0 < 2 || n1 < 2)
    throw ContractError("fit_lda: each arm needs at least two rows");

  LdaFit fit;
  fit.mean0.assign(q, 0.0);
  fit.mean1.assign(q, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = a[i] ? fit.mean1 : fit.mean0;
    kernels::axpy(1.0, f.row_span(i), m);
  }
  kernels::scale(fit.mean0, 1.0 / static_cast<double>(n0));
  kernels::scale(fit.mean1, 1.0 / static_cast<double>(n1));

  // Pooled within-class covariance, divisor n - 2.
  linalg::Matrix s(q, q);
  std::vector<double> centered(q);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = a[i] ? fit.mean1 : fit.mean0;
    const double* row = f.row(i);
    for (std::size_t j = 0; j < q; ++j) centered[j] = row[j] - m[j];
    kernels::sym_rank1_update(s.data().data(), q, 1.0, centered.data());
  }
  for (std::size_t r = 0; r < q; ++r)
    for (std::size_t c = r; c < q; ++c) {
      s(r, c) /= static_cast<double>(n - 2);
      s(c, r) = s(r, c);
    }
  fit.pooled_cov = s;
  fit.prior1 = static_cast<double>(n1) / static_cast<double>(n);

  double trace = 0.0;
  for (std::size_t j = 0; j < q; ++j) trace += s(j, j);
  const double ridge = 1e-8 * trace / static_cast<double>(q);

  // Discriminant: d(x) = (m1-m0)' S^{-1} x - (m1+m0)' S^{-1} (m1-m0) / 2
  //                      + log(prior1 / prior0)
  std::vector<double> diff(q), avg(q);
  for (std::size_t j = 0; j < q; ++j) {
    diff[j] = fit.mean1[j] - fit.mean0[j];
    avg[j] = 0.5 * (fit.mean1[j] + fit.mean0[j]);
  }
  std::vector<double> w;
  try {
    w = linalg::solve_spd(s, diff, ridge);
  } catch (const FitError&) {
    throw FitError("fit_lda: pooled covariance singular even with ridge");
  }
  const double offset = std::log(fit.prior1 / (1.0 - fit.prior1)) -
                        kernels::dot(avg, w);

  fit.probs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    fit.probs[i] = stats::inv_logit(kernels::dot(f.row_span(i), w) + offset);
  return fit;
}

}  // namespace causaldr::psmodels
