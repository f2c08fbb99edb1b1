#include <cmath>
#include <cstdlib>
#include <vector>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::psmodels {

namespace {

// Soft-margin SVM dual solved by sequential minimal optimization with an
// error cache; pairs picked by the max-|E1 - E2| heuristic with seeded
// random fallbacks.
class SmoSolver {
 public:
  SmoSolver(const linalg::Matrix& k, const std::vector<double>& y, const SvmParams& params,
            rng::Stream& stream)
      : k_(k), y_(y), c_(params.cost), tol_(params.tol), stream_(stream),
        n_(y.size()), alpha_(n_, 0.0), err_(n_) {
    for (std::size_t i = 0; i < n_; ++i) err_[i] = -y_[i];
  }

  bool solve(int max_sweeps) {
    bool examine_all = true;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      int changed = 0;
      for (std::size_t i = 0; i < n_; ++i) {
        if (!examine_all && !non_bound(i)) continue;
        changed += examine(i);
      }
      if (examine_all) {
        if (changed == 0) return true;
        examine_all = false;
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    return false;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return b_; }

 private:
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  int examine(std::size_t i2) {
    const double e2 = err_[i2];
    const double r2 = e2 * y_[i2];
    const bool violates = (r2 < -tol_ && alpha_[i2] < c_) || (r2 > tol_ && alpha_[i2] > 0.0);
    if (!violates) return 0;

    // Best |E1 - E2| over non-bound points first.
    std::size_t best = n_;
    double best_gap = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == i2 || !non_bound(i)) continue;
      const double gap = std::abs(err_[i] - e2);
      if (gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (best < n_ && take_step(best, i2)) return 1;

    const std::size_t start = stream_.next_index(n_);
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i = (start + off) % n_;
      if (i == i2 || !non_bound(i)) continue;
      if (take_step(i, i2)) return 1;
    }
    const std::size_t start2 = stream_.next_index(n_);
    for (std::size_t off = 0; off < n_; ++off) {
      const std::size_t i = (start2 + off) % n_;
      if (i == i2) continue;
      if (take_step(i, i2)) return 1;
    }
    return 0;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    const double a1_old = alpha_[i1];
    const double a2_old = alpha_[i2];
    const double y1 = y_[i1], y2 = y_[i2];
    const double e1 = err_[i1], e2 = err_[i2];
    const double s = y1 * y2;

    double lo, hi;
    if (s < 0.0) {
      lo = std::max(0.0, a2_old - a1_old);
      hi = std::min(c_, c_ + a2_old - a1_old);
    } else {
      lo = std::max(0.0, a1_old + a2_old - c_);
      hi = std::min(c_, a1_old + a2_old);
    }
    if (lo >= hi) return false;

    const double k11 = k_(i1, i1), k22 = k_(i2, i2), k12 = k_(i1, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    if (eta <= 0.0) return false;  // PD kernel: only identical points

    double a2 = a2_old + y2 * (e1 - e2) / eta;
    a2 = std::min(std::max(a2, lo), hi);
    if (std::abs(a2 - a2_old) < 1e-12 * (a2 + a2_old + 1e-12)) return false;
    const double a1 = a1_old + s * (a2_old - a2);

    const double d1 = y1 * (a1 - a1_old);
    const double d2 = y2 * (a2 - a2_old);
    const double b1 = -e1 - d1 * k11 - d2 * k12;
    const double b2 = -e2 - d1 * k12 - d2 * k22;
    double db;
    if (a1 > 0.0 && a1 < c_)
      db = b1;
    else if (a2 > 0.0 && a2 < c_)
      db = b2;
    else
      db = 0.5 * (b1 + b2);

    alpha_[i1] = a1;
    alpha_[i2] = a2;
    b_ += db;
    for (std::size_t i = 0; i < n_; ++i)
      err_[i] += d1 * k_(i1, i) + d2 * k_(i2, i) + db;
    return true;
  }

  const linalg::Matrix& k_;
  const std::vector<double>& y_;
  double c_;
  double tol_;
  rng::Stream& stream_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> err_;
  double b_ = 0.0;
};

linalg::Matrix kernel_matrix(const linalg::Matrix& f, const SvmParams& params) {
  const std::size_t n = f.rows();
  const double gamma =
      params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(std::max<std::size_t>(f.cols(), 1));
  linalg::Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    k(i, i) = params.kernel == SvmParams::Kernel::Rbf ? 1.0
                                                      : kernels::dot(f.row_span(i), f.row_span(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = params.kernel == SvmParams::Kernel::Rbf
                           ? std::exp(-gamma * kernels::sq_dist(f.row_span(i), f.row_span(j)))
                           : kernels::dot(f.row_span(i), f.row_span(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

SvmFit fit_svm(const linalg::Matrix& f, const std::vector<int>& a, std::uint64_t seed,
               const SvmParams& params) {
  params.validate();
  const std::size_t n = f.rows();
  if (a.size() != n) throw ShapeError("fit_svm: label length mismatch");
  std::size_t treated = 0;
  for (int v : a) treated += static_cast<std::size_t>(v);
  if (treated == 0 || treated == n)
    throw ContractError("fit_svm: both arms must be non-empty");

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] ? 1.0 : -1.0;

  const linalg::Matrix k = kernel_matrix(f, params);
  rng::Stream stream = rng::derive_stream(seed, {rng::tag::kSvm});
  SmoSolver solver(k, y, params, stream);

  SvmFit fit;
  fit.converged = solver.solve(params.max_sweeps);

  // Recompute decision values from the dual variables; the error cache
  // accumulates rounding over many pair updates.
  fit.decision.assign(n, solver.bias());
  const std::vector<double>& alpha = solver.alpha();
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] == 0.0) continue;
    const double w = alpha[j] * y[j];
    for (std::size_t i = 0; i < n; ++i) fit.decision[i] += w * k(j, i);
  }

  // Platt scaling: one-dimensional logistic fit of the labels on the
  // decision values.
  linalg::Matrix d(n, 1);
  for (std::size_t i = 0; i < n; ++i) d(i, 0) = fit.decision[i];
  const LogisticFit platt = fit_logistic(d, a);
  fit.platt_intercept = platt.coef[0];
  fit.platt_slope = platt.coef[1];
  fit.probs = platt.probs;
  return fit;
}

}  // namespace causaldr::psmodels
