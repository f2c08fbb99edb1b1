#include "causaldr/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "causaldr/errors.hpp"
#include "causaldr/kernels.hpp"

namespace causaldr::linalg {

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) throw ShapeError("matvec: dimension mismatch");
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = kernels::dot(m.row_span(i), x);
  return out;
}

bool cholesky_lower(Matrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeError("cholesky: matrix not square");
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j) - kernels::sumsq({a.row(j), j});
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    d = std::sqrt(d);
    a(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double s = kernels::dot({a.row(i), j}, {a.row(j), j});
      a(i, j) = (a(i, j) - s) / d;
    }
    for (std::size_t c = j + 1; c < n; ++c) a(j, c) = 0.0;
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  if (b.size() != n) throw ShapeError("cholesky_solve: dimension mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (x[i] - kernels::dot({l.row(i), i}, {x.data(), i})) / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= l(j, ii) * x[j];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

std::vector<double> solve_spd(Matrix a, std::span<const double> b, double ridge) {
  Matrix work = a;
  if (!cholesky_lower(work)) {
    work = a;
    for (std::size_t j = 0; j < work.rows(); ++j) work(j, j) += ridge;
    if (!cholesky_lower(work))
      throw FitError("symmetric solve failed even with ridge stabilization");
  }
  return cholesky_solve(work, b);
}

namespace {

// Back-substitution with R stored as described in qr_decompose below.
std::vector<double> back_substitute(const Matrix& at,
                                    const std::vector<double>& rdiag,
                                    std::span<const double> qty) {
  const std::size_t k = at.rows();
  std::vector<double> coef(k);
  for (std::size_t jj = k; jj-- > 0;) {
    double s = qty[jj];
    for (std::size_t c = jj + 1; c < k; ++c) s -= at(c, jj) * coef[c];
    coef[jj] = s / rdiag[jj];
  }
  return coef;
}

struct NormalEqFit {
  std::vector<double> coef;
  Matrix chol;  // lower factor of D^T D + ridge I
};

NormalEqFit normal_equations(const Matrix& d, std::span<const double> y, double ridge) {
  const std::size_t n = d.rows();
  const std::size_t k = d.cols();
  Matrix g(k, k);
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    kernels::sym_rank1_update(g.data().data(), k, 1.0, d.row(i));
    kernels::axpy(y[i], d.row_span(i), b);
  }
  // Mirror the upper triangle and stabilize.
  for (std::size_t r = 0; r < k; ++r) {
    g(r, r) += ridge;
    for (std::size_t c = r + 1; c < k; ++c) g(c, r) = g(r, c);
  }
  if (!cholesky_lower(g))
    throw FitError("rank-deficient design even after ridge fallback");
  return {cholesky_solve(g, b), std::move(g)};
}

}  // namespace

OlsFit ols_fit(const Matrix& d, std::span<const double> y) {
  const std::size_t n = d.rows();
  const std::size_t k = d.cols();
  if (y.size() != n) throw ShapeError("ols_fit: response length mismatch");
  if (k == 0) throw ShapeError("ols_fit: empty design");
  if (n <= k) throw ShapeError("ols_fit: need more rows than columns");

  // Work on the transpose so each design column is contiguous.
  Matrix at(k, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) at(j, i) = d(i, j);
  std::vector<double> yt(y.begin(), y.end());

  std::vector<double> rdiag(k, 0.0);
  bool deficient = false;
  for (std::size_t j = 0; j < k; ++j) {
    double* col = at.row(j);
    const std::size_t tail = n - j;
    const double sigma = std::sqrt(kernels::sumsq({col + j, tail}));
    if (sigma == 0.0) {
      deficient = true;
      continue;
    }
    const double alpha = col[j] > 0.0 ? -sigma : sigma;
    col[j] -= alpha;  // col[j..] now holds the Householder vector
    const double vtv = kernels::sumsq({col + j, tail});
    rdiag[j] = alpha;
    if (vtv > 0.0) {
      const std::span<const double> v{col + j, tail};
      for (std::size_t c = j + 1; c < k; ++c) {
        double* target = at.row(c) + j;
        const double w = kernels::dot(v, {target, tail});
        kernels::axpy(-2.0 * w / vtv, v, {target, tail});
      }
      const double wy = kernels::dot(v, {yt.data() + j, tail});
      kernels::axpy(-2.0 * wy / vtv, v, {yt.data() + j, tail});
    }
  }

  double maxdiag = 0.0, mindiag = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double m = std::abs(rdiag[j]);
    maxdiag = std::max(maxdiag, m);
    mindiag = j == 0 ? m : std::min(mindiag, m);
  }
  if (maxdiag == 0.0 || mindiag < 1e-10 * maxdiag) deficient = true;

  OlsFit fit;
  if (!deficient) {
    fit.coef = back_substitute(at, rdiag, yt);
    const double rss = kernels::sumsq({yt.data() + k, n - k});
    fit.sigma2 = rss / static_cast<double>(n - k);
    // (D^T D)^{-1}_jj = ||R^{-T} e_j||^2 via forward substitution on R^T.
    fit.se.resize(k);
    std::vector<double> w(k);
    for (std::size_t j = 0; j < k; ++j) {
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t r = j; r < k; ++r) {
        double s = (r == j) ? 1.0 : 0.0;
        for (std::size_t c = j; c < r; ++c) s -= at(r, c) * w[c];
        // R^T(r,c) = R(c,r); R(c,r) for c<r lives at at(r, c), diag in rdiag.
        w[r] = s / rdiag[r];
      }
      fit.se[j] = std::sqrt(fit.sigma2 * kernels::sumsq({w.data() + j, k - j}));
    }
    return fit;
  }

  fit.ridge_fallback = true;
  NormalEqFit ne = normal_equations(d, y, 1e-10);
  fit.coef = std::move(ne.coef);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - kernels::dot(d.row_span(i), fit.coef);
    rss += r * r;
  }
  fit.sigma2 = rss / static_cast<double>(n - k);
  fit.se.resize(k);
  std::vector<double> w(k);
  for (std::size_t j = 0; j < k; ++j) {
    // (G^{-1})_jj = ||L^{-1} e_j||^2
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t r = j; r < k; ++r) {
      double s = (r == j) ? 1.0 : 0.0;
      for (std::size_t c = j; c < r; ++c) s -= ne.chol(r, c) * w[c];
      w[r] = s / ne.chol(r, r);
    }
    fit.se[j] = std::sqrt(fit.sigma2 * kernels::sumsq({w.data() + j, k - j}));
  }
  return fit;
}

}  // namespace causaldr::linalg
