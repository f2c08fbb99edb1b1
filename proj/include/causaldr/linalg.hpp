#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace causaldr::linalg {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), d_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  double* row(std::size_t i) { return d_.data() + i * cols_; }
  const double* row(std::size_t i) const { return d_.data() + i * cols_; }

  std::span<double> row_span(std::size_t i) { return {row(i), cols_}; }
  std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

  std::span<double> data() { return d_; }
  std::span<const double> data() const { return d_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> d_;
};

// y = M x
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

// In-place lower Cholesky factor of a symmetric positive definite matrix
// (upper triangle ignored). Returns false if a pivot is not positive.
bool cholesky_lower(Matrix& a);

// Solves L L^T x = b given the lower factor.
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b);

// Solves the symmetric positive definite system a x = b. If the plain
// factorization fails, retries once with `ridge` added to the diagonal;
// throws FitError if that also fails. `a` is taken by value (it is
// destroyed by the factorization).
std::vector<double> solve_spd(Matrix a, std::span<const double> b, double ridge);

struct OlsFit {
  std::vector<double> coef;
  std::vector<double> se;   // conventional coefficient standard errors
  double sigma2 = 0.0;      // residual variance, divisor n - k
  bool ridge_fallback = false;
};

// Least squares via Householder QR; falls back to ridge-stabilized normal
// equations (1e-10 added to the diagonal) when R is numerically rank
// deficient. Throws FitError if the fallback is singular too and ShapeError
// when n <= k.
OlsFit ols_fit(const Matrix& d, std::span<const double> y);

}  // namespace causaldr::linalg
