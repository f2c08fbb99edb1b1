#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causaldr/dataset.hpp"
#include "causaldr/estimators.hpp"
#include "causaldr/psmodels.hpp"

// CSV analysis pipeline: load, standardize (with optional quadratic terms),
// estimate every configured estimator x PS-model combination, and attach
// bootstrap standard errors and Wald p-values.
namespace causaldr::realdata {

enum class TestKind { OneSidedGreater, TwoSided };

struct AnalysisSpec {
  std::string outcome_column;
  std::string treatment_column;
  std::vector<std::string> covariate_columns;
  std::vector<std::string> quadratic_columns;  // squares appended post-standardization
  bool standardize = true;
  TestKind test = TestKind::TwoSided;
  int bootstrap_b = 1000;
  double ps_lower = 0.025;
  double ps_upper = 0.975;
  bool percentile_ci = false;  // default: normal approximation with bootstrap SE

  void validate() const;

  bool operator==(const AnalysisSpec&) const = default;
};

struct LoadReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t dropped_missing = 0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
};

struct LoadedData {
  Dataset data;
  std::vector<std::string> covariate_names;
  LoadReport report;
};

// Parses the configured columns. Binary categorical (two-level string)
// columns are coded 0/1 in lexicographic order; rows missing the outcome,
// the treatment, or any covariate are dropped and counted. Unparseable
// cells and non-binary treatments raise errors naming the coordinates.
LoadedData load_csv(const std::string& path, const AnalysisSpec& spec);

struct ColumnScale {
  std::string name;
  bool scaled = false;
  double mean = 0.0;
  double sd = 1.0;
};

struct StandardizedData {
  Dataset data;
  std::vector<std::string> covariate_names;
  std::vector<ColumnScale> scaling;  // covariates then outcome
};

// z-scores continuous covariates and the outcome (divisor n - 1); binary
// 0/1 columns pass through. Quadratic columns are the square of the
// standardized base column, appended and then standardized themselves.
StandardizedData standardize(const Dataset& data,
                             const std::vector<std::string>& covariate_names,
                             const AnalysisSpec& spec);

struct AnalysisRow {
  estimators::Method method;
  std::optional<psmodels::PsKind> ps_model;
  double tau_hat = 0.0;
  double se = 0.0;  // bootstrap
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p_value = 1.0;
  bool degenerate_se = false;
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  int bootstrap_redraws = 0;  // resamples redrawn because one arm was empty
};

// Full-sample point estimates plus bootstrap SEs; every resample reruns the
// entire pipeline (PS fit, truncation, outcome fit, estimators).
AnalysisResult analyze(const Dataset& data, const AnalysisSpec& spec,
                       const std::vector<psmodels::PsLearner>& learners, std::uint64_t seed,
                       int workers = 1);

// z = tau_hat / se; one-sided-greater -> 1 - Phi(z), two-sided -> 2(1 - Phi(|z|)).
// se = 0 degenerates to 0 or 1 by the sign of tau_hat.
double test_hypothesis(double tau_hat, double se, TestKind test);

}  // namespace causaldr::realdata
