#include "causaldr/realdata.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "causaldr/csvio.hpp"
#include "causaldr/errors.hpp"
#include "causaldr/linalg.hpp"
#include "causaldr/outcome.hpp"
#include "causaldr/parallel.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::realdata {

namespace {

constexpr std::uint64_t kFitTag = 0x666974;

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" ||
         cell == "nan" || cell == ".";
}

std::optional<double> parse_number(const std::string& cell) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

bool is_binary01(std::span<const double> values) {
  for (double v : values)
    if (v != 0.0 && v != 1.0) return false;
  return true;
}

}  // namespace

void AnalysisSpec::validate() const {
  if (outcome_column.empty() || treatment_column.empty())
    throw ParameterError("analysis spec: outcome and treatment columns required");
  if (covariate_columns.empty())
    throw ParameterError("analysis spec: at least one covariate column required");
  std::set<std::string> seen{outcome_column, treatment_column};
  for (const auto& c : covariate_columns)
    if (!seen.insert(c).second) throw ParameterError("analysis spec: duplicate column " + c);
  for (const auto& c : quadratic_columns)
    if (std::find(covariate_columns.begin(), covariate_columns.end(), c) ==
        covariate_columns.end())
      throw ParameterError("analysis spec: quadratic column " + c + " is not a covariate");
  if (bootstrap_b < 100) throw ParameterError("analysis spec: bootstrap_b must be >= 100");
  if (!(0.0 < ps_lower && ps_lower < ps_upper && ps_upper < 1.0))
    throw ParameterError("analysis spec: ps bounds must satisfy 0 < lower < upper < 1");
}

LoadedData load_csv(const std::string& path, const AnalysisSpec& spec) {
  spec.validate();
  const csvio::Table table = csvio::read_csv(path);

  std::vector<std::string> needed{spec.treatment_column, spec.outcome_column};
  needed.insert(needed.end(), spec.covariate_columns.begin(), spec.covariate_columns.end());
  std::vector<std::size_t> idx;
  idx.reserve(needed.size());
  for (const auto& name : needed) idx.push_back(table.column(name));

  // Decide numeric vs two-level categorical coding per column.
  // data-file rows are 1-based plus the header line in error messages.
  const std::size_t ncols = needed.size();
  std::vector<std::map<std::string, double>> coding(ncols);
  for (std::size_t c = 0; c < ncols; ++c) {
    bool any_text = false;
    std::set<std::string> levels;
    for (const auto& row : table.rows) {
      const std::string& cell = row[idx[c]];
      if (is_missing(cell)) continue;
      if (!parse_number(cell)) {
        any_text = true;
        levels.insert(cell);
      }
    }
    if (!any_text) continue;
    for (const auto& row : table.rows) {
      const std::string& cell = row[idx[c]];
      if (!is_missing(cell) && parse_number(cell)) levels.insert(cell);
    }
    if (levels.size() != 2) {
      std::size_t rowno = 0;
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& cell = table.rows[r][idx[c]];
        if (!is_missing(cell) && !parse_number(cell)) {
          rowno = r + 2;
          break;
        }
      }
      throw IoError(path + ": column '" + needed[c] + "' has unparseable cell at row " +
                    std::to_string(rowno) + " and is not two-level categorical");
    }
    auto it = levels.begin();
    coding[c][*it] = 0.0;
    coding[c][*std::next(it)] = 1.0;
  }

  LoadedData out;
  out.covariate_names = spec.covariate_columns;
  out.report.rows_read = table.rows.size();

  std::vector<std::vector<double>> kept_rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    bool missing = false;
    std::vector<double> parsed(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      const std::string& cell = row[idx[c]];
      if (is_missing(cell)) {
        missing = true;
        break;
      }
      if (!coding[c].empty()) {
        auto it = coding[c].find(cell);
        if (it == coding[c].end())
          throw IoError(path + ": unexpected level '" + cell + "' in column '" + needed[c] +
                        "' at row " + std::to_string(r + 2));
        parsed[c] = it->second;
      } else {
        const auto v = parse_number(cell);
        if (!v)
          throw IoError(path + ": unparseable cell '" + cell + "' in column '" + needed[c] +
                        "' at row " + std::to_string(r + 2));
        parsed[c] = *v;
      }
    }
    if (missing) {
      ++out.report.dropped_missing;
      continue;
    }
    if (parsed[0] != 0.0 && parsed[0] != 1.0)
      throw IoError(path + ": non-binary treatment value '" + row[idx[0]] + "' at row " +
                    std::to_string(r + 2));
    kept_rows.push_back(std::move(parsed));
  }

  const std::size_t n = kept_rows.size();
  const std::size_t p = spec.covariate_columns.size();
  out.report.rows_kept = n;
  out.data.x = linalg::Matrix(n, p);
  out.data.a.resize(n);
  out.data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.data.a[i] = static_cast<int>(kept_rows[i][0]);
    out.data.y[i] = kept_rows[i][1];
    for (std::size_t j = 0; j < p; ++j) out.data.x(i, j) = kept_rows[i][j + 2];
  }
  out.report.n_treated = out.data.n_treated();
  out.report.n_control = n - out.report.n_treated;
  return out;
}

namespace {

ColumnScale zscore_column(std::vector<double>& col, const std::string& name, bool enabled) {
  ColumnScale s;
  s.name = name;
  if (!enabled || is_binary01(col)) return s;
  s.mean = stats::mean(col);
  s.sd = stats::sample_sd(col);
  if (s.sd == 0.0) throw ParameterError("standardize: zero-variance column " + name);
  s.scaled = true;
  for (double& v : col) v = (v - s.mean) / s.sd;
  return s;
}

}  // namespace

StandardizedData standardize(const Dataset& data,
                             const std::vector<std::string>& covariate_names,
                             const AnalysisSpec& spec) {
  if (covariate_names.size() != data.x.cols())
    throw ShapeError("standardize: covariate name count mismatch");
  const std::size_t n = data.n();
  const std::size_t p = data.x.cols();
  const std::size_t extra = spec.quadratic_columns.size();

  StandardizedData out;
  out.covariate_names = covariate_names;
  out.data.a = data.a;
  out.data.x = linalg::Matrix(n, p + extra);

  std::vector<double> col(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = data.x(i, j);
    out.scaling.push_back(zscore_column(col, covariate_names[j], spec.standardize));
    for (std::size_t i = 0; i < n; ++i) out.data.x(i, j) = col[i];
  }

  for (std::size_t k = 0; k < extra; ++k) {
    const std::string& base = spec.quadratic_columns[k];
    const auto it = std::find(covariate_names.begin(), covariate_names.end(), base);
    if (it == covariate_names.end())
      throw ParameterError("standardize: quadratic base column " + base + " not found");
    const auto j = static_cast<std::size_t>(it - covariate_names.begin());
    for (std::size_t i = 0; i < n; ++i) col[i] = data.x(i, j);
    if (is_binary01(col))
      throw ParameterError("standardize: quadratic term of binary column " + base);
    // Square of the standardized base, itself standardized afterwards.
    for (std::size_t i = 0; i < n; ++i) {
      const double z = out.data.x(i, j);
      col[i] = z * z;
    }
    out.scaling.push_back(zscore_column(col, base + "_sq", spec.standardize));
    for (std::size_t i = 0; i < n; ++i) out.data.x(i, p + k) = col[i];
    out.covariate_names.push_back(base + "_sq");
  }

  out.data.y = data.y;
  out.scaling.push_back(zscore_column(out.data.y, "outcome", spec.standardize));
  return out;
}

double test_hypothesis(double tau_hat, double se, TestKind test) {
  if (se < 0.0) throw ParameterError("test_hypothesis: negative se");
  if (se == 0.0) {
    if (test == TestKind::TwoSided) return tau_hat != 0.0 ? 0.0 : 1.0;
    return tau_hat > 0.0 ? 0.0 : 1.0;
  }
  const double z = tau_hat / se;
  if (test == TestKind::OneSidedGreater) return 1.0 - stats::normal_cdf(z);
  return 2.0 * (1.0 - stats::normal_cdf(std::abs(z)));
}

namespace {

// One full pipeline pass: PS fits over all covariates, truncation, outcome
// regression with intercept + treatment + covariates, then the estimators.
std::vector<double> pipeline_estimates(const Dataset& ds,
                                       const std::vector<psmodels::PsLearner>& learners,
                                       const AnalysisSpec& spec, std::uint64_t fit_seed,
                                       std::vector<estimators::EffectEstimate>* detail) {
  const std::size_t n = ds.n();
  std::vector<psmodels::PropensityFit> fits;
  fits.reserve(learners.size());
  for (std::size_t l = 0; l < learners.size(); ++l) {
    fits.push_back(psmodels::estimate_propensity(
        learners[l], ds.x, ds.a, rng::derive_key(fit_seed, {static_cast<std::uint64_t>(l)}),
        spec.ps_lower, spec.ps_upper));
  }

  linalg::Matrix design(n, ds.x.cols() + 2);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = design.row(i);
    row[0] = 1.0;
    row[1] = static_cast<double>(ds.a[i]);
    std::copy(ds.x.row(i), ds.x.row(i) + ds.x.cols(), row + 2);
  }
  const linalg::OlsFit ols = linalg::ols_fit(design, ds.y);
  outcome::PotentialPredictions preds;
  preds.coef_tau = ols.coef[1];
  preds.coef_tau_se = ols.se[1];
  preds.mu0.resize(n);
  preds.mu1.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double base = ols.coef[0];
    for (std::size_t j = 0; j < ds.x.cols(); ++j) base += ols.coef[j + 2] * ds.x(i, j);
    preds.mu0[i] = base;
    preds.mu1[i] = base + ols.coef[1];
  }

  std::vector<double> taus;
  auto push = [&](const estimators::EffectEstimate& est) {
    taus.push_back(est.tau_hat);
    if (detail) detail->push_back(est);
  };
  for (const auto& fit : fits) push(estimators::estimate_ipw(ds.y, ds.a, fit));
  for (const auto& fit : fits) push(estimators::estimate_aipw(ds.y, ds.a, fit, preds));
  push(estimators::estimate_rsm(preds));
  return taus;
}

Dataset resample(const Dataset& ds, rng::Stream& stream) {
  const std::size_t n = ds.n();
  Dataset out;
  out.x = linalg::Matrix(n, ds.x.cols());
  out.a.resize(n);
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(stream.next_index(n));
    std::copy(ds.x.row(k), ds.x.row(k) + ds.x.cols(), out.x.row(i));
    out.a[i] = ds.a[k];
    out.y[i] = ds.y[k];
  }
  return out;
}

}  // namespace

AnalysisResult analyze(const Dataset& data, const AnalysisSpec& spec,
                       const std::vector<psmodels::PsLearner>& learners, std::uint64_t seed,
                       int workers) {
  spec.validate();
  if (learners.empty()) throw ParameterError("analyze: needs at least one learner");
  if (!data.both_arms_present()) throw ContractError("analyze: both arms must be non-empty");

  AnalysisResult result;
  result.n_treated = data.n_treated();
  result.n_control = data.n() - result.n_treated;

  std::vector<estimators::EffectEstimate> detail;
  const std::vector<double> point =
      pipeline_estimates(data, learners, spec, rng::derive_key(seed, {kFitTag, 0}), &detail);

  const auto b = static_cast<std::size_t>(spec.bootstrap_b);
  const std::size_t slots = point.size();
  std::vector<std::vector<double>> boot(b, std::vector<double>(slots));
  std::atomic<int> redraws{0};
  parallel::for_each_index(b, workers, [&](std::size_t rep) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt >= 1000)
        throw DegenerateDesignError("analyze: bootstrap resample kept losing an arm");
      rng::Stream stream = rng::derive_stream(
          seed, {rng::tag::kBootstrap, static_cast<std::uint64_t>(rep), attempt});
      Dataset rs = resample(data, stream);
      if (!rs.both_arms_present()) {
        redraws.fetch_add(1);
        continue;
      }
      boot[rep] = pipeline_estimates(rs, learners, spec,
                                     rng::derive_key(seed, {kFitTag, rep + 1, attempt}), nullptr);
      break;
    }
  });
  result.bootstrap_redraws = redraws.load();

  std::vector<double> draws(b);
  for (std::size_t s = 0; s < slots; ++s) {
    for (std::size_t rep = 0; rep < b; ++rep) draws[rep] = boot[rep][s];
    AnalysisRow row;
    row.method = detail[s].method;
    row.ps_model = detail[s].ps_model;
    row.tau_hat = point[s];
    row.se = stats::sample_sd(draws);
    if (spec.percentile_ci) {
      std::sort(draws.begin(), draws.end());
      row.ci_low = stats::quantile_type7(draws, 0.025);
      row.ci_high = stats::quantile_type7(draws, 0.975);
    } else {
      std::tie(row.ci_low, row.ci_high) = estimators::wald_interval(row.tau_hat, row.se);
    }
    row.degenerate_se = row.se == 0.0;
    row.p_value = test_hypothesis(row.tau_hat, row.se, spec.test);
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace causaldr::realdata
