#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "causaldr/csvio.hpp"
#include "causaldr/estimators.hpp"
#include "causaldr/outcome.hpp"
#include "causaldr/psmodels.hpp"
#include "causaldr/synthdata.hpp"

// Monte Carlo benchmark over the scenario grid: per replicate, generate a
// dataset, fit the propensity learners under the scenario's regime,
// truncate, fit the outcome model, and compute every configured estimator.
namespace causaldr::simharness {

struct ScenarioSpec {
  int scenario_id = 1;
  psmodels::PsRegime ps_regime = psmodels::PsRegime::Correct;
  outcome::OutcomeRegime outcome_regime = outcome::OutcomeRegime::Correct;
  std::size_t n = 200;
  double rho = 0.2;

  // 1 = (Correct, Correct), 2 = (Misspecified, Correct),
  // 3 = (Correct, Misspecified), 4 = (Misspecified, Misspecified).
  static ScenarioSpec from_id(int id, std::size_t n, double rho);
};

struct MetricsSummary {
  int scenario_id = 0;
  std::size_t n = 0;
  double rho = 0.0;
  estimators::Method method = estimators::Method::RSM;
  std::optional<psmodels::PsKind> ps_model;
  double mean = 0.0;
  double bias = 0.0;   // mean - tau
  double abias = 0.0;  // mean |tau_hat - tau|
  double rmse = 0.0;
  double se = 0.0;     // sample sd of the replicate estimates
  double width = 0.0;  // mean CI width
  int n_replicates = 0;
};

struct ReplicateRecord {
  int replicate_index = 0;
  std::uint64_t data_seed = 0;
  int redraws = 0;
  std::vector<estimators::EffectEstimate> estimates;
  std::vector<std::string> flags;
};

struct SimPlan {
  std::vector<int> scenario_ids = {1, 2, 3, 4};
  std::vector<std::size_t> sample_sizes = {200, 1000};
  std::vector<double> rhos = {0.2, 0.7};
  int replicates = 1000;
  synthdata::DgpParams dgp{};
  std::vector<psmodels::PsLearner> learners;  // empty -> LR, RF, LDA, SVM
  std::vector<estimators::Method> methods = {estimators::Method::RSM,
                                             estimators::Method::IPW,
                                             estimators::Method::AIPW};
  std::uint64_t master_seed = 0;
  int workers = 1;

  bool operator==(const SimPlan&) const = default;
};

std::vector<psmodels::PsLearner> default_learners();

// Seed for the dataset of replicate r. Shared across scenarios with equal
// (n, rho) so regime changes affect only model fitting; that is what makes
// the IPW rows of scenarios with the same PS regime coincide.
std::uint64_t replicate_data_seed(std::uint64_t master_seed, std::size_t n, double rho,
                                  int replicate);

ReplicateRecord run_replicate(const ScenarioSpec& spec, const synthdata::DgpParams& dgp,
                              const std::vector<psmodels::PsLearner>& learners,
                              const std::vector<estimators::Method>& methods,
                              int replicate_index, std::uint64_t master_seed);

// Replicate-level metrics: Mean, Bias = mean - tau, ABias, RMSE, SE
// (divisor B-1), and mean CI width.
MetricsSummary summarize_estimates(const std::vector<double>& taus,
                                   const std::vector<double>& widths, double tau);

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<MetricsSummary> summaries;
  std::vector<ReplicateRecord> records;
};

ScenarioResult run_scenario(const ScenarioSpec& spec, const synthdata::DgpParams& dgp,
                            const std::vector<psmodels::PsLearner>& learners,
                            const std::vector<estimators::Method>& methods, int replicates,
                            std::uint64_t master_seed, int workers);

struct GridResult {
  std::vector<ScenarioResult> scenarios;
};

using ProgressFn = std::function<void(const ScenarioSpec&, double seconds)>;

GridResult run_grid(const SimPlan& plan, const ProgressFn& progress = {});

csvio::Table summary_table(const GridResult& grid);
csvio::Table replicates_table(const GridResult& grid);

// Markdown rendering of a summary table (one section per (n, rho) cell,
// scenarios stacked like the CSV order).
std::string render_summary_md(const csvio::Table& summary);

// Quartile/outlier statistics per (scenario, n, rho, estimator) from a
// replicates table, for box plots.
csvio::Table boxplot_table(const csvio::Table& replicates);

void write_outputs(const GridResult& grid, const std::string& out_dir);

}  // namespace causaldr::simharness
