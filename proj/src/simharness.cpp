#include "causaldr/simharness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "causaldr/errors.hpp"
#include "causaldr/parallel.hpp"
#include "causaldr/rng.hpp"
#include "causaldr/stats.hpp"

namespace causaldr::simharness {

namespace {

constexpr std::uint64_t kFitTag = 0x666974;  // model-fitting stream domain

std::uint64_t learner_fit_seed(std::uint64_t master_seed, std::size_t n, double rho,
                               int replicate, psmodels::PsRegime regime,
                               psmodels::PsKind kind) {
  return rng::derive_key(master_seed,
                         {kFitTag, static_cast<std::uint64_t>(n), rng::double_bits(rho),
                          static_cast<std::uint64_t>(replicate),
                          static_cast<std::uint64_t>(regime), static_cast<std::uint64_t>(kind)});
}

std::string scenario_label(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "scenario " << spec.scenario_id << " (n=" << spec.n << ", rho=" << spec.rho << ")";
  return os.str();
}

}  // namespace

ScenarioSpec ScenarioSpec::from_id(int id, std::size_t n, double rho) {
  ScenarioSpec spec;
  spec.scenario_id = id;
  spec.n = n;
  spec.rho = rho;
  switch (id) {
    case 1:
      spec.ps_regime = psmodels::PsRegime::Correct;
      spec.outcome_regime = outcome::OutcomeRegime::Correct;
      break;
    case 2:
      spec.ps_regime = psmodels::PsRegime::Misspecified;
      spec.outcome_regime = outcome::OutcomeRegime::Correct;
      break;
    case 3:
      spec.ps_regime = psmodels::PsRegime::Correct;
      spec.outcome_regime = outcome::OutcomeRegime::Misspecified;
      break;
    case 4:
      spec.ps_regime = psmodels::PsRegime::Misspecified;
      spec.outcome_regime = outcome::OutcomeRegime::Misspecified;
      break;
    default:
      throw ParameterError("scenario id must be 1..4");
  }
  return spec;
}

std::vector<psmodels::PsLearner> default_learners() {
  using psmodels::PsKind;
  std::vector<psmodels::PsLearner> out(4);
  out[0].kind = PsKind::LR;
  out[1].kind = PsKind::RF;
  out[2].kind = PsKind::LDA;
  out[3].kind = PsKind::SVM;
  return out;
}

std::uint64_t replicate_data_seed(std::uint64_t master_seed, std::size_t n, double rho,
                                  int replicate) {
  return rng::derive_key(master_seed,
                         {rng::tag::kData, static_cast<std::uint64_t>(n),
                          rng::double_bits(rho), static_cast<std::uint64_t>(replicate)});
}

ReplicateRecord run_replicate(const ScenarioSpec& spec, const synthdata::DgpParams& dgp,
                              const std::vector<psmodels::PsLearner>& learners,
                              const std::vector<estimators::Method>& methods,
                              int replicate_index, std::uint64_t master_seed) {
  synthdata::DgpParams params = dgp;
  params.rho = spec.rho;
  params.validate();

  ReplicateRecord rec;
  rec.replicate_index = replicate_index;
  rec.data_seed = replicate_data_seed(master_seed, spec.n, spec.rho, replicate_index);

  synthdata::DatasetDraw draw = synthdata::make_dataset(spec.n, params, rec.data_seed);
  rec.redraws = draw.redraws;
  if (rec.redraws > 0) rec.flags.push_back("redraws=" + std::to_string(rec.redraws));
  const Dataset& ds = draw.data;

  const bool want_ipw = std::count(methods.begin(), methods.end(), estimators::Method::IPW) > 0;
  const bool want_aipw = std::count(methods.begin(), methods.end(), estimators::Method::AIPW) > 0;
  const bool want_rsm = std::count(methods.begin(), methods.end(), estimators::Method::RSM) > 0;

  std::vector<psmodels::PropensityFit> fits;
  if (want_ipw || want_aipw) {
    const linalg::Matrix features = psmodels::build_ps_features(ds.x, {spec.ps_regime});
    fits.reserve(learners.size());
    for (const auto& learner : learners) {
      const std::uint64_t seed = learner_fit_seed(master_seed, spec.n, spec.rho,
                                                  replicate_index, spec.ps_regime, learner.kind);
      fits.push_back(psmodels::estimate_propensity(learner, features, ds.a, seed));
      if (fits.back().flagged)
        rec.flags.push_back(std::string(psmodels::kind_name(learner.kind)) + "_flagged");
    }
  }

  outcome::PotentialPredictions preds;
  if (want_rsm || want_aipw) {
    const outcome::OutcomeFit ofit = outcome::fit_outcome(ds.x, ds.a, ds.y, {spec.outcome_regime});
    preds = outcome::predict_potentials(ofit, ds.x);
  }

  if (want_ipw)
    for (const auto& fit : fits) rec.estimates.push_back(estimators::estimate_ipw(ds.y, ds.a, fit));
  if (want_aipw)
    for (const auto& fit : fits)
      rec.estimates.push_back(estimators::estimate_aipw(ds.y, ds.a, fit, preds));
  if (want_rsm) rec.estimates.push_back(estimators::estimate_rsm(preds));
  return rec;
}

MetricsSummary summarize_estimates(const std::vector<double>& taus,
                                   const std::vector<double>& widths, double tau) {
  if (taus.size() < 2 || taus.size() != widths.size())
    throw ParameterError("summarize_estimates: needs at least 2 aligned replicates");
  MetricsSummary m;
  m.mean = stats::mean(taus);
  m.bias = m.mean - tau;
  double abias = 0.0, sq = 0.0;
  for (double t : taus) {
    abias += std::abs(t - tau);
    sq += (t - tau) * (t - tau);
  }
  const auto b = static_cast<double>(taus.size());
  m.abias = abias / b;
  m.rmse = std::sqrt(sq / b);
  m.se = stats::sample_sd(taus);
  m.width = stats::mean(widths);
  m.n_replicates = static_cast<int>(taus.size());
  return m;
}

ScenarioResult run_scenario(const ScenarioSpec& spec, const synthdata::DgpParams& dgp,
                            const std::vector<psmodels::PsLearner>& learners,
                            const std::vector<estimators::Method>& methods, int replicates,
                            std::uint64_t master_seed, int workers) {
  if (replicates < 2) throw ParameterError("run_scenario: needs at least 2 replicates");

  ScenarioResult result;
  result.spec = spec;
  result.records.resize(replicates);
  try {
    parallel::for_each_index(replicates, workers, [&](std::size_t r) {
      result.records[r] =
          run_replicate(spec, dgp, learners, methods, static_cast<int>(r), master_seed);
    });
  } catch (const std::exception& e) {
    throw Error(scenario_label(spec) + ": " + e.what());
  }

  // Aggregate by estimate slot; all records share the same layout, and the
  // records vector is ordered by replicate index, so the reduction does not
  // depend on worker scheduling.
  const std::size_t slots = result.records.front().estimates.size();
  for (std::size_t s = 0; s < slots; ++s) {
    std::vector<double> taus(replicates), widths(replicates);
    for (int r = 0; r < replicates; ++r) {
      if (result.records[r].estimates.size() != slots)
        throw Error(scenario_label(spec) + ": inconsistent estimate layout");
      const auto& est = result.records[r].estimates[s];
      taus[r] = est.tau_hat;
      widths[r] = est.ci_high - est.ci_low;
    }
    MetricsSummary m = summarize_estimates(taus, widths, dgp.tau);
    m.scenario_id = spec.scenario_id;
    m.n = spec.n;
    m.rho = spec.rho;
    m.method = result.records.front().estimates[s].method;
    m.ps_model = result.records.front().estimates[s].ps_model;
    result.summaries.push_back(m);
  }
  return result;
}

GridResult run_grid(const SimPlan& plan, const ProgressFn& progress) {
  if (plan.scenario_ids.empty() || plan.sample_sizes.empty() || plan.rhos.empty())
    throw ParameterError("run_grid: empty grid");
  const std::vector<psmodels::PsLearner> learners =
      plan.learners.empty() ? default_learners() : plan.learners;

  GridResult grid;
  for (std::size_t ni = 0; ni < plan.sample_sizes.size(); ++ni) {
    for (double rho : plan.rhos) {
      for (int id : plan.scenario_ids) {
        const ScenarioSpec spec = ScenarioSpec::from_id(id, plan.sample_sizes[ni], rho);
        const auto start = std::chrono::steady_clock::now();
        grid.scenarios.push_back(run_scenario(spec, plan.dgp, learners, plan.methods,
                                              plan.replicates, plan.master_seed, plan.workers));
        if (progress) {
          const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
          progress(spec, elapsed.count());
        }
      }
    }
  }
  return grid;
}

namespace {

std::string ps_model_field(const std::optional<psmodels::PsKind>& kind) {
  return kind ? psmodels::kind_name(*kind) : "";
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

csvio::Table summary_table(const GridResult& grid) {
  csvio::Table t;
  t.header = {"scenario_id", "n",  "rho", "ps_model", "estimator",    "mean",
              "bias",        "abias", "rmse", "se",   "width", "n_replicates"};
  for (const auto& sc : grid.scenarios) {
    for (const auto& m : sc.summaries) {
      t.rows.push_back({std::to_string(m.scenario_id), std::to_string(m.n),
                        csvio::format_double(m.rho), ps_model_field(m.ps_model),
                        estimators::method_name(m.method), csvio::format_double(m.mean),
                        csvio::format_double(m.bias), csvio::format_double(m.abias),
                        csvio::format_double(m.rmse), csvio::format_double(m.se),
                        csvio::format_double(m.width), std::to_string(m.n_replicates)});
    }
  }
  return t;
}

csvio::Table replicates_table(const GridResult& grid) {
  csvio::Table t;
  t.header = {"scenario_id", "n",       "rho",  "replicate", "ps_model", "estimator",
              "tau_hat",     "se", "ci_low", "ci_high",   "flags"};
  for (const auto& sc : grid.scenarios) {
    for (const auto& rec : sc.records) {
      const std::string flags = join_flags(rec.flags);
      for (const auto& est : rec.estimates) {
        t.rows.push_back({std::to_string(sc.spec.scenario_id), std::to_string(sc.spec.n),
                          csvio::format_double(sc.spec.rho), std::to_string(rec.replicate_index),
                          ps_model_field(est.ps_model), estimators::method_name(est.method),
                          csvio::format_double(est.tau_hat), csvio::format_double(est.se),
                          csvio::format_double(est.ci_low), csvio::format_double(est.ci_high),
                          flags});
      }
    }
  }
  return t;
}

std::string render_summary_md(const csvio::Table& summary) {
  const std::size_t c_id = summary.column("scenario_id");
  const std::size_t c_n = summary.column("n");
  const std::size_t c_rho = summary.column("rho");
  const std::size_t c_ps = summary.column("ps_model");
  const std::size_t c_est = summary.column("estimator");
  const std::size_t c_first = summary.column("mean");

  std::ostringstream md;
  md << "# Simulation summary\n";
  std::string current_cell;
  int current_scenario = -1;
  for (const auto& row : summary.rows) {
    const std::string cell = "n = " + row[c_n] + ", rho = " + row[c_rho];
    if (cell != current_cell) {
      md << "\n## " << cell << "\n\n";
      md << "| Scenario | PS model | Estimator | Mean | Bias | ABias | RMSE | SE | Width |\n";
      md << "|---|---|---|---|---|---|---|---|---|\n";
      current_cell = cell;
      current_scenario = -1;
    }
    const int scenario = std::stoi(row[c_id]);
    md << "| " << (scenario == current_scenario ? "" : row[c_id]) << " | "
       << (row[c_ps].empty() ? "--" : row[c_ps]) << " | " << row[c_est];
    for (std::size_t j = c_first; j < c_first + 6; ++j) md << " | " << fmt3(std::stod(row[j]));
    md << " |\n";
    current_scenario = scenario;
  }
  md << "\nBias is mean(tau_hat) - tau; SE is the sample standard deviation of the "
        "replicate estimates; Width is the mean 95% interval width.\n"
        "Box-plot statistics (boxplots.csv) use type-7 linear-interpolation quantiles.\n";
  return md.str();
}

csvio::Table boxplot_table(const csvio::Table& replicates) {
  if (replicates.rows.empty()) throw IoError("replicates table is empty");
  const std::size_t c_id = replicates.column("scenario_id");
  const std::size_t c_n = replicates.column("n");
  const std::size_t c_rho = replicates.column("rho");
  const std::size_t c_ps = replicates.column("ps_model");
  const std::size_t c_est = replicates.column("estimator");
  const std::size_t c_tau = replicates.column("tau_hat");

  // Keyed by (scenario, n, rho, ps_model, estimator) in first-seen order.
  std::vector<std::array<std::string, 5>> keys;
  std::map<std::array<std::string, 5>, std::vector<double>> groups;
  for (const auto& row : replicates.rows) {
    std::array<std::string, 5> key{row[c_id], row[c_n], row[c_rho], row[c_ps], row[c_est]};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back(std::stod(row[c_tau]));
  }

  csvio::Table t;
  t.header = {"scenario_id", "n",      "rho", "ps_model", "estimator", "min",
              "q1",          "median", "q3",  "max",      "outliers"};
  for (const auto& key : keys) {
    const stats::BoxStats s = stats::box_stats(groups[key]);
    std::string outliers;
    for (double v : s.outliers) {
      if (!outliers.empty()) outliers += ';';
      outliers += csvio::format_double(v);
    }
    t.rows.push_back({key[0], key[1], key[2], key[3], key[4], csvio::format_double(s.min),
                      csvio::format_double(s.q1), csvio::format_double(s.median),
                      csvio::format_double(s.q3), csvio::format_double(s.max), outliers});
  }
  return t;
}

void write_outputs(const GridResult& grid, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const csvio::Table summary = summary_table(grid);
  csvio::write_csv((fs::path(out_dir) / "summary.csv").string(), summary);
  csvio::write_csv((fs::path(out_dir) / "replicates.csv").string(), replicates_table(grid));
  csvio::write_text((fs::path(out_dir) / "summary.md").string(), render_summary_md(summary));
}

}  // namespace causaldr::simharness
