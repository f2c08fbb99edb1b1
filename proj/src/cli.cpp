#include "causaldr/cli.hpp"

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "causaldr/csvio.hpp"
#include "causaldr/errors.hpp"
#include "causaldr/realdata.hpp"
#include "causaldr/simharness.hpp"

namespace causaldr::cli {

namespace fs = std::filesystem;

namespace {

void guard_snapshot(const config::RunConfig& cfg, const fs::path& snapshot_path) {
  if (!fs::exists(snapshot_path)) return;
  std::uint64_t existing_seed = 0;
  try {
    const auto root = nlohmann::json::parse(csvio::read_text(snapshot_path.string()));
    existing_seed = root.at("seed").get<std::uint64_t>();
  } catch (const std::exception&) {
    throw UsageError(snapshot_path.string() +
                     " exists but is unreadable; pass --force to overwrite");
  }
  if (existing_seed != cfg.seed && !cfg.force)
    throw UsageError(cfg.out_dir + " holds results for seed " +
                     std::to_string(existing_seed) + "; pass --force to overwrite");
}

void write_snapshot(const config::RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  csvio::write_text((fs::path(cfg.out_dir) / "resolved-config.snapshot").string(),
                    config::emit_config(cfg));
}

}  // namespace

int cmd_simulate(const config::RunConfig& cfg) {
  guard_snapshot(cfg, fs::path(cfg.out_dir) / "resolved-config.snapshot");
  write_snapshot(cfg);

  const simharness::GridResult grid =
      simharness::run_grid(cfg.plan, [](const simharness::ScenarioSpec& spec, double seconds) {
        std::printf("scenario %d (n=%zu, rho=%g): done in %.1fs\n", spec.scenario_id, spec.n,
                    spec.rho, seconds);
        std::fflush(stdout);
      });
  simharness::write_outputs(grid, cfg.out_dir);
  std::printf("wrote %s/{summary.csv,replicates.csv,summary.md}\n", cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_analyze(const config::RunConfig& cfg) {
  guard_snapshot(cfg, fs::path(cfg.out_dir) / "resolved-config.snapshot");
  write_snapshot(cfg);

  const realdata::LoadedData loaded = realdata::load_csv(cfg.analysis_csv, cfg.analysis);
  std::printf("loaded %zu rows (dropped %zu with missing values): %zu treated, %zu control\n",
              loaded.report.rows_kept, loaded.report.dropped_missing, loaded.report.n_treated,
              loaded.report.n_control);

  const realdata::StandardizedData std_data =
      realdata::standardize(loaded.data, loaded.covariate_names, cfg.analysis);
  const realdata::AnalysisResult result = realdata::analyze(
      std_data.data, cfg.analysis, cfg.plan.learners, cfg.seed, cfg.workers);

  csvio::Table analysis;
  analysis.header = {"estimator", "ps_model", "tau_hat", "se", "ci_low", "ci_high", "p_value"};
  csvio::Table forest;
  forest.header = {"label", "estimator", "ps_model", "tau_hat", "ci_low", "ci_high"};
  for (const auto& row : result.rows) {
    const std::string ps = row.ps_model ? psmodels::kind_name(*row.ps_model) : "";
    const std::string est = estimators::method_name(row.method);
    analysis.rows.push_back({est, ps, csvio::format_double(row.tau_hat),
                             csvio::format_double(row.se), csvio::format_double(row.ci_low),
                             csvio::format_double(row.ci_high),
                             csvio::format_double(row.p_value)});
    forest.rows.push_back({ps.empty() ? est : est + " (" + ps + ")", est, ps,
                           csvio::format_double(row.tau_hat), csvio::format_double(row.ci_low),
                           csvio::format_double(row.ci_high)});
  }
  csvio::write_csv((fs::path(cfg.out_dir) / "analysis.csv").string(), analysis);
  csvio::write_csv((fs::path(cfg.out_dir) / "forest.csv").string(), forest);
  std::printf("wrote %s/{analysis.csv,forest.csv} (%d bootstrap redraws)\n",
              cfg.out_dir.c_str(), result.bootstrap_redraws);
  return kExitOk;
}

int cmd_report(const std::string& results_dir) {
  const fs::path dir(results_dir);
  const csvio::Table summary = csvio::read_csv((dir / "summary.csv").string());
  const csvio::Table replicates = csvio::read_csv((dir / "replicates.csv").string());
  if (replicates.rows.empty())
    throw IoError((dir / "replicates.csv").string() + " has no data rows");

  csvio::write_text((dir / "summary.md").string(), simharness::render_summary_md(summary));
  csvio::write_csv((dir / "boxplots.csv").string(), simharness::boxplot_table(replicates));
  std::printf("wrote %s/{summary.md,boxplots.csv}\n", results_dir.c_str());
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"average-treatment-effect estimation with propensity-score models"};
  app.require_subcommand(1);

  config::CliOverrides overrides;
  std::string config_path, out_dir, scenarios_csv;
  std::uint64_t seed = 0;
  int workers = 0, replicates = 0, bootstrap_b = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (required here or in the config)");
    sub->add_option("--workers", workers, "worker thread cap");
    sub->add_option("--out", out_dir, "output directory (default $CAUSAL_DR_OUT)");
    sub->add_flag("--force", overrides.force, "overwrite results from a different seed");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run the Monte Carlo scenario grid");
  add_common(simulate);
  simulate->add_option("--B", replicates, "replicates per scenario");
  simulate->add_option("--scenarios", scenarios_csv, "comma-separated scenario ids, e.g. 1,3");

  CLI::App* analyze = app.add_subcommand("analyze", "analyze a CSV dataset");
  add_common(analyze);
  analyze->add_option("--bootstrap-B", bootstrap_b, "bootstrap resamples");

  CLI::App* report = app.add_subcommand("report", "regenerate summary.md and boxplots.csv");
  report->add_option("--out", out_dir, "results directory (default $CAUSAL_DR_OUT)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) overrides.config_path = config_path;
    if (!out_dir.empty()) overrides.out_dir = out_dir;
    if (simulate->count("--seed") || analyze->count("--seed")) overrides.seed = seed;
    if (simulate->count("--workers") || analyze->count("--workers")) overrides.workers = workers;
    if (simulate->count("--B")) overrides.replicates = replicates;
    if (analyze->count("--bootstrap-B")) overrides.bootstrap_b = bootstrap_b;
    if (simulate->count("--scenarios")) {
      std::vector<int> ids;
      std::string token;
      for (char c : scenarios_csv + ",") {
        if (c == ',') {
          if (!token.empty()) ids.push_back(std::stoi(token));
          token.clear();
        } else {
          token += c;
        }
      }
      overrides.scenarios = ids;
    }

    if (simulate->parsed())
      return cmd_simulate(config::parse_config(config::Mode::Simulate, overrides));
    if (analyze->parsed())
      return cmd_analyze(config::parse_config(config::Mode::Analyze, overrides));
    // report
    std::string dir = out_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("CAUSAL_DR_OUT")) dir = env;
      if (dir.empty()) dir = "causal_dr_out";
    }
    return cmd_report(dir);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace causaldr::cli
