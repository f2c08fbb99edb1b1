#include "causaldr/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

#include "causaldr/errors.hpp"

namespace causaldr::config {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void usage(const std::string& msg) { throw UsageError(msg); }

void check_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key)) usage("unknown config key: " + scope + key);
  }
}

template <typename T>
T get_or(const ordered_json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const ordered_json::exception&) {
    usage("config key has wrong type: " + key);
  }
}

estimators::Method parse_method(const std::string& name) {
  if (name == "RSM") return estimators::Method::RSM;
  if (name == "IPW") return estimators::Method::IPW;
  if (name == "AIPW") return estimators::Method::AIPW;
  usage("unknown estimator: " + name);
}

psmodels::PsKind parse_kind(const std::string& name) {
  if (name == "LR") return psmodels::PsKind::LR;
  if (name == "RF") return psmodels::PsKind::RF;
  if (name == "LDA") return psmodels::PsKind::LDA;
  if (name == "SVM") return psmodels::PsKind::SVM;
  usage("unknown PS model: " + name);
}

psmodels::PsLearner parse_learner(const ordered_json& obj) {
  if (!obj.is_object()) usage("learners entries must be objects");
  check_keys(obj, {"kind", "trees", "mtry", "min_leaf", "max_depth", "oob_votes", "cost",
                   "gamma", "kernel", "tol", "max_sweeps"},
             "learners.");
  if (!obj.contains("kind")) usage("learner entry missing 'kind'");
  psmodels::PsLearner learner;
  learner.kind = parse_kind(obj.at("kind").get<std::string>());
  learner.forest.trees = get_or(obj, "trees", learner.forest.trees);
  learner.forest.mtry = get_or(obj, "mtry", learner.forest.mtry);
  learner.forest.min_leaf = get_or(obj, "min_leaf", learner.forest.min_leaf);
  learner.forest.max_depth = get_or(obj, "max_depth", learner.forest.max_depth);
  learner.forest.oob_votes = get_or(obj, "oob_votes", learner.forest.oob_votes);
  learner.svm.cost = get_or(obj, "cost", learner.svm.cost);
  learner.svm.gamma = get_or(obj, "gamma", learner.svm.gamma);
  learner.svm.tol = get_or(obj, "tol", learner.svm.tol);
  learner.svm.max_sweeps = get_or(obj, "max_sweeps", learner.svm.max_sweeps);
  if (obj.contains("kernel")) {
    const auto kernel = obj.at("kernel").get<std::string>();
    if (kernel == "rbf")
      learner.svm.kernel = psmodels::SvmParams::Kernel::Rbf;
    else if (kernel == "linear")
      learner.svm.kernel = psmodels::SvmParams::Kernel::Linear;
    else
      usage("unknown SVM kernel: " + kernel);
  }
  try {
    learner.validate();
  } catch (const ParameterError& e) {
    usage(std::string("invalid learner settings: ") + e.what());
  }
  return learner;
}

realdata::TestKind parse_test(const std::string& name) {
  if (name == "one-sided-greater") return realdata::TestKind::OneSidedGreater;
  if (name == "two-sided") return realdata::TestKind::TwoSided;
  usage("unknown test kind: " + name);
}

const char* test_name(realdata::TestKind t) {
  return t == realdata::TestKind::OneSidedGreater ? "one-sided-greater" : "two-sided";
}

void apply_file(RunConfig& cfg, const ordered_json& root, bool& seed_seen) {
  check_keys(root, {"mode", "seed", "workers", "out", "grid", "estimators", "learners",
                    "dgp", "analysis"},
             "");

  if (root.contains("mode")) {
    const auto mode = root.at("mode").get<std::string>();
    if (mode == "simulate")
      cfg.mode = Mode::Simulate;
    else if (mode == "analyze")
      cfg.mode = Mode::Analyze;
    else
      usage("unknown mode: " + mode);
  }
  if (root.contains("seed")) {
    cfg.seed = root.at("seed").get<std::uint64_t>();
    seed_seen = true;
  }
  cfg.workers = get_or(root, "workers", cfg.workers);
  cfg.out_dir = get_or<std::string>(root, "out", cfg.out_dir);

  if (root.contains("grid")) {
    const auto& grid = root.at("grid");
    check_keys(grid, {"scenarios", "n", "rho", "B"}, "grid.");
    cfg.plan.scenario_ids = get_or(grid, "scenarios", cfg.plan.scenario_ids);
    cfg.plan.sample_sizes = get_or(grid, "n", cfg.plan.sample_sizes);
    cfg.plan.rhos = get_or(grid, "rho", cfg.plan.rhos);
    cfg.plan.replicates = get_or(grid, "B", cfg.plan.replicates);
  }

  if (root.contains("estimators")) {
    cfg.plan.methods.clear();
    for (const auto& m : root.at("estimators"))
      cfg.plan.methods.push_back(parse_method(m.get<std::string>()));
    if (cfg.plan.methods.empty()) usage("estimators list must not be empty");
  }

  if (root.contains("learners")) {
    cfg.plan.learners.clear();
    for (const auto& l : root.at("learners")) cfg.plan.learners.push_back(parse_learner(l));
    if (cfg.plan.learners.empty()) usage("learners list must not be empty");
  }

  if (root.contains("dgp")) {
    const auto& dgp = root.at("dgp");
    check_keys(dgp,
               {"tau", "noise_sd", "treat_intercept", "outcome_intercept", "treat_coef",
                "outcome_coef"},
               "dgp.");
    cfg.plan.dgp.tau = get_or(dgp, "tau", cfg.plan.dgp.tau);
    cfg.plan.dgp.noise_sd = get_or(dgp, "noise_sd", cfg.plan.dgp.noise_sd);
    cfg.plan.dgp.treat_intercept = get_or(dgp, "treat_intercept", cfg.plan.dgp.treat_intercept);
    cfg.plan.dgp.outcome_intercept =
        get_or(dgp, "outcome_intercept", cfg.plan.dgp.outcome_intercept);
    cfg.plan.dgp.treat_coef = get_or(dgp, "treat_coef", cfg.plan.dgp.treat_coef);
    cfg.plan.dgp.outcome_coef = get_or(dgp, "outcome_coef", cfg.plan.dgp.outcome_coef);
    cfg.plan.dgp.p = static_cast<int>(cfg.plan.dgp.treat_coef.size());
    try {
      cfg.plan.dgp.validate();
    } catch (const ParameterError& e) {
      usage(std::string("invalid dgp settings: ") + e.what());
    }
  }

  if (root.contains("analysis")) {
    const auto& an = root.at("analysis");
    check_keys(an,
               {"csv", "outcome", "treatment", "covariates", "quadratic", "standardize",
                "test", "bootstrap_B", "ps_lower", "ps_upper", "percentile_ci"},
               "analysis.");
    cfg.analysis_csv = get_or<std::string>(an, "csv", cfg.analysis_csv);
    cfg.analysis.outcome_column = get_or<std::string>(an, "outcome", cfg.analysis.outcome_column);
    cfg.analysis.treatment_column =
        get_or<std::string>(an, "treatment", cfg.analysis.treatment_column);
    cfg.analysis.covariate_columns =
        get_or(an, "covariates", cfg.analysis.covariate_columns);
    cfg.analysis.quadratic_columns = get_or(an, "quadratic", cfg.analysis.quadratic_columns);
    cfg.analysis.standardize = get_or(an, "standardize", cfg.analysis.standardize);
    if (an.contains("test")) cfg.analysis.test = parse_test(an.at("test").get<std::string>());
    cfg.analysis.bootstrap_b = get_or(an, "bootstrap_B", cfg.analysis.bootstrap_b);
    cfg.analysis.ps_lower = get_or(an, "ps_lower", cfg.analysis.ps_lower);
    cfg.analysis.ps_upper = get_or(an, "ps_upper", cfg.analysis.ps_upper);
    cfg.analysis.percentile_ci = get_or(an, "percentile_ci", cfg.analysis.percentile_ci);
  }
}

void validate_resolved(const RunConfig& cfg) {
  if (cfg.mode == Mode::Simulate) {
    if (cfg.plan.scenario_ids.empty() || cfg.plan.sample_sizes.empty() ||
        cfg.plan.rhos.empty())
      usage("simulate mode needs a non-empty grid");
    for (int id : cfg.plan.scenario_ids)
      if (id < 1 || id > 4) usage("scenario ids must be in 1..4: " + std::to_string(id));
    if (cfg.plan.replicates < 2) usage("B must be at least 2");
  } else {
    if (cfg.analysis_csv.empty()) usage("analyze mode needs analysis.csv in the config");
    try {
      cfg.analysis.validate();
    } catch (const ParameterError& e) {
      usage(std::string("invalid analysis settings: ") + e.what());
    }
  }
  if (cfg.workers < 1) usage("workers must be at least 1");
}

}  // namespace

RunConfig parse_config_text(Mode mode, const std::string& json_text,
                            const std::string& source_name) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.plan.learners = simharness::default_learners();
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());

  bool seed_seen = false;
  if (!json_text.empty()) {
    ordered_json root;
    try {
      root = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
      usage(source_name + ": not valid JSON: " + e.what());
    }
    if (!root.is_object()) usage(source_name + ": config root must be an object");
    apply_file(cfg, root, seed_seen);
  }
  cfg.mode = mode;  // the subcommand wins over a mode key in the file
  if (!seed_seen) usage("missing seed (config key 'seed' or --seed)");
  cfg.plan.master_seed = cfg.seed;
  cfg.plan.workers = cfg.workers;
  validate_resolved(cfg);
  return cfg;
}

RunConfig parse_config(Mode mode, const CliOverrides& overrides) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.plan.learners = simharness::default_learners();
  cfg.workers = std::max(1u, std::thread::hardware_concurrency());

  bool seed_seen = false;
  if (overrides.config_path) {
    std::ifstream in(*overrides.config_path);
    if (!in) usage("cannot open config file: " + *overrides.config_path);
    ordered_json root;
    try {
      root = ordered_json::parse(in);
    } catch (const ordered_json::exception& e) {
      usage(*overrides.config_path + ": not valid JSON: " + e.what());
    }
    if (!root.is_object()) usage(*overrides.config_path + ": config root must be an object");
    apply_file(cfg, root, seed_seen);
    cfg.mode = mode;
  }

  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    seed_seen = true;
  }
  if (overrides.workers) cfg.workers = *overrides.workers;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.replicates) cfg.plan.replicates = *overrides.replicates;
  if (overrides.scenarios) cfg.plan.scenario_ids = *overrides.scenarios;
  if (overrides.bootstrap_b) cfg.analysis.bootstrap_b = *overrides.bootstrap_b;
  cfg.force = overrides.force;

  if (cfg.out_dir.empty()) {
    if (const char* env = std::getenv("CAUSAL_DR_OUT")) cfg.out_dir = env;
    if (cfg.out_dir.empty()) cfg.out_dir = "causal_dr_out";
  }

  if (!seed_seen) usage("missing seed (config key 'seed' or --seed)");
  cfg.plan.master_seed = cfg.seed;
  cfg.plan.workers = cfg.workers;
  validate_resolved(cfg);
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  ordered_json root;
  root["mode"] = cfg.mode == Mode::Simulate ? "simulate" : "analyze";
  root["seed"] = cfg.seed;
  root["workers"] = cfg.workers;
  root["out"] = cfg.out_dir;
  root["grid"] = {{"scenarios", cfg.plan.scenario_ids},
                  {"n", cfg.plan.sample_sizes},
                  {"rho", cfg.plan.rhos},
                  {"B", cfg.plan.replicates}};
  std::vector<std::string> methods;
  for (auto m : cfg.plan.methods) methods.emplace_back(estimators::method_name(m));
  root["estimators"] = methods;

  root["learners"] = ordered_json::array();
  for (const auto& l : cfg.plan.learners) {
    ordered_json entry;
    entry["kind"] = psmodels::kind_name(l.kind);
    if (l.kind == psmodels::PsKind::RF) {
      entry["trees"] = l.forest.trees;
      entry["mtry"] = l.forest.mtry;
      entry["min_leaf"] = l.forest.min_leaf;
      entry["max_depth"] = l.forest.max_depth;
      entry["oob_votes"] = l.forest.oob_votes;
    } else if (l.kind == psmodels::PsKind::SVM) {
      entry["cost"] = l.svm.cost;
      entry["gamma"] = l.svm.gamma;
      entry["kernel"] = l.svm.kernel == psmodels::SvmParams::Kernel::Rbf ? "rbf" : "linear";
      entry["tol"] = l.svm.tol;
      entry["max_sweeps"] = l.svm.max_sweeps;
    }
    root["learners"].push_back(entry);
  }

  root["dgp"] = {{"tau", cfg.plan.dgp.tau},
                 {"noise_sd", cfg.plan.dgp.noise_sd},
                 {"treat_intercept", cfg.plan.dgp.treat_intercept},
                 {"outcome_intercept", cfg.plan.dgp.outcome_intercept},
                 {"treat_coef", cfg.plan.dgp.treat_coef},
                 {"outcome_coef", cfg.plan.dgp.outcome_coef}};

  if (cfg.mode == Mode::Analyze || !cfg.analysis_csv.empty()) {
    root["analysis"] = {{"csv", cfg.analysis_csv},
                        {"outcome", cfg.analysis.outcome_column},
                        {"treatment", cfg.analysis.treatment_column},
                        {"covariates", cfg.analysis.covariate_columns},
                        {"quadratic", cfg.analysis.quadratic_columns},
                        {"standardize", cfg.analysis.standardize},
                        {"test", test_name(cfg.analysis.test)},
                        {"bootstrap_B", cfg.analysis.bootstrap_b},
                        {"ps_lower", cfg.analysis.ps_lower},
                        {"ps_upper", cfg.analysis.ps_upper},
                        {"percentile_ci", cfg.analysis.percentile_ci}};
  }
  return root.dump(2) + "\n";
}

}  // namespace causaldr::config
