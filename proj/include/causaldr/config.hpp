#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "causaldr/realdata.hpp"
#include "causaldr/simharness.hpp"

// Run configuration: JSON file plus flag overrides, validated strictly
// (unknown keys are usage errors) and re-emittable as a resolved snapshot.
namespace causaldr::config {

enum class Mode { Simulate, Analyze };

struct CliOverrides {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  bool force = false;
  std::optional<int> replicates;            // --B
  std::optional<std::vector<int>> scenarios;  // --scenarios
  std::optional<int> bootstrap_b;           // --bootstrap-B
};

struct RunConfig {
  Mode mode = Mode::Simulate;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  bool force = false;
  simharness::SimPlan plan;
  std::string analysis_csv;
  realdata::AnalysisSpec analysis;

  bool operator==(const RunConfig&) const = default;
};

// Defaults (grid {1..4} x {200,1000} x {0.2,0.7}, B=1000, four learners,
// three estimators) filled first, then file values, then flag overrides.
// A seed must come from the file or the flags; the output directory falls
// back to $CAUSAL_DR_OUT and then to "causal_dr_out".
RunConfig parse_config(Mode mode, const CliOverrides& overrides);

// Parses config text only (no overrides); exposed for round-trip checks.
RunConfig parse_config_text(Mode mode, const std::string& json_text,
                            const std::string& source_name);

// Resolved-snapshot JSON; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

}  // namespace causaldr::config
