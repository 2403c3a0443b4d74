#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "breakcoag/daughter.hpp"
#include "breakcoag/grid.hpp"
#include "breakcoag/hypotheses.hpp"
#include "breakcoag/kernels.hpp"
#include "breakcoag/solver.hpp"

namespace breakcoag {

struct ContractionOptions {
  // "scale": g = factor * f.  "bump": g = f + amplitude * exp(-(x - center)^2 / (2 width^2)).
  std::string perturbation = "scale";
  double factor = 1.01;
  double center = 10.0;
  double width = 1.0;
  double amplitude = 1e-3;
  double slack = 0.05;
};

struct DlvpOptions {
  // CSV profile; the sampled initial condition when unset.
  std::optional<std::filesystem::path> profile;
  double theta = 0.5;
  int max_m = 25;
  int samples = 1000;
};

struct ExperimentOptions {
  double mass_tolerance = 1e-8;
  double gel_threshold = 1e-2;
  ContractionOptions contraction;
  std::vector<double> sweep_E{0.0, 0.25, 0.5, 0.75, 1.0};
  DlvpOptions dlvp;
};

inline const std::vector<std::string> known_experiments{"run", "verify", "contraction", "gel", "sweep", "dlvp"};

struct ScenarioConfig {
  // Input document after overrides; the hash is taken over its canonical dump.
  nlohmann::json document;
  std::string hash;

  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t cells = 0;
  KernelSpec kernel;
  DaughterSpec daughter;
  ProbSpec prob;
  InitialCondition initial;
  StepControl control;
  TableOptions tables;
  CheckOptions checks;
  std::vector<std::string> experiments;
  ExperimentOptions options;

  GridPtr grid() const;
  bool wants(const std::string& experiment) const;
};

// FNV-1a (64 bit) of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& document);

// `assignment` is "dotted.key=value"; value is parsed as JSON, falling back to
// a plain string. Missing intermediate objects are created. Throws
// ConfigError for a malformed assignment.
void apply_override(nlohmann::json& document, const std::string& assignment);

// Validates and fills defaults; unknown keys are rejected. Relative paths are
// resolved against `base_dir`. Throws ConfigError naming the offending key,
// or DataError for unreadable tables.
ScenarioConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir = ".");
ScenarioConfig parse_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_integration = 3, exit_assertion = 4 };

struct RunOutcome {
  int exit_code = exit_ok;
  std::string message;
  // Per-experiment assertion results.
  std::vector<std::pair<std::string, bool>> assertions;
  // One-line summaries of the experiments, for the console.
  std::vector<std::string> notes;
};

// Writes hypotheses.json, trajectory/state_NNNN.csv, moments.csv,
// experiments.json and, on integration failure, failure.json into
// `out_dir`. With `verify_only` only the hypothesis report is produced.
RunOutcome run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir, bool verify_only = false);

}  // namespace breakcoag
