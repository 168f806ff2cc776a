#pragma once

#include <string>
#include <vector>

#include "lipwalk/config.hpp"

namespace lipwalk {

/// Minimum decay per unit K required of every consecutive pair in the
/// lateral-decay table (log max v against K).
inline constexpr double kLateralMinStepSlope = -0.1;

struct ExperimentOutcome {
  std::string experiment;
  std::string report;                  // JSON document, also written to disk
  std::vector<std::string> artifacts;  // paths written (report included)
  std::vector<std::string> checks_failed;
  bool ok() const { return checks_failed.empty(); }
};

/// validate, solve, mc, construct, martin, uniq, harnack, carleson, prop1,
/// bhp, lemma2, decay, growth, lateral.
const std::vector<std::string>& experiment_names();

/// Runs one experiment. Kernel and domain validation run first; a failure
/// there ends the run with the witness in checks_failed. Artifacts go to the
/// paths in cfg.outputs, falling back to per-experiment defaults ("-" means
/// stdout). Library errors propagate.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const std::string& name);

}  // namespace lipwalk
