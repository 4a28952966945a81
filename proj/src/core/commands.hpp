#pragma once

#include <string>

#include "core/config.hpp"

namespace evrisk::commands {

// Every command echoes the resolved config into the output directory, writes
// its artifacts there without timestamps (reruns are byte-identical), and
// returns a human-readable summary for the terminal. Validation problems
// throw std::invalid_argument; missing inputs and I/O failures throw
// std::runtime_error.
struct CommandResult {
  std::string summary;
};

// Synthesizes the four input tables plus ground-truth files into data_dir.
CommandResult cmd_gen(const config::RunConfig& cfg);

// Trains one model per feature set on the train split, scores the test
// split, and writes models, score files, and a metrics report.
CommandResult cmd_train_score(const config::RunConfig& cfg);

// Runs the outreach-policy comparison against the reference policy's
// budgets: comparison report, aligned table, and one GeoJSON overlay per
// alternative policy.
CommandResult cmd_compare(const config::RunConfig& cfg);

// Tables risk-group composition by building-size bucket.
CommandResult cmd_risk_histogram(const config::RunConfig& cfg);

// Recomputes ranking metrics and ROC/PR curves from existing score files.
CommandResult cmd_metrics(const config::RunConfig& cfg);

}  // namespace evrisk::commands
