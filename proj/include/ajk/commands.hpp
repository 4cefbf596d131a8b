#pragma once

#include "ajk/run_config.hpp"

#include <nlohmann/json.hpp>

#include <exception>

namespace ajk {

inline constexpr int kSchemaVersion = 1;

/// Random search on the tuning window. Writes selection.json and trace.csv
/// into config.output_dir and returns the selection report.
nlohmann::json cmd_tune(const RunConfig& config);

/// Rolling one-step evaluation of fixed hyperparameters on the periods after
/// the tuning window. Writes evaluation.csv (one row per target and series)
/// and evaluation.json, and returns the latter.
nlohmann::json cmd_evaluate(const RunConfig& config);

/// Writes simulated.csv and truth.json; returns the truth report.
nlohmann::json cmd_simulate(const RunConfig& config);

/// 2 configuration, 3 data, 4 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace ajk
