#pragma once

#include "ajk/core_model.hpp"
#include "ajk/ecm.hpp"
#include "ajk/error_estimators.hpp"
#include "ajk/search.hpp"
#include "ajk/simulation.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ajk {

enum class EstimatorKindName { InSample, PseudoOos, BlockJackknife, ArtificialJackknife };

struct EstimatorConfig {
    EstimatorKindName kind = EstimatorKindName::ArtificialJackknife;
    int q = 1;
    /// Empty means "auto" (optimal_d of the tuning panel).
    std::optional<int> d;
    int m = 5000;
    bool exclude_full_columns = true;
};

/// Explicit weights, or equal weights over a subset of series names. Both
/// empty means equal weights over every series.
struct WeightsConfig {
    std::vector<double> values;
    std::vector<std::string> equal_over;
};

struct EvaluationConfig {
    /// Fixed hyperparameters, or the path of a selection.json to read them from.
    std::optional<Hyperparameters> hyper;
    std::string selection;
    /// First target period (1-based). Defaults to tune_periods + 1.
    std::optional<int> start;
    int stride = 1;
};

struct SimulateConfig {
    SimSpec spec;
    double missing_fraction = 0.0;
    int missing_block_len = 1;
    int keep_leading = 0;
};

/// Everything a run needs. See README for the file grammar.
struct RunConfig {
    std::string data_path;
    /// Tuning uses periods 1..tune_periods (all periods when empty).
    std::optional<int> tune_periods;
    EstimatorConfig estimator;
    SearchRegion region;
    int candidates = 1000;
    /// A period (integer) or a fraction of the tuning sample (real in (0, 1)).
    std::variant<int, double> t0 = 0.5;
    int stride = 1;
    WeightsConfig weights;
    bool rescale_weights = false;
    std::uint64_t seed = 0;
    EcmConfig ecm;
    std::optional<int> workers;
    std::string output_dir = ".";
    EvaluationConfig evaluation;
    SimulateConfig simulate;
};

/// Throws ConfigError on unknown keys, wrong types or invalid values.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Canonical form of the configuration embedded in reports. Run-local
/// settings (worker count, output directory) are left out so that reports do
/// not depend on them.
nlohmann::json run_config_to_json(const RunConfig& config);

nlohmann::json load_config_file(const std::filesystem::path& path);

/// Applies "a.b.c=value" to `j`. The value is parsed as JSON when possible
/// and taken as a string otherwise.
void apply_override(nlohmann::json& j, std::string_view assignment);

WeightVector resolve_weights(const WeightsConfig& weights, const TimeSeriesDataset& data);
int resolve_t0(const std::variant<int, double>& t0, int T);

/// Estimator of the configuration for a tuning panel with T periods.
ErrorSpec make_error_spec(const RunConfig& config, const TimeSeriesDataset& data);

std::string estimator_name(EstimatorKindName kind);

}  // namespace ajk
