#pragma once

#include "ajk/core_model.hpp"
#include "ajk/ecm.hpp"
#include "ajk/error_estimators.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ajk {

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Search region H_p x H_lambda x H_alpha x H_beta.
struct SearchRegion {
    std::vector<int> p_set{1, 2, 3, 4, 5};
    Range lambda{1e-4, 5.0};
    Range alpha{0.0, 1.0};
    Range beta{1.0, 5.0};

    /// Throws DomainError on an empty p set, reversed ranges or bounds that
    /// violate the Hyperparameters invariants.
    void validate() const;
};

struct TraceEntry {
    Hyperparameters candidate;
    /// NaN when the evaluation failed.
    double error = 0.0;
    bool ok = true;
    int failed_patterns = 0;
    std::string message;
};

struct SearchResult {
    Hyperparameters best;
    double best_error = 0.0;
    /// In candidate order.
    std::vector<TraceEntry> trace;
    std::optional<std::uint64_t> seed;
    std::optional<int> resolved_d;
};

/// `count` distinct candidates: p uniform over p_set and the continuous
/// coordinates uniform over their ranges. Duplicates (exact equality) are
/// redrawn. Throws CapacityError when the region has fewer than `count`
/// distinct points.
std::vector<Hyperparameters> random_candidates(const SearchRegion& region, int count, std::uint64_t seed);

using CandidateEvaluator = std::function<ErrorEvaluation(const Hyperparameters&)>;

/// Evaluates every candidate and returns the first minimiser in list order.
/// Candidates whose evaluation throws ajk::Error are recorded as failed.
/// Throws NumericalError when every candidate fails.
SearchResult grid_search(const std::vector<Hyperparameters>& candidates, const CandidateEvaluator& evaluate,
                         int workers = 1);

/// grid_search with the estimator of `spec`. A jackknife family is drawn once
/// and shared by every candidate.
SearchResult grid_search(const TimeSeriesDataset& data, const std::vector<Hyperparameters>& candidates,
                         const ErrorSpec& spec, const EcmConfig& config, int workers = 1);

/**
 * random_candidates followed by grid_search. The candidate draws and the
 * artificial family draws use independent substreams of `seed`; an
 * artificial family's own seed field is ignored.
 */
SearchResult select_hyperparameters(const TimeSeriesDataset& data, const SearchRegion& region,
                                    const ErrorSpec& spec, int count, std::uint64_t seed,
                                    const EcmConfig& config, int workers = 1);

}  // namespace ajk
