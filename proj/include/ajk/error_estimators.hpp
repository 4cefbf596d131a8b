#pragma once

#include "ajk/core_model.hpp"
#include "ajk/ecm.hpp"
#include "ajk/subsampling.hpp"

#include <variant>
#include <vector>

namespace ajk {

struct InSampleEstimator {};
struct PseudoOosEstimator {};
struct JackknifeEstimator {
    FamilySpec family;
};

using EstimatorKind = std::variant<InSampleEstimator, PseudoOosEstimator, JackknifeEstimator>;

/// Which accuracy estimator to compute and how.
struct ErrorSpec {
    EstimatorKind kind;
    /// Last presample period (1-based). Forecasts target t0+1..T.
    int t0 = 1;
    /// Parameters are re-estimated every `stride` forecast origins and held
    /// (warm-starting the next estimation) in between.
    int stride = 1;
    WeightVector weights;
    LossOptions loss_options{};

    /// Throws DomainError unless p <= t0 <= T-1 (out-of-sample kinds),
    /// stride >= 1 and the weights have n entries.
    void validate(int n, int T, int p) const;
};

/// One-step prediction of period T+1 from a prefix of T periods, in the
/// original units of the data.
Vector one_step_forecast(const EcmFit& fit, const TimeSeriesDataset& prefix, const EcmConfig& config);

struct RollingForecasts {
    std::vector<int> targets;  // 1-based target periods
    Matrix forecasts;          // n x targets.size()
    int estimations = 0;
    int nonconverged = 0;
};

/// Expanding-window one-step forecasts for every origin in
/// [first_origin, last_origin] (1-based), estimating on periods 1..origin.
/// Estimation failures are rethrown as NumericalError carrying the origin.
RollingForecasts rolling_forecasts(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                                   int first_origin, int last_origin, int stride, const EcmConfig& config);

/// Mean loss of the full-sample fit's one-step predictions over t = p+1..T.
double insample_error(const TimeSeriesDataset& data, const Hyperparameters& hyper, const WeightVector& weights,
                      const EcmConfig& config, LossOptions options = {});

/// Mean loss of expanding-window one-step forecasts for t0+1..T, divisor T-t0.
double pseudo_oos_error(const TimeSeriesDataset& data, const Hyperparameters& hyper, const ErrorSpec& spec,
                        const EcmConfig& config);

struct JackknifeResult {
    double value = 0.0;
    /// Pseudo out-of-sample error of each pattern; NaN where it failed.
    std::vector<double> pattern_errors;
    int successes = 0;
    int failures = 0;
};

/**
 * Average over the family of the pseudo out-of-sample error computed on the
 * data with each pattern deleted. Deleted targets do not score. Patterns
 * whose estimation fails are dropped from the average and counted. Throws
 * NumericalError if every pattern fails.
 */
JackknifeResult jackknife_error(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                                const SubsampleFamily& family, const ErrorSpec& spec, const EcmConfig& config,
                                int workers = 1);

struct ErrorEvaluation {
    double value = 0.0;
    int failed_patterns = 0;
};

/// Dispatches on spec.kind. For jackknife kinds `family` is used when given,
/// otherwise it is generated from the spec.
ErrorEvaluation evaluate_error(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                               const ErrorSpec& spec, const EcmConfig& config,
                               const SubsampleFamily* family = nullptr, int workers = 1);

}  // namespace ajk
