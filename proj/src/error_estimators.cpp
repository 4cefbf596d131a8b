#include "ajk/error_estimators.hpp"

#include "ajk/errors.hpp"
#include "ajk/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace ajk {

void ErrorSpec::validate(int n, int T, int p) const {
    if (weights.size() != n)
        throw DimensionError("weights have " + std::to_string(weights.size()) + " entries for " +
                             std::to_string(n) + " series");
    if (stride < 1) throw DomainError("stride must be >= 1");
    if (std::holds_alternative<InSampleEstimator>(kind)) return;
    if (t0 < p || t0 > T - 1)
        throw DomainError("t0 = " + std::to_string(t0) + " must satisfy p <= t0 <= T-1 (p = " +
                          std::to_string(p) + ", T = " + std::to_string(T) + ")");
}

Vector one_step_forecast(const EcmFit& fit, const TimeSeriesDataset& prefix, const EcmConfig& config) {
    const int p = fit.params.hyper.p;
    if (prefix.num_periods() < p)
        throw DomainError("forecast origin t = " + std::to_string(prefix.num_periods()) + " precedes p = " +
                          std::to_string(p));
    const StateSpaceParams ssp = fit.state_space(config.epsilon);
    const FilterOutput filtered = kalman_filter(fit.standardization.apply(prefix), ssp);
    const Vector next = ssp.C * filtered.x_filt.back();
    return fit.standardization.restore(next.head(ssp.n));
}

RollingForecasts rolling_forecasts(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                                   int first_origin, int last_origin, int stride, const EcmConfig& config) {
    if (stride < 1) throw DomainError("stride must be >= 1");
    if (first_origin < hyper.p || last_origin > data.num_periods() - 1 || first_origin > last_origin)
        throw DomainError("forecast origins [" + std::to_string(first_origin) + ", " +
                          std::to_string(last_origin) + "] invalid for T = " + std::to_string(data.num_periods()));
    const int n = data.num_series();
    RollingForecasts out;
    out.forecasts.resize(n, last_origin - first_origin + 1);
    out.targets.reserve(static_cast<std::size_t>(last_origin - first_origin + 1));

    std::optional<EcmFit> fit;
    FilterOutput filtered;
    for (int origin = first_origin; origin <= last_origin;) {
        const int block_end = std::min(origin + stride - 1, last_origin);
        try {
            fit = ecm_estimate(data.prefix(origin), hyper, config, fit ? &fit->params : nullptr);
        } catch (const Error& e) {
            throw NumericalError("estimation on periods 1.." + std::to_string(origin) + " failed: " + e.what(),
                                 origin);
        }
        ++out.estimations;
        if (!fit->converged) ++out.nonconverged;
        // The filter is causal, so a single pass over 1..block_end yields the
        // same state at every origin in the block as filtering each prefix.
        const StateSpaceParams ssp = fit->state_space(config.epsilon);
        kalman_filter(fit->standardization.apply(data.prefix(block_end)), ssp, filtered);
        for (int o = origin; o <= block_end; ++o) {
            const Vector next = ssp.C * filtered.x_filt[static_cast<std::size_t>(o)];
            out.forecasts.col(o - first_origin) = fit->standardization.restore(next.head(n));
            out.targets.push_back(o + 1);
        }
        origin = block_end + 1;
    }
    return out;
}

namespace {

double mean_loss(const TimeSeriesDataset& data, const std::vector<int>& targets, const Matrix& forecasts,
                 const WeightVector& weights, LossOptions options, double divisor) {
    double total = 0.0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const int col = targets[j] - 1;
        const Vector actual = data.values().col(col);
        const MaskVector observed = data.observed().col(col);
        total += loss(actual, observed, forecasts.col(static_cast<Eigen::Index>(j)), weights, options);
    }
    return total / divisor;
}

}  // namespace

double insample_error(const TimeSeriesDataset& data, const Hyperparameters& hyper, const WeightVector& weights,
                      const EcmConfig& config, LossOptions options) {
    const int T = data.num_periods();
    const int p = hyper.p;
    if (T <= p) throw DomainError("in-sample error needs T > p");
    if (weights.size() != data.num_series()) throw DimensionError("weights do not match the number of series");
    const EcmFit fit = ecm_estimate(data, hyper, config);
    const StateSpaceParams ssp = fit.state_space(config.epsilon);
    const FilterOutput filtered = kalman_filter(fit.standardization.apply(data), ssp);

    std::vector<int> targets;
    Matrix forecasts(data.num_series(), T - p);
    for (int t = p + 1; t <= T; ++t) {
        forecasts.col(t - p - 1) =
            fit.standardization.restore(filtered.x_pred[static_cast<std::size_t>(t)].head(ssp.n));
        targets.push_back(t);
    }
    return mean_loss(data, targets, forecasts, weights, options, static_cast<double>(T - p));
}

double pseudo_oos_error(const TimeSeriesDataset& data, const Hyperparameters& hyper, const ErrorSpec& spec,
                        const EcmConfig& config) {
    const int T = data.num_periods();
    spec.validate(data.num_series(), T, hyper.p);
    const RollingForecasts rolling = rolling_forecasts(data, hyper, spec.t0, T - 1, spec.stride, config);
    return mean_loss(data, rolling.targets, rolling.forecasts, spec.weights, spec.loss_options,
                     static_cast<double>(T - spec.t0));
}

JackknifeResult jackknife_error(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                                const SubsampleFamily& family, const ErrorSpec& spec, const EcmConfig& config,
                                int workers) {
    if (family.empty()) throw DomainError("jackknife family is empty");
    spec.validate(data.num_series(), data.num_periods(), hyper.p);

    JackknifeResult out;
    out.pattern_errors.assign(family.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(family.size(), workers, [&](std::size_t j) {
        try {
            out.pattern_errors[j] = pseudo_oos_error(apply_pattern(data, family[j]), hyper, spec, config);
        } catch (const NumericalError&) {
            // Dropped from the average; counted below.
        }
    });

    double total = 0.0;
    for (double e : out.pattern_errors) {
        if (std::isnan(e)) {
            ++out.failures;
        } else {
            total += e;
            ++out.successes;
        }
    }
    if (out.successes == 0) throw NumericalError("estimation failed for every jackknife pattern");
    out.value = total / out.successes;
    return out;
}

ErrorEvaluation evaluate_error(const TimeSeriesDataset& data, const Hyperparameters& hyper,
                               const ErrorSpec& spec, const EcmConfig& config, const SubsampleFamily* family,
                               int workers) {
    return std::visit(
        [&](const auto& kind) -> ErrorEvaluation {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, InSampleEstimator>) {
                spec.validate(data.num_series(), data.num_periods(), hyper.p);
                return {insample_error(data, hyper, spec.weights, config, spec.loss_options), 0};
            } else if constexpr (std::is_same_v<K, PseudoOosEstimator>) {
                return {pseudo_oos_error(data, hyper, spec, config), 0};
            } else {
                if (family != nullptr) {
                    const JackknifeResult r = jackknife_error(data, hyper, *family, spec, config, workers);
                    return {r.value, r.failures};
                }
                const SubsampleFamily generated = make_family(kind.family, data.num_series(), data.num_periods());
                const JackknifeResult r = jackknife_error(data, hyper, generated, spec, config, workers);
                return {r.value, r.failures};
            }
        },
        spec.kind);
}

}  // namespace ajk
