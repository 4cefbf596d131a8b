#pragma once

#include "ajk/core_model.hpp"
#include "ajk/ecm.hpp"

#include <cstdint>

namespace ajk {

struct SimSpec {
    int n = 2;
    int p = 1;
    int T = 100;
    double spectral_radius = 0.9;
    /// Probability that a coefficient is zero. 1 gives white noise.
    double sparsity = 0.5;
    double sigma_scale = 1.0;
    int burn_in = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SimulatedVar {
    TimeSeriesDataset data;
    VarParameters truth;
};

/**
 * Zero-mean Gaussian VAR(p). Coefficients are drawn N(0, 1) and zeroed with
 * probability `sparsity`, then lag l is scaled by s^l so that the companion
 * matrix has exactly the requested spectral radius. Sigma is
 * sigma_scale (L L' / n + I / 2) with a standard normal L. The initial state
 * is drawn from the stationary distribution and burn_in periods are dropped.
 */
SimulatedVar simulate_var(const SimSpec& spec);

/**
 * Masks round(fraction * n * T) currently observed cells, in runs of up to
 * block_len consecutive periods of one series, leaving periods
 * 1..keep_leading untouched. Throws DomainError when fraction is outside
 * [0, 1) or there are not enough eligible cells.
 */
TimeSeriesDataset inject_missing(const TimeSeriesDataset& data, double fraction, std::uint64_t seed,
                                 int block_len = 1, int keep_leading = 0);

}  // namespace ajk
