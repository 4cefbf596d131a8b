#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

namespace ajk {

/// Signed arbitrary-precision integer; the d-objective subtracts counts of
/// comparable magnitude, so every count is kept exact.
using BigCount = boost::multiprecision::cpp_int;

/// Exact C(m, k); 0 when k > m.
BigCount binomial(std::int64_t m, std::int64_t k);

/// Number of d-subsets of the n*T cells that contain at least one complete
/// time column, by inclusion-exclusion over the columns. Requires 1 <= d <= nT.
BigCount count_all_missing_patterns(int n, int T, int d);

/// The same count for every d = 1..nT at once (element d-1). Walks each
/// binomial row incrementally, so it stays cheap for panels with nT ~ 10^4.
std::vector<BigCount> all_missing_profile(int n, int T);

struct OptimalD {
    int d = 1;
    /// C(nT, d) - count_all_missing_patterns(n, T, d) for d = 1..nT.
    std::vector<BigCount> objective;
};

/// Maximiser of the diversity objective over d in [1, nT]; the smallest d
/// wins ties.
OptimalD optimal_d(int n, int T);

}  // namespace ajk
