#include "ajk/combinatorics.hpp"

#include "ajk/errors.hpp"

#include <algorithm>
#include <string>

namespace ajk {

BigCount binomial(std::int64_t m, std::int64_t k) {
    if (m < 0 || k < 0) throw DomainError("binomial: arguments must be nonnegative");
    if (k > m) return 0;
    k = std::min(k, m - k);
    BigCount c = 1;
    for (std::int64_t j = 1; j <= k; ++j) {
        c *= m - k + j;
        c /= j;
    }
    return c;
}

namespace {

void check_dims(int n, int T) {
    if (n < 1 || T < 1) throw DomainError("panel dimensions must be positive");
}

}  // namespace

BigCount count_all_missing_patterns(int n, int T, int d) {
    check_dims(n, T);
    const std::int64_t cells = static_cast<std::int64_t>(n) * T;
    if (d < 1 || d > cells)
        throw DomainError("d = " + std::to_string(d) + " outside [1, " + std::to_string(cells) + "]");
    if (d < n) return 0;
    BigCount count = binomial(cells - n, d - n) * T;
    const int upper = std::min(T, d / n);
    for (int i = 2; i <= upper; ++i) {
        const BigCount term = binomial(T, i) * binomial(cells - static_cast<std::int64_t>(i) * n,
                                                        d - static_cast<std::int64_t>(i) * n);
        if (i % 2 == 0)
            count -= term;
        else
            count += term;
    }
    return count;
}

std::vector<BigCount> all_missing_profile(int n, int T) {
    check_dims(n, T);
    const std::int64_t cells = static_cast<std::int64_t>(n) * T;
    std::vector<BigCount> count(static_cast<std::size_t>(cells), 0);
    // Term i contributes (-1)^(i-1) C(T,i) C(nT - i n, d - i n) to every d >= i n.
    BigCount columns = T;  // C(T, i), starting at i = 1
    for (int i = 1; i <= T; ++i) {
        const std::int64_t m = cells - static_cast<std::int64_t>(i) * n;
        BigCount row = 1;  // C(m, k)
        for (std::int64_t k = 0; k <= m; ++k) {
            const std::int64_t d = k + static_cast<std::int64_t>(i) * n;
            if (d >= 1) {
                if (i % 2 == 1)
                    count[static_cast<std::size_t>(d - 1)] += columns * row;
                else
                    count[static_cast<std::size_t>(d - 1)] -= columns * row;
            }
            if (k < m) {
                row *= m - k;
                row /= k + 1;
            }
        }
        columns *= T - i;
        columns /= i + 1;
    }
    return count;
}

OptimalD optimal_d(int n, int T) {
    const std::vector<BigCount> counts = all_missing_profile(n, T);
    const std::int64_t cells = static_cast<std::int64_t>(n) * T;
    OptimalD out;
    out.objective.reserve(counts.size());
    BigCount total = 1;  // C(nT, d)
    for (std::int64_t d = 1; d <= cells; ++d) {
        total *= cells - d + 1;
        total /= d;
        out.objective.push_back(total - counts[static_cast<std::size_t>(d - 1)]);
    }
    const auto best = std::max_element(out.objective.begin(), out.objective.end());  // first maximum
    out.d = static_cast<int>(best - out.objective.begin()) + 1;
    return out;
}

}  // namespace ajk
