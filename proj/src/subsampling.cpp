#include "ajk/subsampling.hpp"

#include "ajk/combinatorics.hpp"
#include "ajk/errors.hpp"
#include "ajk/rng.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace ajk {
namespace {

// Cells are encoded as period * n + series (0-based), so a time column is a
// contiguous range of n codes.
using Combination = std::vector<std::int32_t>;

// When the grid has at most this many d-subsets and m covers a large share
// of the admissible ones, the family is sampled from an explicit enumeration instead of by
// rejection.
constexpr std::int64_t kEnumerationLimit = 200000;

bool has_full_column(const Combination& sorted, int n) {
    int run = 0;
    std::int32_t column = -1;
    for (std::int32_t code : sorted) {
        const std::int32_t c = code / n;
        run = (c == column) ? run + 1 : 1;
        column = c;
        if (run == n) return true;
    }
    return false;
}

SubsamplePattern to_pattern(const Combination& combo, int n) {
    std::vector<Cell> cells;
    cells.reserve(combo.size());
    for (std::int32_t code : combo) cells.push_back(Cell{code % n + 1, code / n + 1});
    return SubsamplePattern(std::move(cells));
}

std::vector<Combination> enumerate_admissible(int n, int cells, int d, bool exclude) {
    std::vector<Combination> out;
    Combination combo(static_cast<std::size_t>(d));
    std::iota(combo.begin(), combo.end(), 0);
    for (;;) {
        if (!exclude || !has_full_column(combo, n)) out.push_back(combo);
        int i = d - 1;
        while (i >= 0 && combo[static_cast<std::size_t>(i)] == cells - d + i) --i;
        if (i < 0) break;
        ++combo[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < d; ++j)
            combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace

SubsampleFamily block_family(int n, int T, int q) {
    if (n < 1 || T < 1) throw DomainError("panel dimensions must be positive");
    if (q < 1 || q > T) throw DomainError("block length q = " + std::to_string(q) + " outside [1, T]");
    SubsampleFamily family;
    family.reserve(static_cast<std::size_t>(T - q + 1));
    for (int start = 1; start <= T - q + 1; ++start) {
        std::vector<Cell> cells;
        cells.reserve(static_cast<std::size_t>(n * q));
        for (int t = start; t < start + q; ++t)
            for (int i = 1; i <= n; ++i) cells.push_back(Cell{i, t});
        family.emplace_back(std::move(cells));
    }
    return family;
}

SubsampleFamily draw_artificial_family(int n, int T, int d, int m, std::uint64_t seed,
                                       bool exclude_full_columns) {
    if (n < 1 || T < 1) throw DomainError("panel dimensions must be positive");
    const std::int64_t cells = static_cast<std::int64_t>(n) * T;
    if (d < 1 || d > cells) throw DomainError("d = " + std::to_string(d) + " outside [1, nT]");
    if (m < 1) throw DomainError("family size m must be >= 1");

    const BigCount total = binomial(cells, d);
    BigCount capacity = total;
    if (exclude_full_columns) capacity -= count_all_missing_patterns(n, T, d);
    if (capacity < m)
        throw CapacityError("only " + capacity.str() + " admissible " + std::to_string(d) +
                            "-subsets exist, " + std::to_string(m) + " requested");

    Rng rng(seed);
    std::vector<Combination> chosen;
    chosen.reserve(static_cast<std::size_t>(m));

    if (total <= kEnumerationLimit && capacity <= BigCount(4) * m) {
        std::vector<Combination> all = enumerate_admissible(n, static_cast<int>(cells), d, exclude_full_columns);
        for (std::size_t i = 0; i < static_cast<std::size_t>(m); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(all.size() - i));
            std::swap(all[i], all[j]);
            chosen.push_back(std::move(all[i]));
        }
    } else {
        std::vector<std::int32_t> deck(static_cast<std::size_t>(cells));
        std::iota(deck.begin(), deck.end(), 0);
        std::set<Combination> seen;
        while (chosen.size() < static_cast<std::size_t>(m)) {
            // Partial Fisher-Yates: the first d slots become a uniform d-subset.
            for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(deck.size() - i));
                std::swap(deck[i], deck[j]);
            }
            Combination combo(deck.begin(), deck.begin() + d);
            std::sort(combo.begin(), combo.end());
            if (exclude_full_columns && has_full_column(combo, n)) continue;
            if (!seen.insert(combo).second) continue;
            chosen.push_back(std::move(combo));
        }
    }

    SubsampleFamily family;
    family.reserve(chosen.size());
    for (const Combination& combo : chosen) family.push_back(to_pattern(combo, n));
    return family;
}

int resolve_d(const ArtificialFamily& spec, int n, int T) {
    return spec.d ? *spec.d : optimal_d(n, T).d;
}

SubsampleFamily make_family(const FamilySpec& spec, int n, int T) {
    return std::visit(
        [&](const auto& s) -> SubsampleFamily {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, SingleEmptyFamily>) {
                return SubsampleFamily{SubsamplePattern{}};
            } else if constexpr (std::is_same_v<S, BlockFamily>) {
                return block_family(n, T, s.q);
            } else {
                return draw_artificial_family(n, T, resolve_d(s, n, T), s.m, s.seed, s.exclude_full_columns);
            }
        },
        spec);
}

}  // namespace ajk
