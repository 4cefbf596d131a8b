#pragma once

#include "ajk/core_model.hpp"

#include <cstdint>
#include <optional>
#include <variant>

namespace ajk {

/// The family {empty set}: the jackknife reduces to the plain pseudo
/// out-of-sample error.
struct SingleEmptyFamily {};

/// All T-q+1 runs of q consecutive periods, every series deleted.
struct BlockFamily {
    int q = 1;
};

/// m distinct random d-subsets of the cell grid. An empty d is resolved with
/// optimal_d(n, T).
struct ArtificialFamily {
    std::optional<int> d;
    int m = 5000;
    bool exclude_full_columns = true;
    std::uint64_t seed = 0;
};

using FamilySpec = std::variant<SingleEmptyFamily, BlockFamily, ArtificialFamily>;

SubsampleFamily block_family(int n, int T, int q);

/**
 * Draws m distinct d-subsets of the n x T cell grid, uniformly over the
 * admissible subsets (those without a complete time column when
 * exclude_full_columns is set). Deterministic for a given seed.
 *
 * Throws CapacityError when fewer than m admissible subsets exist.
 */
SubsampleFamily draw_artificial_family(int n, int T, int d, int m, std::uint64_t seed,
                                       bool exclude_full_columns);

/// Resolved d of an artificial family spec for an n x T panel.
int resolve_d(const ArtificialFamily& spec, int n, int T);

SubsampleFamily make_family(const FamilySpec& spec, int n, int T);

}  // namespace ajk
