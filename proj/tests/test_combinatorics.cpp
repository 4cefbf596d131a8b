#include "ajk/combinatorics.hpp"
#include "ajk/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace ajk;

TEST_SUITE("combinatorics") {

TEST_CASE("binomial examples") {
    CHECK(binomial(6, 2) == 15);
    CHECK(binomial(5, 0) == 1);
    CHECK(binomial(3, 7) == 0);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(100, 50) == BigCount("100891344545564193334812497256"));
}

TEST_CASE("count_all_missing_patterns examples") {
    CHECK(count_all_missing_patterns(2, 3, 1) == 0);
    CHECK(count_all_missing_patterns(2, 3, 2) == 3);
    CHECK(count_all_missing_patterns(2, 3, 4) == 15);
    CHECK_THROWS_AS(count_all_missing_patterns(2, 3, 0), DomainError);
    CHECK_THROWS_AS(count_all_missing_patterns(2, 3, 7), DomainError);
}

TEST_CASE("count matches enumeration for small grids and stays within bounds") {
    for (int n = 1; n <= 4; ++n)
        for (int T = 1; n * T <= 12; ++T)
            for (int d = 1; d <= n * T; ++d) {
                CAPTURE(n);
                CAPTURE(T);
                CAPTURE(d);
                const BigCount c = count_all_missing_patterns(n, T, d);
                CHECK(c == oracle::count_with_full_column(n, T, d));
                CHECK(c >= 0);
                CHECK(c <= binomial(n * T, d));
            }
}

TEST_CASE("profile agrees with the pointwise count") {
    for (auto [n, T] : {std::pair{3, 60}, std::pair{9, 20}, std::pair{1, 5}}) {
        const std::vector<BigCount> profile = all_missing_profile(n, T);
        REQUIRE(profile.size() == static_cast<std::size_t>(n * T));
        for (int d = 1; d <= n * T; d += 7) CHECK(profile[d - 1] == count_all_missing_patterns(n, T, d));
    }
}

TEST_CASE("optimal_d examples") {
    const OptimalD two_three = optimal_d(2, 3);
    CHECK(two_three.d == 2);
    const std::vector<BigCount> expected{6, 12, 8, 0, 0, 0};
    CHECK(two_three.objective == expected);

    for (int T = 1; T <= 8; ++T) {
        const OptimalD r = optimal_d(1, T);
        CHECK(r.d == 1);
        for (const BigCount& v : r.objective) CHECK(v == 0);
    }

    // Enumeration: C(4, d) - full-column counts (0, 2, 4, 1) = (4, 4, 0, 0).
    const OptimalD two_two = optimal_d(2, 2);
    for (int d = 1; d <= 4; ++d)
        CHECK(two_two.objective[d - 1] ==
              oracle::count_subsets(4, d) - oracle::count_with_full_column(2, 2, d));
    CHECK(two_two.d == 1);
}

TEST_CASE("optimal_d on panels of realistic size") {
    CHECK(optimal_d(3, 60).d == 77);
    CHECK(optimal_d(3, 40).d == 52);
    CHECK(optimal_d(9, 160).d == 719);
}

}
