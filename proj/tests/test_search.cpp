#include "ajk/combinatorics.hpp"
#include "ajk/errors.hpp"
#include "ajk/search.hpp"
#include "ajk/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

using namespace ajk;

TEST_SUITE("search") {

TEST_CASE("region validation") {
    SearchRegion r;
    CHECK_NOTHROW(r.validate());
    r.p_set.clear();
    CHECK_THROWS_AS(r.validate(), DomainError);
    r = SearchRegion{};
    r.alpha = {0.5, 1.5};
    CHECK_THROWS_AS(r.validate(), DomainError);
    r = SearchRegion{};
    r.beta = {0.5, 2.0};
    CHECK_THROWS_AS(r.validate(), DomainError);
    r = SearchRegion{};
    r.lambda = {2.0, 1.0};
    CHECK_THROWS_AS(r.validate(), DomainError);
}

TEST_CASE("random candidates") {
    SearchRegion point{{2}, {0.5, 0.5}, {0.3, 0.3}, {1.5, 1.5}};
    const auto one = random_candidates(point, 1, 9);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == Hyperparameters{2, 0.5, 0.3, 1.5});
    CHECK_THROWS_AS(random_candidates(point, 2, 9), CapacityError);
    point.p_set = {1, 2, 3};
    CHECK(random_candidates(point, 3, 9).size() == 3);
    CHECK_THROWS_AS(random_candidates(point, 0, 9), DomainError);

    const SearchRegion defaults;
    const auto a = random_candidates(defaults, 1000, 123);
    CHECK(a == random_candidates(defaults, 1000, 123));
    CHECK(a != random_candidates(defaults, 1000, 124));
    std::set<std::tuple<int, double, double, double>> unique;
    std::set<int> ps;
    for (const auto& h : a) {
        CHECK(h.p >= 1);
        CHECK(h.p <= 5);
        CHECK(h.lambda >= 1e-4);
        CHECK(h.lambda <= 5.0);
        CHECK(h.alpha >= 0.0);
        CHECK(h.alpha <= 1.0);
        CHECK(h.beta >= 1.0);
        CHECK(h.beta <= 5.0);
        unique.emplace(h.p, h.lambda, h.alpha, h.beta);
        ps.insert(h.p);
    }
    CHECK(unique.size() == 1000);
    CHECK(ps.size() == 5);
}

TEST_CASE("grid search with mock evaluators") {
    const std::vector<Hyperparameters> c{{1, 0.9, 0, 1}, {1, 0.2, 0, 1}, {2, 0.5, 0, 1}, {1, 0.2, 0.5, 1}};
    const auto by_lambda = [](const Hyperparameters& h) { return ErrorEvaluation{h.lambda * 10.0, 0}; };
    const SearchResult r = grid_search(c, by_lambda);
    CHECK(r.best == c[1]);
    CHECK(r.best_error == 2.0);
    REQUIRE(r.trace.size() == 4);
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(r.trace[k].candidate == c[k]);
        CHECK(r.best_error <= r.trace[k].error);
    }

    const SearchResult single = grid_search({c[0]}, by_lambda);
    CHECK(single.best == c[0]);

    const SearchResult tie = grid_search({c[0], c[2]}, [](const Hyperparameters&) { return ErrorEvaluation{1, 0}; });
    CHECK(tie.best == c[0]);

    const SearchResult partial = grid_search(c, [](const Hyperparameters& h) -> ErrorEvaluation {
        if (h.p == 1) throw NumericalError("boom");
        return {3.0, 0};
    });
    CHECK(partial.best == c[2]);
    CHECK_FALSE(partial.trace[0].ok);
    CHECK(partial.trace[0].message == "boom");

    CHECK_THROWS_AS(grid_search(c, [](const Hyperparameters&) -> ErrorEvaluation { throw NumericalError("x"); }),
                    NumericalError);
    CHECK_THROWS_AS(grid_search({}, by_lambda), DomainError);
}

TEST_CASE("argmin does not depend on evaluation order or worker count") {
    std::vector<Hyperparameters> c;
    for (int k = 0; k < 12; ++k) c.push_back({1 + k % 3, 0.1 * (k % 5), 0.0, 1.0});
    const auto f = [](const Hyperparameters& h) { return ErrorEvaluation{(h.lambda - 0.2) * (h.lambda - 0.2), 0}; };
    const SearchResult serial = grid_search(c, f, 1);
    const SearchResult parallel = grid_search(c, f, 4);
    CHECK(serial.best == parallel.best);
    std::vector<Hyperparameters> reversed(c.rbegin(), c.rend());
    CHECK(f(grid_search(reversed, f).best).value == serial.best_error);
}

TEST_CASE("select_hyperparameters is deterministic and records the seed") {
    SimSpec spec;
    spec.n = 2;
    spec.T = 30;
    spec.seed = 4;
    const TimeSeriesDataset d = simulate_var(spec).data;
    SearchRegion region;
    region.p_set = {1, 2};
    ArtificialFamily fam;
    fam.m = 4;
    const ErrorSpec es{JackknifeEstimator{fam}, 22, 4, WeightVector::equal(2)};
    const SearchResult a = select_hyperparameters(d, region, es, 3, 77, EcmConfig{}, 1);
    const SearchResult b = select_hyperparameters(d, region, es, 3, 77, EcmConfig{}, 2);
    CHECK(a.best == b.best);
    CHECK(a.best_error == b.best_error);
    CHECK(a.seed == 77u);
    REQUIRE(a.resolved_d.has_value());
    CHECK(*a.resolved_d == optimal_d(2, 30).d);
}

}
