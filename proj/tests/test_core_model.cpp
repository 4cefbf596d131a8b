#include "ajk/core_model.hpp"
#include "ajk/errors.hpp"

#include <doctest.h>

#include <limits>

using namespace ajk;

namespace {

TimeSeriesDataset full_2x3() {
    Matrix v(2, 3);
    v << 1, 2, 3, 4, 5, 6;
    return TimeSeriesDataset::fully_observed(v);
}

}  // namespace

TEST_SUITE("core_model") {

TEST_CASE("dataset validates shapes and exposes views") {
    CHECK_THROWS_AS(TimeSeriesDataset(Matrix(2, 3), Mask::Constant(3, 2, true)), DimensionError);
    CHECK_THROWS_AS(TimeSeriesDataset(Matrix(0, 3), Mask(0, 3)), DimensionError);
    const TimeSeriesDataset d = full_2x3();
    CHECK(d.num_series() == 2);
    CHECK(d.num_periods() == 3);
    CHECK(d.observed_count() == 6);
    CHECK(d.prefix(2).num_periods() == 2);
    CHECK(d.window(2, 3).values()(1, 0) == 5.0);
    CHECK_THROWS(d.window(0, 2));
    CHECK_THROWS(d.prefix(4));
}

TEST_CASE("apply_pattern examples") {
    const TimeSeriesDataset d = full_2x3();
    CHECK(apply_pattern(d, SubsamplePattern{}).observed().count() == 6);

    const TimeSeriesDataset one = apply_pattern(d, SubsamplePattern({{1, 2}}));
    CHECK(one.observed_count() == 5);
    CHECK_FALSE(one.is_observed(0, 1));

    CHECK(apply_pattern(one, SubsamplePattern({{1, 2}})).observed_count() == 5);
    CHECK_THROWS_AS(apply_pattern(d, SubsamplePattern({{3, 1}})), IndexError);
    CHECK_THROWS_AS(apply_pattern(d, SubsamplePattern({{1, 4}})), IndexError);
    CHECK_THROWS_AS(apply_pattern(d, SubsamplePattern({{0, 1}})), IndexError);
}

TEST_CASE("apply_pattern composes as the union") {
    const TimeSeriesDataset d = full_2x3();
    const SubsamplePattern a({{1, 1}, {2, 3}});
    const SubsamplePattern b({{2, 3}, {1, 2}});
    const TimeSeriesDataset twice = apply_pattern(apply_pattern(d, a), b);
    const TimeSeriesDataset once = apply_pattern(d, a.merged(b));
    CHECK((twice.observed() == once.observed()).all());
    CHECK(a.merged(b).size() == 3);
}

TEST_CASE("patterns are sorted by period then series and deduplicated") {
    const SubsamplePattern p({{2, 1}, {1, 2}, {1, 1}, {2, 1}});
    REQUIRE(p.size() == 3);
    CHECK(p.cells()[0] == Cell{1, 1});
    CHECK(p.cells()[1] == Cell{2, 1});
    CHECK(p.cells()[2] == Cell{1, 2});
    CHECK(p.contains({1, 2}));
    CHECK_FALSE(p.contains({2, 2}));
}

TEST_CASE("loss examples") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Vector actual(2), predicted(2);
    MaskVector obs(2);

    actual << 1, 2;
    predicted << 0, 0;
    obs << true, true;
    CHECK(loss(actual, obs, predicted, WeightVector(Vector::Ones(2))) == doctest::Approx(5.0));

    actual << nan, nan;
    obs << false, false;
    predicted << 3, -7;
    CHECK(loss(actual, obs, predicted, WeightVector(Vector::Ones(2))) == 0.0);

    actual << nan, 2;
    obs << false, true;
    predicted << 99, 1;
    Vector w(2);
    w << 3, 2;
    CHECK(loss(actual, obs, predicted, WeightVector(w)) == doctest::Approx(2.0));

    CHECK_THROWS_AS(loss(actual, obs, Vector::Zero(3), WeightVector(w)), DimensionError);
}

TEST_CASE("loss ignores predictions at missing positions and can rescale weights") {
    Vector actual(3), p1(3), p2(3), w(3);
    MaskVector obs(3);
    actual << 1, 2, 3;
    obs << true, false, true;
    p1 << 0, 100, 0;
    p2 << 0, -5, 0;
    w << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    const WeightVector wv(w);
    CHECK(loss(actual, obs, p1, wv) == loss(actual, obs, p2, wv));
    CHECK(loss(actual, obs, p1, wv) == doctest::Approx(10.0 / 3));
    // Observed weights become 1/2 each, as with 1/(9 - m) for m missing of 9.
    CHECK(loss(actual, obs, p1, wv, LossOptions{true}) == doctest::Approx(5.0));
}

TEST_CASE("loss is zero exactly when observed weighted entries match") {
    Vector actual(2), pred(2), w(2);
    MaskVector obs(2);
    actual << 1, 2;
    pred << 1, 5;
    obs << true, true;
    w << 1, 0;
    CHECK(loss(actual, obs, pred, WeightVector(w)) == 0.0);
    w << 1, 1e-9;
    CHECK(loss(actual, obs, pred, WeightVector(w)) > 0.0);
}

TEST_CASE("weight vectors and hyperparameters validate") {
    Vector w(2);
    w << -1, 2;
    CHECK_THROWS_AS(WeightVector{w}, DomainError);
    CHECK_THROWS_AS(WeightVector{Vector::Zero(2)}, DomainError);
    CHECK(WeightVector::equal(4)[2] == doctest::Approx(0.25));

    CHECK_NOTHROW((Hyperparameters{1, 0.0, 0.0, 1.0}.validate()));
    CHECK_THROWS_AS((Hyperparameters{0, 1.0, 0.5, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Hyperparameters{1, -1.0, 0.5, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Hyperparameters{1, 1.0, 1.5, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((Hyperparameters{1, 1.0, 0.5, 0.5}.validate()), DomainError);
}

TEST_CASE("fully missing series are reported") {
    Mask m = Mask::Constant(2, 3, true);
    m.row(1).setConstant(false);
    const TimeSeriesDataset d(Matrix::Zero(2, 3), m);
    CHECK(d.fully_missing_series() == std::vector<int>{1});
}

}
