#include "ajk/ecm.hpp"
#include "ajk/errors.hpp"
#include "ajk/simulation.hpp"
#include "ajk/state_space.hpp"

#include <doctest.h>

#include <cmath>

using namespace ajk;

TEST_SUITE("simulation") {

TEST_CASE("white noise when every coefficient is zero") {
    SimSpec s;
    s.n = 1;
    s.p = 1;
    s.T = 2000;
    s.sparsity = 1.0;
    s.seed = 3;
    const SimulatedVar v = simulate_var(s);
    CHECK(v.truth.psi(0, 0) == 0.0);
    const Vector y = v.data.values().row(0).transpose();
    const double mean = y.mean();
    double num = 0.0, den = 0.0;
    for (int t = 0; t < s.T; ++t) {
        den += (y[t] - mean) * (y[t] - mean);
        if (t > 0) num += (y[t] - mean) * (y[t - 1] - mean);
    }
    CHECK(std::abs(num / den) < 3.0 / std::sqrt(s.T));
}

TEST_CASE("companion spectral radius hits the target") {
    for (int p = 1; p <= 3; ++p) {
        SimSpec s;
        s.n = 3;
        s.p = p;
        s.spectral_radius = 0.9;
        s.sparsity = 0.4;
        s.seed = 10 + p;
        const SimulatedVar v = simulate_var(s);
        CHECK(std::abs(spectral_radius(companion_matrix(v.truth.psi)) - 0.9) < 1e-10);
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(v.truth.sigma).eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("simulation is deterministic per seed") {
    SimSpec s;
    s.seed = 99;
    CHECK(simulate_var(s).data.values() == simulate_var(s).data.values());
    SimSpec t = s;
    t.seed = 100;
    CHECK(simulate_var(s).data.values() != simulate_var(t).data.values());
}

TEST_CASE("stable simulations do not explode") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SimSpec s;
        s.n = 3;
        s.p = 2;
        s.T = 400;
        s.spectral_radius = 0.9;
        s.seed = seed;
        const Matrix y = simulate_var(s).data.values();
        const auto var = [](const Matrix& m) {
            return (m.array().colwise() - m.rowwise().mean().array()).square().sum() / m.size();
        };
        const double first = var(y.leftCols(200)), second = var(y.rightCols(200));
        CHECK(second < 3.0 * first);
        CHECK(first < 3.0 * second);
    }
}

TEST_CASE("true Sigma is recovered from a long sample") {
    SimSpec s;
    s.n = 2;
    s.p = 1;
    s.T = 2000;
    s.spectral_radius = 0.6;
    s.seed = 5;
    const SimulatedVar v = simulate_var(s);
    const EcmFit fit = ecm_estimate(v.data, {1, 0.0, 0.0, 1.0}, EcmConfig{});
    const Matrix S = fit.standardization.scale.asDiagonal();
    const Matrix sigma_hat = S * fit.params.sigma * S;
    CHECK((sigma_hat - v.truth.sigma).norm() / v.truth.sigma.norm() < 0.10);
}

TEST_CASE("inject_missing examples") {
    SimSpec s;
    s.n = 10;
    s.T = 100;
    s.seed = 1;
    const TimeSeriesDataset d = simulate_var(s).data;
    CHECK((inject_missing(d, 0.0, 3).observed() == d.observed()).all());

    const TimeSeriesDataset m = inject_missing(d, 0.1, 3, 1);
    const auto masked = 1000 - m.observed_count();
    CHECK(masked >= 90);
    CHECK(masked <= 110);
    CHECK((inject_missing(d, 0.1, 3, 1).observed() == m.observed()).all());

    const TimeSeriesDataset blocks = inject_missing(d, 0.2, 4, 5, 7);
    CHECK(blocks.observed().leftCols(7).all());
    CHECK(1000 - blocks.observed_count() == 200);

    CHECK_THROWS_AS(inject_missing(d, 1.0, 3), DomainError);
    CHECK_THROWS_AS(inject_missing(d, 0.5, 3, 1, 60), DomainError);
}

}
