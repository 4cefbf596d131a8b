#include "ajk/simulation.hpp"

#include "ajk/errors.hpp"
#include "ajk/rng.hpp"
#include "ajk/state_space.hpp"

#include <cmath>
#include <string>

namespace ajk {

void SimSpec::validate() const {
    if (n < 1 || p < 1 || T < 1) throw DomainError("simulation needs n, p, T >= 1");
    if (!(spectral_radius > 0.0 && spectral_radius < 1.0)) throw DomainError("spectral radius must lie in (0, 1)");
    if (!(sparsity >= 0.0 && sparsity <= 1.0)) throw DomainError("sparsity must lie in [0, 1]");
    if (!(sigma_scale > 0.0)) throw DomainError("sigma scale must be positive");
    if (burn_in < 0) throw DomainError("burn-in must be >= 0");
}

namespace {

Matrix symmetric_sqrt_factor(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
    const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * root.asDiagonal();
}

}  // namespace

SimulatedVar simulate_var(const SimSpec& spec) {
    spec.validate();
    const int n = spec.n;
    const int p = spec.p;
    const int np = n * p;
    Rng rng(derive_seed(spec.seed, "synthetic_data"));

    Matrix psi = Matrix::Zero(n, np);
    if (spec.sparsity < 1.0) {
        // Redraw until the companion matrix is not nilpotent.
        for (int attempt = 0;; ++attempt) {
            for (int j = 0; j < np; ++j)
                for (int i = 0; i < n; ++i) {
                    const double keep = rng.uniform();
                    const double value = rng.normal();
                    psi(i, j) = keep < spec.sparsity ? 0.0 : value;
                }
            if (spectral_radius(companion_matrix(psi)) > 1e-8) break;
            if (attempt == 10000) throw NumericalError("could not draw a non-nilpotent coefficient matrix");
        }
        const double s = spec.spectral_radius / spectral_radius(companion_matrix(psi));
        double factor = 1.0;
        for (int lag = 0; lag < p; ++lag) {
            factor *= s;
            psi.middleCols(lag * n, n) *= factor;
        }
    }

    Matrix L(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) L(i, j) = rng.normal();
    Matrix sigma = spec.sigma_scale * (L * L.transpose() / n + 0.5 * Matrix::Identity(n, n));
    sigma = 0.5 * (sigma + sigma.transpose());

    const Matrix C = companion_matrix(psi);
    Matrix Q = Matrix::Zero(np, np);
    Q.topLeftCorner(n, n) = sigma;
    const Matrix stationary_factor = symmetric_sqrt_factor(solve_discrete_lyapunov(C, Q));
    const Matrix shock_factor = Eigen::LLT<Matrix>(sigma).matrixL();

    auto normals = [&rng](int k) {
        Vector z(k);
        for (int i = 0; i < k; ++i) z[i] = rng.normal();
        return z;
    };

    Vector x = stationary_factor * normals(np);
    Matrix values(n, spec.T);
    for (int t = 0; t < spec.burn_in + spec.T; ++t) {
        Vector next = C * x;
        next.head(n) += shock_factor * normals(n);
        x = std::move(next);
        if (t >= spec.burn_in) values.col(t - spec.burn_in) = x.head(n);
    }

    std::vector<std::string> names, labels;
    for (int i = 1; i <= n; ++i) names.push_back("y" + std::to_string(i));
    for (int t = 1; t <= spec.T; ++t) labels.push_back(std::to_string(t));
    TimeSeriesDataset data(std::move(values), Mask::Constant(n, spec.T, true), std::move(names), std::move(labels));
    return {std::move(data), VarParameters{psi, sigma, Hyperparameters{p, 0.0, 0.0, 1.0}}};
}

TimeSeriesDataset inject_missing(const TimeSeriesDataset& data, double fraction, std::uint64_t seed,
                                 int block_len, int keep_leading) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw DomainError("missing fraction must lie in [0, 1)");
    if (block_len < 1) throw DomainError("block length must be >= 1");
    if (keep_leading < 0) throw DomainError("keep_leading must be >= 0");
    const int n = data.num_series();
    const int T = data.num_periods();
    const auto target = static_cast<std::ptrdiff_t>(std::llround(fraction * n * T));
    if (target == 0) return data;
    if (keep_leading >= T) throw DomainError("no periods left after the protected leading periods");

    Mask mask = data.observed();
    const std::ptrdiff_t eligible = mask.rightCols(T - keep_leading).count();
    if (eligible < target)
        throw DomainError("cannot mask " + std::to_string(target) + " cells: only " + std::to_string(eligible) +
                          " eligible observed cells");

    Rng rng(seed);
    std::ptrdiff_t masked = 0;
    const auto width = static_cast<std::uint64_t>(T - keep_leading);
    while (masked < target) {
        const int series = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const int start = keep_leading + static_cast<int>(rng.below(width));
        for (int t = start; t < std::min(T, start + block_len) && masked < target; ++t) {
            if (mask(series, t)) {
                mask(series, t) = false;
                ++masked;
            }
        }
    }
    return data.with_mask(std::move(mask));
}

}  // namespace ajk
