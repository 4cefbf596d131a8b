#include "ajk/state_space.hpp"

#include "ajk/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <string>

namespace ajk {
namespace {

constexpr double kPinvTolerance = 1e-12;

void symmetrize(Matrix& m) {
    m = 0.5 * (m + m.transpose()).eval();
}

// Inverse of a symmetric PSD matrix and its log-determinant: Cholesky when
// possible, otherwise a pseudo-inverse (log pseudo-determinant) that drops
// eigenvalues below kPinvTolerance relative to the largest.
struct SpdInverse {
    Matrix inverse;
    double log_det = 0.0;
};

SpdInverse invert_spd(const Matrix& s) {
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() == Eigen::Success) {
        const Matrix L = llt.matrixL();
        double log_det = 0.0;
        for (Eigen::Index i = 0; i < s.rows(); ++i) log_det += 2.0 * std::log(L(i, i));
        if (std::isfinite(log_det))
            return {llt.solve(Matrix::Identity(s.rows(), s.cols())), log_det};
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
    const Vector& values = eig.eigenvalues();
    const double cutoff = kPinvTolerance * std::max(values.cwiseAbs().maxCoeff(), 1e-300);
    Vector inv = Vector::Zero(values.size());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] > cutoff) {
            inv[i] = 1.0 / values[i];
            log_det += std::log(values[i]);
        }
    }
    return {eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose(), log_det};
}

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

void require_compatible(const TimeSeriesDataset& data, const StateSpaceParams& params) {
    if (data.num_series() != params.n)
        throw DimensionError("dataset has " + std::to_string(data.num_series()) +
                             " series, state space expects " + std::to_string(params.n));
}

}  // namespace

Matrix companion_matrix(const Matrix& psi) {
    const Eigen::Index n = psi.rows();
    const Eigen::Index k = psi.cols();
    if (n < 1 || k % n != 0) throw DimensionError("coefficient matrix must be n x np");
    Matrix C = Matrix::Zero(k, k);
    C.topRows(n) = psi;
    if (k > n) C.block(n, 0, k - n, k - n).setIdentity();
    return C;
}

StateSpaceParams build_state_space(const Matrix& psi, const Matrix& sigma, const Vector& mu0,
                                   const Matrix& omega0, double epsilon) {
    const Eigen::Index n = psi.rows();
    const Eigen::Index k = psi.cols();
    if (n < 1 || k < n || k % n != 0) throw DimensionError("coefficient matrix must be n x np");
    if (sigma.rows() != n || sigma.cols() != n) throw DimensionError("sigma must be n x n");
    if (mu0.size() != k || omega0.rows() != k || omega0.cols() != k)
        throw DimensionError("initial state must have dimension np");
    if (!(epsilon > 0.0)) throw DomainError("measurement variance epsilon must be > 0");
    if (!sigma.allFinite() || !psi.allFinite()) throw NumericalError("non-finite VAR parameters");
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
        throw NumericalError("sigma is not symmetric");
    if (Eigen::LLT<Matrix>(sigma).info() != Eigen::Success)
        throw NumericalError("sigma is not positive definite");

    StateSpaceParams out;
    out.n = static_cast<int>(n);
    out.p = static_cast<int>(k / n);
    out.B = Matrix::Zero(n, k);
    out.B.leftCols(n).setIdentity();
    out.R = epsilon * Matrix::Identity(n, n);
    out.C = companion_matrix(psi);
    out.Q = Matrix::Zero(k, k);
    out.Q.topLeftCorner(n, n) = sigma;
    out.mu0 = mu0;
    out.Omega0 = omega0;
    out.epsilon = epsilon;
    return out;
}

double spectral_radius(const Matrix& C) {
    if (C.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(C, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& C, const Matrix& Q) {
    // Omega = sum_j C^j Q C'^j, summed in doubling blocks.
    Matrix omega = Q;
    Matrix power = C;
    for (int iter = 0; iter < 200; ++iter) {
        const Matrix increment = power * omega * power.transpose();
        omega += increment;
        power = (power * power).eval();
        if (increment.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, omega.cwiseAbs().maxCoeff())) break;
    }
    symmetrize(omega);
    return omega;
}

InitialState default_initial_state(const Matrix& C, const Matrix& Q) {
    const Eigen::Index k = C.rows();
    InitialState s{Vector::Zero(k), Matrix()};
    if (spectral_radius(C) < 1.0) {
        s.Omega0 = solve_discrete_lyapunov(C, Q);
        if (s.Omega0.allFinite()) return s;
    }
    s.Omega0 = 10.0 * Matrix::Identity(k, k);
    return s;
}

void kalman_filter(const TimeSeriesDataset& data, const StateSpaceParams& params, FilterOutput& out) {
    require_compatible(data, params);
    const int T = data.num_periods();
    const int n = params.n;
    const Eigen::Index k = params.state_dim();
    const auto steps = static_cast<std::size_t>(T + 1);
    out.x_pred.resize(steps);
    out.P_pred.resize(steps);
    out.x_filt.resize(steps);
    out.P_filt.resize(steps);
    out.x_pred[0] = params.mu0;
    out.P_pred[0] = params.Omega0;
    out.x_filt[0] = params.mu0;
    out.P_filt[0] = params.Omega0;
    out.loglik = 0.0;

    const Matrix& C = params.C;
    std::vector<int> obs;
    obs.reserve(static_cast<std::size_t>(n));
    for (int t = 1; t <= T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        Vector x = C * out.x_filt[ts - 1];
        Matrix P = C * out.P_filt[ts - 1] * C.transpose();
        P += params.Q;
        symmetrize(P);
        out.x_pred[ts] = x;
        out.P_pred[ts] = P;

        obs.clear();
        for (int i = 0; i < n; ++i)
            if (data.is_observed(i, t - 1)) obs.push_back(i);

        if (!obs.empty()) {
            const auto m = static_cast<Eigen::Index>(obs.size());
            Matrix S(m, m);
            Vector e(m);
            Matrix PBt(k, m);  // P B_o'
            for (Eigen::Index a = 0; a < m; ++a) {
                e[a] = data.values()(obs[a], t - 1) - x[obs[a]];
                PBt.col(a) = P.col(obs[a]);
                for (Eigen::Index b = 0; b < m; ++b) S(a, b) = P(obs[a], obs[b]);
                S(a, a) += params.epsilon;
            }
            const SpdInverse Sinv = invert_spd(S);
            const Matrix K = PBt * Sinv.inverse;
            x += K * e;
            // Joseph form: (I - K B_o) P (I - K B_o)' + K R_o K'
            Matrix A = Matrix::Identity(k, k);
            for (Eigen::Index a = 0; a < m; ++a) A.col(obs[a]) -= K.col(a);
            P = A * P * A.transpose();
            P.noalias() += params.epsilon * K * K.transpose();
            symmetrize(P);
            const double quad = e.dot(Sinv.inverse * e);
            out.loglik += -0.5 * (static_cast<double>(m) * std::log(2.0 * std::numbers::pi) + Sinv.log_det + quad);
        }
        if (!x.allFinite() || !all_finite(P) || !std::isfinite(out.loglik))
            throw NumericalError("Kalman filter produced non-finite moments at period " + std::to_string(t), t);
        out.x_filt[ts] = std::move(x);
        out.P_filt[ts] = std::move(P);
    }
}

FilterOutput kalman_filter(const TimeSeriesDataset& data, const StateSpaceParams& params) {
    FilterOutput out;
    kalman_filter(data, params, out);
    return out;
}

void kalman_smoother(const TimeSeriesDataset& data, const StateSpaceParams& params,
                     FilterOutput& filter, SmootherOutput& out) {
    kalman_filter(data, params, filter);
    const int T = data.num_periods();
    const auto steps = static_cast<std::size_t>(T + 1);
    out.x_smooth.resize(steps);
    out.P_smooth.resize(steps);
    out.P_lag.resize(steps);
    out.loglik = filter.loglik;

    const Matrix& C = params.C;
    const Eigen::Index k = params.state_dim();
    out.x_smooth[steps - 1] = filter.x_filt[steps - 1];
    out.P_smooth[steps - 1] = filter.P_filt[steps - 1];
    out.P_lag[0] = Matrix::Zero(k, k);

    for (int t = T - 1; t >= 0; --t) {
        const auto ts = static_cast<std::size_t>(t);
        const Matrix& Pp = filter.P_pred[ts + 1];
        // J_t = P_{t|t} C' P_{t+1|t}^{-1}, from P_{t+1|t} J' = C P_{t|t}.
        const Matrix CP = C * filter.P_filt[ts];
        Matrix J;
        Eigen::LLT<Matrix> llt(Pp);
        if (llt.info() == Eigen::Success) {
            J = llt.solve(CP).transpose();
        } else {
            J = (invert_spd(Pp).inverse * CP).transpose();
        }
        if (!J.allFinite()) J = (invert_spd(Pp).inverse * CP).transpose();

        out.x_smooth[ts] = filter.x_filt[ts] + J * (out.x_smooth[ts + 1] - filter.x_pred[ts + 1]);
        Matrix P = filter.P_filt[ts];
        P.noalias() += J * (out.P_smooth[ts + 1] - Pp) * J.transpose();
        symmetrize(P);
        out.P_lag[ts + 1] = out.P_smooth[ts + 1] * J.transpose();
        if (!out.x_smooth[ts].allFinite() || !P.allFinite())
            throw NumericalError("Kalman smoother produced non-finite moments at period " + std::to_string(t), t);
        out.P_smooth[ts] = std::move(P);
    }
}

SmootherOutput kalman_smoother(const TimeSeriesDataset& data, const StateSpaceParams& params) {
    FilterOutput filter;
    SmootherOutput out;
    kalman_smoother(data, params, filter, out);
    return out;
}

}  // namespace ajk
