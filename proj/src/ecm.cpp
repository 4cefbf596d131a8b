#include "ajk/ecm.hpp"

#include "ajk/errors.hpp"
#include "ajk/kernels/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace ajk {
namespace {

constexpr double kOmegaJitter = 1e-12;

std::span<const double> col_span(const Matrix& m, Eigen::Index j) {
    return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

double min_eigenvalue(const Matrix& s) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(s, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// The initial Sigma can be singular when a series is constant after
// imputation; lift it just enough for the state space to be well defined.
Matrix ensure_positive_definite(Matrix sigma, double floor) {
    sigma = 0.5 * (sigma + sigma.transpose()).eval();
    for (int attempt = 0; attempt < 40; ++attempt) {
        if (Eigen::LLT<Matrix>(sigma).info() == Eigen::Success && min_eigenvalue(sigma) > 0.0) return sigma;
        sigma.diagonal().array() += floor;
        floor *= 10.0;
    }
    throw NumericalError("could not regularise the initial residual covariance");
}

}  // namespace

void EcmConfig::validate() const {
    if (max_iter < 1) throw DomainError("max_iter must be >= 1");
    if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
}

Standardization Standardization::estimate(const TimeSeriesDataset& data) {
    const int n = data.num_series();
    Standardization s{Vector::Zero(n), Vector::Ones(n)};
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        int count = 0;
        for (int t = 0; t < data.num_periods(); ++t) {
            if (!data.is_observed(i, t)) continue;
            sum += data.values()(i, t);
            ++count;
        }
        if (count == 0) continue;
        const double mean = sum / count;
        double ss = 0.0;
        for (int t = 0; t < data.num_periods(); ++t) {
            if (!data.is_observed(i, t)) continue;
            const double d = data.values()(i, t) - mean;
            ss += d * d;
        }
        s.center[i] = mean;
        if (count > 1) {
            const double sd = std::sqrt(ss / (count - 1));
            if (sd > 0.0 && std::isfinite(sd)) s.scale[i] = sd;
        }
    }
    return s;
}

Standardization Standardization::identity(int n) {
    return {Vector::Zero(n), Vector::Ones(n)};
}

TimeSeriesDataset Standardization::apply(const TimeSeriesDataset& data) const {
    Matrix values = Matrix::Zero(data.num_series(), data.num_periods());
    for (int t = 0; t < data.num_periods(); ++t)
        for (int i = 0; i < data.num_series(); ++i)
            if (data.is_observed(i, t)) values(i, t) = (data.values()(i, t) - center[i]) / scale[i];
    return TimeSeriesDataset(std::move(values), data.observed(), data.series_names(), data.time_labels());
}

Vector Standardization::restore(const Vector& standardized) const {
    return (standardized.array() * scale.array() + center.array()).matrix();
}

Vector penalty_weights(const Hyperparameters& hyper, int n) {
    hyper.validate();
    Vector w(static_cast<Eigen::Index>(n) * hyper.p);
    double decay = 1.0;
    for (int lag = 0; lag < hyper.p; ++lag) {
        w.segment(static_cast<Eigen::Index>(lag) * n, n).setConstant(hyper.lambda * decay);
        decay *= hyper.beta;
    }
    return w;
}

Matrix penalty_matrix(const Hyperparameters& hyper, int n) {
    return penalty_weights(hyper, n).asDiagonal();
}

Matrix phi_dot(const Matrix& psi, double epsilon) {
    return (1.0 / (psi.array().abs() + epsilon)).sqrt().matrix();
}

Matrix phi(const Matrix& psi, double epsilon) {
    return (1.0 / (psi.array().abs() + epsilon)).matrix();
}

double soft_threshold(double z, double zeta) {
    if (z > zeta) return z - zeta;
    if (z < -zeta) return z + zeta;
    return 0.0;
}

double elastic_net_penalty(const Matrix& psi, const Hyperparameters& hyper) {
    const int n = static_cast<int>(psi.rows());
    if (psi.cols() != static_cast<Eigen::Index>(n) * hyper.p)
        throw DimensionError("coefficient matrix does not match the lag order");
    const Vector w = penalty_weights(hyper, n);
    const auto a = psi.array();
    const Eigen::ArrayXXd per_coef = 0.5 * (1.0 - hyper.alpha) * a.square() + hyper.alpha * a.abs();
    return (per_coef.rowwise() * w.transpose().array()).sum();
}

EStepStats estep_statistics(const SmootherOutput& sm, int n, int p) {
    const int T = sm.num_periods();
    const Eigen::Index k = static_cast<Eigen::Index>(n) * p;
    if (T < 1) throw DimensionError("smoother output covers no periods");
    if (sm.x_smooth.front().size() != k || sm.P_lag.size() != sm.x_smooth.size())
        throw DimensionError("smoother output does not match n * p");

    EStepStats s;
    s.D = sm.x_smooth[0] * sm.x_smooth[0].transpose() + sm.P_smooth[0];
    s.E = Matrix::Zero(n, n);
    s.F = Matrix::Zero(n, k);
    s.G = Matrix::Zero(k, k);
    for (int t = 1; t <= T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        const Vector& xt = sm.x_smooth[ts];
        const Vector& xp = sm.x_smooth[ts - 1];
        s.E.noalias() += xt.head(n) * xt.head(n).transpose();
        s.E += sm.P_smooth[ts].topLeftCorner(n, n);
        s.F.noalias() += xt.head(n) * xp.transpose();
        s.F += sm.P_lag[ts].topRows(n);
        s.G.noalias() += xp * xp.transpose();
        s.G += sm.P_smooth[ts - 1];
    }
    return s;
}

CmStepResult cm_step(const EStepStats& stats, const Hyperparameters& hyper, const Matrix& phi_dot_k,
                     const SmootherOutput& sm) {
    const auto n = static_cast<int>(stats.E.rows());
    const Eigen::Index k = stats.G.rows();
    if (stats.F.rows() != n || stats.F.cols() != k || phi_dot_k.rows() != n || phi_dot_k.cols() != k)
        throw DimensionError("cm_step: inconsistent moment or phi dimensions");
    const double T = sm.num_periods();
    const Vector gamma = penalty_weights(hyper, n);
    const double alpha = hyper.alpha;
    const Matrix phi_k = phi_dot_k.array().square().matrix();

    CmStepResult out;
    out.mu0 = sm.x_smooth[0];
    out.omega0 = sm.P_smooth[0];
    out.omega0.diagonal().array() += kOmegaJitter;

    out.psi.resize(n, k);
    for (int i = 0; i < n; ++i) {
        Matrix A = stats.G;
        A.diagonal().array() += gamma.array() * ((1.0 - alpha) + alpha * phi_k.row(i).transpose().array());
        Eigen::LLT<Matrix> llt(A);
        if (llt.info() != Eigen::Success)
            throw NumericalError("CM step: coefficient system of equation " + std::to_string(i + 1) +
                                 " is singular; use lambda > 0");
        out.psi.row(i) = llt.solve(stats.F.row(i).transpose()).transpose();
    }
    if (!out.psi.allFinite()) throw NumericalError("CM step produced non-finite coefficients");

    const Matrix& psi = out.psi;
    const Matrix FPt = stats.F * psi.transpose();
    Matrix S = stats.E - FPt - FPt.transpose() + psi * stats.G * psi.transpose();
    const Matrix shrunk = psi.array() * phi_dot_k.array();
    S += (1.0 - alpha) * psi * gamma.asDiagonal() * psi.transpose();
    S += alpha * shrunk * gamma.asDiagonal() * shrunk.transpose();
    out.sigma = (0.5 / T) * (S + S.transpose());
    if (!out.sigma.allFinite()) throw NumericalError("CM step produced a non-finite covariance");
    return out;
}

TimeSeriesDataset mean_impute(const TimeSeriesDataset& data) {
    Matrix values = Matrix::Zero(data.num_series(), data.num_periods());
    for (int i = 0; i < data.num_series(); ++i) {
        double sum = 0.0;
        int count = 0;
        for (int t = 0; t < data.num_periods(); ++t) {
            if (!data.is_observed(i, t)) continue;
            sum += data.values()(i, t);
            ++count;
        }
        const double mean = count > 0 ? sum / count : 0.0;
        for (int t = 0; t < data.num_periods(); ++t)
            values(i, t) = data.is_observed(i, t) ? data.values()(i, t) : mean;
    }
    return TimeSeriesDataset(std::move(values), Mask::Constant(data.num_series(), data.num_periods(), true),
                             data.series_names(), data.time_labels());
}

CoordinateDescentResult coordinate_descent_elastic_net(const TimeSeriesDataset& imputed,
                                                       const Hyperparameters& hyper,
                                                       const EcmConfig& config) {
    hyper.validate();
    config.validate();
    if (imputed.observed_count() != static_cast<std::ptrdiff_t>(imputed.num_series()) * imputed.num_periods())
        throw DomainError("coordinate descent needs a complete (imputed) panel");
    const int n = imputed.num_series();
    const int p = hyper.p;
    const int T = imputed.num_periods();
    if (T <= p) throw DomainError("need more than p periods to estimate a VAR(p)");

    const Eigen::Index N = T - p;
    const Eigen::Index k = static_cast<Eigen::Index>(n) * p;
    const Matrix& Y = imputed.values();
    // Row r regresses y_{p+r} (0-based column) on (y_{p+r-1}', ..., y_{r}')'.
    Matrix X(N, k);
    Matrix targets(N, n);
    for (Eigen::Index r = 0; r < N; ++r) {
        targets.row(r) = Y.col(p + r).transpose();
        for (int lag = 0; lag < p; ++lag)
            X.block(r, static_cast<Eigen::Index>(lag) * n, 1, n) = Y.col(p + r - 1 - lag).transpose();
    }
    Vector norms(k);
    for (Eigen::Index j = 0; j < k; ++j) norms[j] = kernels::sum_squares(col_span(X, j));

    const Vector gamma = penalty_weights(Hyperparameters{p, 1.0, hyper.alpha, hyper.beta}, n);
    const double lambda = hyper.lambda;
    const double alpha = hyper.alpha;
    const double Nd = static_cast<double>(N);

    CoordinateDescentResult out;
    out.params.psi = Matrix::Zero(n, k);
    out.params.hyper = hyper;
    Vector psi(k);
    Vector resid(N);
    for (int i = 0; i < n; ++i) {
        psi.setZero();
        resid = targets.col(i);
        const std::span<double> r{resid.data(), static_cast<std::size_t>(N)};
        auto objective = [&] {
            double pen = 0.0;
            for (Eigen::Index j = 0; j < k; ++j)
                pen += gamma[j] * (0.5 * (1.0 - alpha) * psi[j] * psi[j] + alpha * std::abs(psi[j]));
            return 0.5 / Nd * kernels::sum_squares(r) + lambda * pen;
        };
        double previous = objective();
        bool converged = false;
        int sweep = 0;
        while (sweep < config.max_iter) {
            ++sweep;
            for (Eigen::Index j = 0; j < k; ++j) {
                const double denom = norms[j] / Nd + lambda * (1.0 - alpha) * gamma[j];
                const double old = psi[j];
                double updated = 0.0;
                if (denom > 0.0) {
                    const double z = (kernels::dot(r, col_span(X, j)) + old * norms[j]) / Nd;
                    updated = soft_threshold(z, lambda * alpha * gamma[j]) / denom;
                }
                if (updated != old) {
                    kernels::axpy(old - updated, col_span(X, j), r);
                    psi[j] = updated;
                }
            }
            const double current = objective();
            if (std::abs(current - previous) / (std::abs(previous) + config.epsilon) < config.rel_tol) {
                converged = true;
                break;
            }
            previous = current;
        }
        out.converged = out.converged && converged;
        out.max_sweeps = std::max(out.max_sweeps, sweep);
        out.params.psi.row(i) = psi.transpose();
    }
    const Matrix residuals = targets - X * out.params.psi.transpose();
    out.params.sigma = residuals.transpose() * residuals / Nd;
    return out;
}

double penalized_loglik(const TimeSeriesDataset& data, const StateSpaceParams& params,
                        const Hyperparameters& hyper) {
    return kalman_filter(data, params).loglik - elastic_net_penalty(params.psi(), hyper);
}

StateSpaceParams EcmFit::state_space(double epsilon) const {
    return build_state_space(params.psi, params.sigma, mu0, omega0, epsilon);
}

EcmFit ecm_estimate(const TimeSeriesDataset& data, const Hyperparameters& hyper, const EcmConfig& config,
                    const VarParameters* warm_start) {
    hyper.validate();
    config.validate();
    const int n = data.num_series();
    const int p = hyper.p;
    if (data.num_periods() <= p) throw DomainError("need more than p periods to estimate a VAR(p)");
    if (!data.has_observations()) throw DomainError("estimation window has no observed cells");
    const Eigen::Index k = static_cast<Eigen::Index>(n) * p;

    EcmFit fit;
    fit.standardization = Standardization::estimate(data);
    const TimeSeriesDataset z = fit.standardization.apply(data);

    Matrix psi;
    Matrix sigma;
    if (warm_start != nullptr && warm_start->psi.rows() == n && warm_start->psi.cols() == k &&
        warm_start->psi.allFinite() && warm_start->sigma.allFinite()) {
        psi = warm_start->psi;
        sigma = warm_start->sigma;
    } else {
        CoordinateDescentResult init = coordinate_descent_elastic_net(mean_impute(z), hyper, config);
        fit.initializer_converged = init.converged;
        psi = std::move(init.params.psi);
        sigma = std::move(init.params.sigma);
    }
    sigma = ensure_positive_definite(std::move(sigma), std::max(config.epsilon, 1e-10));

    Matrix C = companion_matrix(psi);
    Matrix Q = Matrix::Zero(k, k);
    Q.topLeftCorner(n, n) = sigma;
    InitialState init_state = default_initial_state(C, Q);
    Vector mu0 = std::move(init_state.mu0);
    Matrix omega0 = std::move(init_state.Omega0);

    FilterOutput filter;
    SmootherOutput smoothed;
    double best = -std::numeric_limits<double>::infinity();
    fit.params.hyper = hyper;
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        double monitor = 0.0;
        try {
            const StateSpaceParams ssp = build_state_space(psi, sigma, mu0, omega0, config.epsilon);
            kalman_smoother(z, ssp, filter, smoothed);
            monitor = smoothed.loglik - elastic_net_penalty(psi, hyper);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (ECM iteration " + std::to_string(iter) + ")",
                                 e.period(), iter);
        }
        fit.monitor.push_back(monitor);
        fit.iterations = iter;
        const bool improved = monitor > best || fit.monitor.size() == 1;
        if (improved) {
            best = monitor;
            fit.params.psi = psi;
            fit.params.sigma = sigma;
            fit.mu0 = mu0;
            fit.omega0 = omega0;
        }
        if (iter > 1) {
            const double previous = fit.monitor[fit.monitor.size() - 2];
            if (std::abs(monitor - previous) / (std::abs(previous) + config.epsilon) < config.rel_tol) {
                fit.converged = true;
                fit.params.psi = psi;
                fit.params.sigma = sigma;
                fit.mu0 = mu0;
                fit.omega0 = omega0;
                break;
            }
        }
        if (iter == config.max_iter) break;

        CmStepResult next;
        try {
            next = cm_step(estep_statistics(smoothed, n, p), hyper, phi_dot(psi, config.epsilon), smoothed);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (ECM iteration " + std::to_string(iter) + ")",
                                 std::nullopt, iter);
        }
        fit.sigma_min_eigenvalue.push_back(min_eigenvalue(next.sigma));
        psi = std::move(next.psi);
        sigma = std::move(next.sigma);
        mu0 = std::move(next.mu0);
        omega0 = std::move(next.omega0);
    }
    return fit;
}

}  // namespace ajk
