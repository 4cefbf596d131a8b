#pragma once

#include "ajk/core_model.hpp"

#include <vector>

namespace ajk {

/**
 * Companion-form state space of a VAR(p):
 *
 *   y_t = B x_t + e_t,        e_t ~ N(0, R),  R = epsilon * I_n
 *   x_t = C x_{t-1} + v_t,    v_t ~ N(0, Q),  Q = blkdiag(Sigma, 0)
 *   x_0 ~ N(mu0, Omega0)
 *
 * with x_t = (y_t', ..., y_{t-p+1}')', B = [I_n 0] and the VAR coefficients
 * in the first n rows of C.
 */
struct StateSpaceParams {
    int n = 0;
    int p = 0;
    Matrix B;
    Matrix R;
    Matrix C;
    Matrix Q;
    Vector mu0;
    Matrix Omega0;
    double epsilon = 1e-8;

    int state_dim() const { return n * p; }
    /// First n rows of C.
    Matrix psi() const { return C.topRows(n); }
    /// Top-left n x n block of Q.
    Matrix sigma() const { return Q.topLeftCorner(n, n); }
};

/// Throws NumericalError if sigma is not symmetric positive definite and
/// DomainError for epsilon <= 0 or inconsistent shapes.
StateSpaceParams build_state_space(const Matrix& psi, const Matrix& sigma, const Vector& mu0,
                                   const Matrix& omega0, double epsilon);

/// Companion matrix of an n x np coefficient matrix.
Matrix companion_matrix(const Matrix& psi);

double spectral_radius(const Matrix& C);

/// Solution of Omega = C Omega C' + Q for a stable C (doubling iteration).
Matrix solve_discrete_lyapunov(const Matrix& C, const Matrix& Q);

struct InitialState {
    Vector mu0;
    Matrix Omega0;
};

/// mu0 = 0 and the stationary covariance when C is stable, otherwise 10 I.
InitialState default_initial_state(const Matrix& C, const Matrix& Q);

/// Index t = 0..T. Entry 0 of the filtered moments holds (mu0, Omega0);
/// entry 0 of the predicted moments is unused.
struct FilterOutput {
    std::vector<Vector> x_pred;  // E[x_t | y_1..y_{t-1}]
    std::vector<Matrix> P_pred;
    std::vector<Vector> x_filt;  // E[x_t | y_1..y_t]
    std::vector<Matrix> P_filt;
    double loglik = 0.0;         // log p(observed y_1..y_T)
};

struct SmootherOutput {
    std::vector<Vector> x_smooth;  // t = 0..T
    std::vector<Matrix> P_smooth;  // t = 0..T
    std::vector<Matrix> P_lag;     // Cov(x_t, x_{t-1} | all), t = 1..T; entry 0 unused
    double loglik = 0.0;

    int num_periods() const { return static_cast<int>(x_smooth.size()) - 1; }
};

/// Kalman filter with row deletion of unobserved measurements. Throws
/// NumericalError carrying the 1-based period on non-finite moments.
FilterOutput kalman_filter(const TimeSeriesDataset& data, const StateSpaceParams& params);
void kalman_filter(const TimeSeriesDataset& data, const StateSpaceParams& params, FilterOutput& out);

/// Fixed-interval (RTS) smoother with lag-one covariances.
SmootherOutput kalman_smoother(const TimeSeriesDataset& data, const StateSpaceParams& params);

/// Workspace form: reuses the buffers of `filter` and `out` across calls.
void kalman_smoother(const TimeSeriesDataset& data, const StateSpaceParams& params,
                     FilterOutput& filter, SmootherOutput& out);

}  // namespace ajk
