#pragma once

#include "ajk/core_model.hpp"
#include "ajk/state_space.hpp"

#include <vector>

namespace ajk {

struct EcmConfig {
    int max_iter = 1000;
    double rel_tol = 1e-3;
    double epsilon = 1e-8;

    void validate() const;
};

/// Psi (n x np) and Sigma (n x n) of a VAR(p), with the hyperparameters used.
struct VarParameters {
    Matrix psi;
    Matrix sigma;
    Hyperparameters hyper;
};

/// Per-series centring and scaling estimated from the observed cells.
struct Standardization {
    Vector center;
    Vector scale;

    static Standardization estimate(const TimeSeriesDataset& data);
    static Standardization identity(int n);

    TimeSeriesDataset apply(const TimeSeriesDataset& data) const;
    Vector restore(const Vector& standardized) const;
};

/// Smoothed second moments entering the expected complete-data likelihood.
struct EStepStats {
    Matrix D;  // E[x_0 x_0']                      (np x np)
    Matrix E;  // sum_t E[x_{1:n,t} x_{1:n,t}']    (n x n)
    Matrix F;  // sum_t E[x_{1:n,t} x_{t-1}']      (n x np)
    Matrix G;  // sum_t E[x_{t-1} x_{t-1}']        (np x np)
};

struct CmStepResult {
    Vector mu0;
    Matrix omega0;
    Matrix psi;
    Matrix sigma;
};

/// Diagonal of the lag-decay penalty: entry j is lambda * beta^floor(j / n)
/// for 0-based j.
Vector penalty_weights(const Hyperparameters& hyper, int n);
Matrix penalty_matrix(const Hyperparameters& hyper, int n);

/// Elementwise sqrt(1 / (|psi| + epsilon)).
Matrix phi_dot(const Matrix& psi, double epsilon);
/// Elementwise 1 / (|psi| + epsilon), i.e. phi_dot squared.
Matrix phi(const Matrix& psi, double epsilon);

/// sign(z) max(|z| - zeta, 0).
double soft_threshold(double z, double zeta);

/// Sum over equations of lambda sum_j beta^floor(j/n) [ (1-alpha)/2 psi_j^2 + alpha |psi_j| ].
double elastic_net_penalty(const Matrix& psi, const Hyperparameters& hyper);

EStepStats estep_statistics(const SmootherOutput& smoothed, int n, int p);

/**
 * Conditional maximisation given the E-step moments.
 *
 * mu0 and Omega0 are the smoothed moments of x_0 (Omega0 gets a 1e-12
 * diagonal jitter). Row i of Psi solves
 *   [G + diag(Gamma_jj ((1 - alpha) + alpha Phi_ij))] psi_i = F_i'
 * where Phi = phi_dot_k .* phi_dot_k comes from the previous iterate, and
 *   Sigma = [E - F Psi' - Psi F' + Psi G Psi'
 *            + (1 - alpha) Psi Gamma Psi' + alpha (Psi.*phi_dot_k) Gamma (Psi.*phi_dot_k)'] / T.
 *
 * Throws NumericalError if a row system is singular (only possible for
 * lambda = 0).
 */
CmStepResult cm_step(const EStepStats& stats, const Hyperparameters& hyper, const Matrix& phi_dot_k,
                     const SmootherOutput& smoothed);

/// Each missing cell replaced by its series' observed mean (0 for a series
/// without observations).
TimeSeriesDataset mean_impute(const TimeSeriesDataset& data);

struct CoordinateDescentResult {
    VarParameters params;
    bool converged = true;
    int max_sweeps = 0;
};

/**
 * Equation-by-equation elastic-net VAR on a complete panel by cyclic
 * coordinate descent, minimising
 *   1/(2(T-p)) sum_t (y_{i,t+1} - psi' x_t)^2
 *     + lambda sum_j beta^floor(j/n) [(1-alpha)/2 psi_j^2 + alpha |psi_j|].
 * Sigma is the residual covariance with divisor T-p. Stops an equation when
 * the relative objective change falls below config.rel_tol.
 */
CoordinateDescentResult coordinate_descent_elastic_net(const TimeSeriesDataset& imputed,
                                                       const Hyperparameters& hyper,
                                                       const EcmConfig& config);

/// Observed-data log-likelihood minus elastic_net_penalty at the coefficients in C.
double penalized_loglik(const TimeSeriesDataset& data, const StateSpaceParams& params,
                        const Hyperparameters& hyper);

/// Result of ecm_estimate. Parameters refer to the standardised data.
struct EcmFit {
    VarParameters params;
    Vector mu0;
    Matrix omega0;
    Standardization standardization;
    int iterations = 0;
    bool converged = false;
    bool initializer_converged = true;
    std::vector<double> monitor;               // penalized log-likelihood per evaluated iterate
    std::vector<double> sigma_min_eigenvalue;  // of every Sigma produced by a CM step

    StateSpaceParams state_space(double epsilon) const;
};

/**
 * Penalised maximum likelihood of the elastic-net VAR on data with missing
 * cells. The data is standardised, initialised by mean imputation and
 * coordinate descent (or from `warm_start`), then ECM iterations run until
 * |l_k - l_{k-1}| / (|l_{k-1}| + epsilon) < rel_tol or max_iter. Without
 * convergence the best evaluated iterate is returned with converged = false.
 */
EcmFit ecm_estimate(const TimeSeriesDataset& data, const Hyperparameters& hyper, const EcmConfig& config,
                    const VarParameters* warm_start = nullptr);

}  // namespace ajk
