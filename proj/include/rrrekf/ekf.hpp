#pragma once

#include <string>
#include <vector>

#include "rrrekf/dataset.hpp"
#include "rrrekf/model.hpp"

namespace rrrekf {

/**
 * @brief Per-step record of one filter/smoother pass over a dataset.
 *
 * All states and covariances live in the augmented space (n states + p
 * parameters). Step 0 is the seed: prior == posterior == (x0, P0), no
 * measurement update; updates run for k = 1..N-1. phi[k] maps k -> k+1
 * (last entry unused). lag_cov[k] = Cov(x_{k+1}, x_k | N) after smoothing.
 */
struct FilterTrajectory {
    int n = 0, m = 0, p = 0;
    Vector time;
    Matrix z;  // N x m

    std::vector<Vector> x_prior, x_post, x_smooth;          // n+p
    std::vector<Matrix> P_prior, P_post, P_smooth;          // (n+p)^2
    std::vector<Matrix> phi;                                // transition (n+p)^2
    std::vector<Matrix> lag_cov;                            // (n+p)^2
    std::vector<Matrix> H_prior, H_post, H_smooth;          // m x (n+p)
    std::vector<Vector> innovation, resid_filt, resid_smooth;  // m
    std::vector<Vector> pred_from_smooth;  // f_d(x_smooth_k) state part (n), k -> k+1

    Matrix xd;  // n x N open-loop dynamics with the final parameter estimate
    bool smoothed = false;

    int n_aug() const { return n + p; }
    Eigen::Index samples() const { return time.size(); }
    Vector theta_post(Eigen::Index k) const { return x_post[k].tail(p); }
};

/**
 * @brief Augmented-state EKF forward pass.
 *
 * Mean propagation by RK4; covariance by Phi = I + F dt + F^2 dt^2/2 with F the
 * augmented Jacobian; Joseph-form measurement update with symmetrization.
 * Q is n x n (parameters carry zero process noise). Throws NumericError when an
 * innovation covariance cannot be factorized and DivergenceError when the state
 * leaves the finite domain.
 */
FilterTrajectory ekf_forward(const ModelDefinition& model, const Dataset& data,
                             const Vector& theta0, const Vector& x0, const Matrix& P0,
                             const Matrix& Q, const Matrix& R);

}  // namespace rrrekf
