#pragma once

#include <string>
#include <vector>

#include "rrrekf/tuning.hpp"

namespace rrrekf {

/// Final estimates, uncertainties and per-iteration history of one run.
struct EstimationReport {
    std::string model_name;
    Method method = Method::Reference;
    int iterations_run = 0;
    bool converged = false;

    Vector theta_hat;    // parameter estimate at the final time of the final pass
    Vector sigma_theta;  // sqrt diag of the parameter covariance block
    Vector pct_crb;      // 100*sigma/|theta|
    Eigen::MatrixXi corr_100;

    Matrix Q, R, P0;  // final estimates produced by the recipe
    std::vector<CostVector> cost_history;
    std::vector<Vector> theta0_history;  // initial parameter vector per iteration

    ResidueSeries residues;
    Matrix theta_trajectory;  // p x N posterior parameter series of the final pass
    Matrix xd, x_prior, x_post, x_smooth;  // n x N state series of the final pass
    Matrix z;                              // m x N
    Vector time;
    std::vector<std::string> flags;

    std::vector<std::string> param_names, state_names, meas_names;

    // Inputs of the final executed pass; rerunning one filter/smoother pass
    // with these reproduces every serialized output bit for bit.
    Vector theta0_in, x0_in;
    Matrix P0_in, Q_in, R_in;
};

/// %CRB = 100*sqrt(P_ii)/|theta_i|; components with theta_i == 0 come back
/// infinite (flagged, not thrown).
Vector crb_percent(const Vector& theta, const Matrix& P_theta);

/// Correlation matrix scaled by 100 and rounded half away from zero.
/// Throws NumericError naming the parameter on a zero diagonal.
Eigen::MatrixXi correlation_matrix(const Matrix& P_theta,
                                   const std::vector<std::string>& names = {});

/// Estimated noise sample series and their normalized autocorrelations.
struct NoiseSamples {
    Matrix v;  // measurement noise samples (smoothed residues), m x N
    Matrix w;  // process noise samples xs_{k+1} - f_d(xs_k), n x (N-1)
    Matrix v_autocorr;  // m x (lags+1), lag 0 first
    Matrix w_autocorr;  // n x (lags+1)
};

/// Autocorrelation up to lag floor(N/10): mean over N-l of x_k*x_{k+l}
/// divided by the lag-0 mean square (divisor-N convention).
NoiseSamples noise_samples(const FilterTrajectory& traj);

struct WeakParameter {
    std::string name;
    int index = -1;
    double pct_crb = 0.0;
};

/// Parameters whose %CRB exceeds the threshold, sorted worst first.
std::vector<WeakParameter> weak_parameter_screen(const EstimationReport& report,
                                                 double pct_crb_threshold = 20.0);

}  // namespace rrrekf
