#pragma once

#include <array>
#include <string>
#include <vector>

#include "rrrekf/smoother.hpp"

namespace rrrekf {

enum class Method { Reference, MT, MS };

std::string method_name(Method m);
Method parse_method(const std::string& s);

/// P0 / Q / R triplet with provenance.
struct NoiseStatistics {
    Matrix P0;  // may be empty when not produced by the estimator
    Matrix Q;
    Matrix R;
    Method method = Method::Reference;
    std::vector<std::string> flags;
};

/**
 * @brief The J1..J8 diagnostic costs for one filter pass.
 *
 * J1/J2/J3 are innovation / filtered-residue / smoothed-residue quadratic
 * forms (expected near the number of measurements), J4 the smoothed-residue
 * bias term, J5 the per-sample negative log likelihood, J6/J7/J8 state-side
 * process-noise balances (expected near the number of states).
 */
struct CostVector {
    double j1 = 0, j2 = 0, j3 = 0, j4 = 0, j5 = 0, j6 = 0, j7 = 0, j8 = 0;
    int j2_indefinite = 0;  // steps where R - H P+ H^T was indefinite
    int j3_indefinite = 0;
    int j8_indefinite = 0;
    int skipped = 0;  // steps dropped for singular normalizers

    std::array<double, 8> values() const { return {j1, j2, j3, j4, j5, j6, j7, j8}; }
};

/// Outer-loop settings. Empty seed vectors/matrices mean "derive from data".
struct RecipeConfig {
    Method method = Method::Reference;
    int max_iterations = 100;
    double tolerance = 1e-4;  // relative change of theta and J1,J3,J6,J8
    int plateau_iters = 5;    // consecutive quiet iterations before stopping
    // Parameter-block scale applied at each P0 reset; 0 = auto (2 for the
    // reference method, 100 for MT/MS). A scale of 2 makes the P0 iteration
    // settle at the single-pass data information, so the reported sigmas
    // stay consistent with the actual estimate scatter; chaining the smoothed
    // covariance unscaled would shrink them by 1/sqrt(iterations).
    double p0_scale = 0.0;
    bool em_cross_term = true;
    bool diagonal_qr = true;
    int mt_window = 0;  // most recent samples used by MT (0: all)

    Vector theta0;   // empty: model initial values
    Vector x0;       // empty: seeded from the first measurement row
    Vector q0_diag;  // empty: 1e-8 on each state
    Vector r0_diag;  // empty: half the variance of first-differenced measurements
    Matrix P0_seed;  // empty: derived (see below)
    Matrix Q0_full, R0_full;  // full seed matrices; take precedence over *_diag

    // Derived P0 seed: state variances are p0_state_var_scale times the R seed
    // of the channel each state is read from; parameter sigmas are
    // max(p0_param_rel_sigma * |theta0_i|, p0_param_min_sigma).
    double p0_state_var_scale = 2.0;
    double p0_param_rel_sigma = 0.5;
    double p0_param_min_sigma = 0.02;

    double resolved_p0_scale() const {
        if (p0_scale > 0.0) return p0_scale;
        return method == Method::Reference ? 2.0 : 100.0;
    }
};

/// R from smoothed residues: mean of [s s^T + H Ps H^T] over update steps.
Matrix estimate_R_smoothed(const FilterTrajectory& traj, bool diagonal_only = true);

/**
 * @brief EM-style Q from smoothed one-step prediction errors.
 *
 * With w_k = xs_{k+1} - f_d(xs_k) (state block): mean of
 * [w w^T + Ps_{k+1} + Phi Ps_k Phi^T - C Phi^T - Phi C^T]; the covariance
 * bracket is dropped when `em_cross_term` is false. Negative diagonals are
 * clamped to 1e-14 and reported through `flags`.
 */
Matrix estimate_Q_smoothed(const FilterTrajectory& traj, bool em_cross_term = true,
                           bool diagonal_only = true,
                           std::vector<std::string>* flags = nullptr);

/// P0 reset: smoothed covariance at the first sample, parameter block scaled.
Matrix update_P0(const FilterTrajectory& traj, double scale);

/// The J1..J8 suite for a smoothed trajectory run with statistics (Q, R).
CostVector compute_costs(const FilterTrajectory& traj, const ModelDefinition& model,
                         const Dataset& data, const Matrix& Q, const Matrix& R);

/// Myers-Tapley covariance estimates from a forward pass (optionally windowed).
NoiseStatistics mt_estimate(const FilterTrajectory& traj, const ModelDefinition& model,
                            int window = 0);

/// Mohamed-Schwarz covariance estimates; R is the measurement covariance the
/// pass was run with (needed to rebuild the terminal gain).
NoiseStatistics ms_estimate(const FilterTrajectory& traj, const ModelDefinition& model,
                            const Matrix& R);

}  // namespace rrrekf
