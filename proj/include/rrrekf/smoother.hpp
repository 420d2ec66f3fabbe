#pragma once

#include "rrrekf/ekf.hpp"

namespace rrrekf {

/**
 * @brief Rauch-Tung-Striebel backward pass.
 *
 * Fills x_smooth / P_smooth / lag-one cross-covariances, the smoothed
 * residues, the smoothed-point measurement Jacobians and the one-step
 * dynamics predictions from smoothed states. Throws NumericError when a
 * prior covariance cannot be factorized.
 */
void rts_smooth(FilterTrajectory& traj, const ModelDefinition& model, const Dataset& data);

/// Innovation / filtered / smoothed residue series with +-sigma bounds.
struct ResidueSeries {
    Matrix innovation, filtered, smoothed;              // m x N
    Matrix bound_innov, bound_filt, bound_smooth;       // m x N, sqrt of |diag|
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filt_negative, smooth_negative;
    int filt_neg_count = 0, smooth_neg_count = 0;
};

/**
 * @brief Extract the three residue series and their covariance bounds.
 *
 * Bounds are sqrt diag of (R + H P- H^T), (R - H P+ H^T) and (R - H Ps H^T).
 * A negative variance is reported through the per-entry flag matrices and the
 * bound carries sqrt(|.|) so plots stay usable; nothing is silently clamped.
 */
ResidueSeries residue_series(const FilterTrajectory& traj, const Matrix& R);

}  // namespace rrrekf
