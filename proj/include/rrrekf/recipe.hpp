#pragma once

#include "rrrekf/diagnostics.hpp"

namespace rrrekf {

/**
 * @brief Iterative tuning of theta0, P0, Q and R across filter-smoother passes.
 *
 * Each iteration runs ekf_forward + rts_smooth with the current statistics,
 * then resets theta0 to the final posterior parameter estimate, P0 to the
 * smoothed covariance at the first sample (parameter block scaled for MT/MS
 * runs) and Q/R via the method's estimator. Stops at max_iterations or when
 * the relative change of theta and of J1, J3, J6, J8 stays below the
 * tolerance for `plateau_iters` consecutive iterations.
 */
EstimationReport run_estimation(const ModelDefinition& model, const Dataset& data,
                                const RecipeConfig& config);

/// run_estimation with the smoothed-statistics (reference) method.
EstimationReport reference_recipe(const ModelDefinition& model, const Dataset& data,
                                  RecipeConfig config = {});

}  // namespace rrrekf
