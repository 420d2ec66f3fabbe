#pragma once

#include <functional>

#include "rrrekf/model.hpp"
#include "rrrekf/types.hpp"

namespace rrrekf {

using VectorFn = std::function<Vector(const Vector&)>;

/**
 * @brief Classical fixed-step RK4 for a generic time-dependent derivative.
 *
 * deriv(x, t) must be finite; a non-finite stage derivative raises
 * NumericError carrying the time stamp.
 */
Vector rk4_step(const std::function<Vector(const Vector&, double)>& deriv, const Vector& x,
                double t, double dt);

/// RK4 time update of the augmented state; theta is a random constant (theta_dot = 0).
AugmentedState rk4_step(const ModelDefinition& model, const AugmentedState& state,
                        const InputBank& inputs, double t, double dt);

/**
 * @brief Central-difference Jacobian d fn_i / d x_j.
 *
 * Per-component step max(1e-6, 1e-6*|x_j|), overridable through `scale`
 * (empty vector: default steps). Non-finite evaluations raise NumericError
 * naming the perturbed component.
 */
Matrix numeric_jacobian(const VectorFn& fn, const Vector& at, const Vector& scale = Vector());

}  // namespace rrrekf
