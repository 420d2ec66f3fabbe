#include "rrrekf/numerics.hpp"

#include <cmath>
#include <string>

namespace rrrekf {

Vector rk4_step(const std::function<Vector(const Vector&, double)>& deriv, const Vector& x,
                double t, double dt) {
    if (!(dt > 0.0)) throw NumericError("rk4_step: dt must be positive");
    auto eval = [&](const Vector& xi, double ti) {
        Vector d = deriv(xi, ti);
        if (!d.allFinite())
            throw NumericError("rk4_step: non-finite derivative at t=" + std::to_string(ti));
        return d;
    };
    const Vector k1 = eval(x, t);
    const Vector k2 = eval(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Vector k3 = eval(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Vector k4 = eval(x + dt * k3, t + dt);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

AugmentedState rk4_step(const ModelDefinition& model, const AugmentedState& state,
                        const InputBank& inputs, double t, double dt) {
    auto deriv = [&](const Vector& x, double ti) {
        return model.dynamics(x, state.theta, inputs.at(ti));
    };
    return AugmentedState{rk4_step(deriv, state.x, t, dt), state.theta};
}

Matrix numeric_jacobian(const VectorFn& fn, const Vector& at, const Vector& scale) {
    const Eigen::Index n = at.size();
    Vector x = at;
    Vector f0 = fn(at);
    if (!f0.allFinite()) throw NumericError("numeric_jacobian: non-finite base evaluation");
    Matrix jac(f0.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h =
            (scale.size() == n) ? scale[j] : std::max(1e-6, 1e-6 * std::abs(at[j]));
        const double orig = x[j];
        x[j] = orig + h;
        Vector fp = fn(x);
        x[j] = orig - h;
        Vector fm = fn(x);
        x[j] = orig;
        if (!fp.allFinite() || !fm.allFinite())
            throw NumericError("numeric_jacobian: non-finite evaluation perturbing component " +
                               std::to_string(j));
        jac.col(j) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

}  // namespace rrrekf
