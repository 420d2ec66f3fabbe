#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rrrekf/channel.hpp"
#include "rrrekf/types.hpp"

namespace rrrekf {

/**
 * @brief Geometry, mass, inertia, flow and sensor-offset constants of a model.
 *
 * Units follow the flight-test convention: lengths in ft, areas in ft^2,
 * mass in slug, inertias in slug*ft^2, dynamic pressure in lbf/ft^2,
 * speeds in ft/s, g in ft/s^2. Unused fields stay at zero.
 */
struct ModelConstants {
    double cbar = 0.0;    ///< mean aerodynamic chord
    double span = 0.0;    ///< wing span b
    double S = 0.0;       ///< reference area
    double mass = 0.0;
    double Ixx = 0.0, Iyy = 0.0, Izz = 0.0, Izx = 0.0;
    double qbar = 0.0;    ///< dynamic pressure
    double V = 0.0;       ///< reference airspeed (0: use measured velocity channel)
    double g = 0.0;
    double K_alpha = 1.0;          ///< vane scale factor
    double K_alpha_x_alpha = 0.0;  ///< combined vane offset term
    double x_an = 0.0, z_ax = 0.0;
    double K_beta_z_beta = 0.0, K_beta_x_beta = 0.0;
    double z_ay = 0.0, x_ay = 0.0;
};

/// State vector concatenated with the parameter vector (random constants).
struct AugmentedState {
    Vector x;
    Vector theta;
};

/**
 * @brief Continuous-time nonlinear state-space model with exogenous inputs.
 *
 * dynamics(x, theta, u)            -> dx/dt            (n)
 * measurement(x, xdot, theta, u)   -> predicted z      (m)
 *
 * `u` carries the interpolated input-channel values in `input_names` order.
 * The measurement function receives the state derivative so accelerometer
 * channels can use qdot/pdot/rdot directly.
 */
struct ModelDefinition {
    using DynamicsFn =
        std::function<Vector(const Vector& x, const Vector& theta, const Vector& u)>;
    using MeasurementFn = std::function<Vector(const Vector& x, const Vector& xdot,
                                               const Vector& theta, const Vector& u)>;

    std::string name;
    int n_states = 0;
    int n_meas = 0;
    int n_params = 0;
    ModelConstants constants;
    DynamicsFn dynamics;
    MeasurementFn measurement;
    std::vector<std::string> state_names, meas_names, param_names, input_names;
    Vector theta_initial;

    /// For each state, the measurement channel it can be seeded from (-1: none).
    std::vector<int> state_meas_index;
    /// For each input channel, the state it mirrors when the model is simulated
    /// closed-form (-1: pure exogenous input).
    std::vector<int> input_state_feedback;

    int n_aug() const { return n_states + n_params; }
    Vector eval_measurement(const Vector& x, const Vector& theta, const Vector& u) const {
        return measurement(x, dynamics(x, theta, u), theta, u);
    }
};

/// Input channels aligned with a model's input_names; evaluates all at once.
struct InputBank {
    std::vector<ChannelSeries> series;

    Vector at(double t) const {
        Vector u(static_cast<Eigen::Index>(series.size()));
        for (size_t i = 0; i < series.size(); ++i) u[static_cast<Eigen::Index>(i)] = interpolate_channel(series[i], t);
        return u;
    }
};

}  // namespace rrrekf
