#pragma once

#include "rrrekf/model.hpp"

namespace rrrekf {

enum class CaseId { Case1Longitudinal = 1, Case2Longitudinal = 2, Case3Lateral = 3 };

/**
 * @brief Open constants the built-in cases leave to the caller.
 *
 * Case-2 ships without a dynamic pressure, so `qbar` is mandatory there.
 * `vref` fixes the reference airspeed for case-2; when zero the measured
 * velocity channel is used instead. `roll_cbar` switches the case-3 roll
 * moment nondimensionalization from b/2V to cbar/2V (as printed in some
 * sources); it requires a chord via `cbar`.
 */
struct ModelOverrides {
    double qbar = 0.0;
    double vref = 0.0;
    bool roll_cbar = false;
    double cbar = 0.0;
};

// Raw equation evaluators; exposed for direct testing. Parameter layouts are
// documented in builtin_model().
Vector case1_dynamics(const Vector& x, const Vector& theta, const Vector& u,
                      const ModelConstants& c);
Vector case1_measurement(const Vector& x, const Vector& xdot, const Vector& theta,
                         const Vector& u, const ModelConstants& c);
Vector case2_dynamics(const Vector& x, const Vector& theta, const Vector& u,
                      const ModelConstants& c);
Vector case2_measurement(const Vector& x, const Vector& xdot, const Vector& theta,
                         const Vector& u, const ModelConstants& c);
Vector case3_dynamics(const Vector& x, const Vector& theta, const Vector& u,
                      const ModelConstants& c, bool roll_cbar = false);
Vector case3_measurement(const Vector& x, const Vector& xdot, const Vector& theta,
                         const Vector& u, const ModelConstants& c);

/**
 * @brief Fully populated flight-test model for one of the three cases.
 *
 * Case-1 longitudinal: n=3 (alpha, q, theta), m=5 (alpha, q, theta, an, ax),
 *   p=13 (C_N_alpha, C_N_de, C_L_0, C_m_alpha, C_m_q, C_m_de, C_m_0, theta_0,
 *   C_N_0, C_A_alpha, C_A_alpha2, C_A_de, C_A_0).
 * Case-2 longitudinal: n=3, m=4 (alpha, q, theta, an), p=10 (C_L_alpha,
 *   C_L_de, C_L_0, C_m_alpha, C_m_q, C_m_alphadot, C_m_de, C_m_0, theta_0,
 *   C_N_0) with C_N_alpha := C_L_alpha and C_N_de := C_L_de in the
 *   accelerometer channel.
 * Case-3 lateral: n=4 (beta, p, phi, r), m=5 (beta, p, phi, r, ay), p=20
 *   (C_Y_beta, C_Y_dr, beta_0, C_L_beta, C_L_p, C_L_r, C_L_da, C_L_dr, C_L_0,
 *   phi_0, C_N_beta, C_N_p, C_N_r, C_N_da, C_N_dr, C_N_0, C_Y_0, C_Y_p,
 *   C_Y_r, C_Y_da).
 */
ModelDefinition builtin_model(CaseId case_id, const ModelOverrides& overrides = {});

CaseId parse_case(int number);

}  // namespace rrrekf
