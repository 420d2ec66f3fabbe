#include "rrrekf/aircraft_models.hpp"

#include <cmath>

namespace rrrekf {

namespace {

// case-1 parameter indices
enum { C1_CNa, C1_CNde, C1_CL0, C1_Cma, C1_Cmq, C1_Cmde, C1_Cm0, C1_th0, C1_CN0,
       C1_CAa, C1_CAa2, C1_CAde, C1_CA0 };
// case-2 parameter indices
enum { C2_CLa, C2_CLde, C2_CL0, C2_Cma, C2_Cmq, C2_Cmad, C2_Cmde, C2_Cm0, C2_th0, C2_CN0 };
// case-3 parameter indices
enum { C3_CYb, C3_CYdr, C3_b0, C3_CLb, C3_CLp, C3_CLr, C3_CLda, C3_CLdr, C3_CL0,
       C3_ph0, C3_CNb, C3_CNp, C3_CNr, C3_CNda, C3_CNdr, C3_CN0, C3_CY0, C3_CYp,
       C3_CYr, C3_CYda };

double case1_CN(const Vector& t, double alpha, double de) {
    return t[C1_CNa] * alpha + t[C1_CNde] * de + t[C1_CN0];
}

double case1_CA(const Vector& t, double alpha, double de) {
    return t[C1_CAa] * alpha + t[C1_CAa2] * alpha * alpha + t[C1_CAde] * de + t[C1_CA0];
}

}  // namespace

Vector case1_dynamics(const Vector& x, const Vector& t, const Vector& u,
                      const ModelConstants& c) {
    const double alpha = x[0], q = x[1], th = x[2];
    const double de = u[0], phi = u[1], beta = u[2], pm = u[3], rm = u[4], am = u[5];

    const double CN = case1_CN(t, alpha, de);
    const double CA = case1_CA(t, alpha, de);
    const double CL = CN * std::cos(alpha) - CA * std::sin(alpha) + t[C1_CL0];

    Vector xdot(3);
    xdot[0] = -(c.qbar * c.S / (c.mass * c.V)) * CL + q +
              (c.g / c.V) * (std::cos(phi) * std::cos(am) * std::cos(th) +
                             std::sin(am) * std::sin(th)) -
              beta * (pm * std::cos(am) + rm * std::sin(am));
    xdot[1] = (c.qbar * c.S * c.cbar / c.Iyy) *
                  (t[C1_Cma] * alpha + t[C1_Cmq] * (c.cbar / (2.0 * c.V)) * q +
                   t[C1_Cmde] * de + t[C1_Cm0]) +
              ((c.Izz - c.Ixx) / c.Iyy) * rm * pm;
    xdot[2] = q * std::cos(phi) - rm * std::sin(phi) + t[C1_th0];
    return xdot;
}

Vector case1_measurement(const Vector& x, const Vector& xdot, const Vector& t,
                         const Vector& u, const ModelConstants& c) {
    const double alpha = x[0], q = x[1], th = x[2];
    const double de = u[0];
    const double qdot = xdot[1];

    Vector z(5);
    z[0] = alpha - c.K_alpha_x_alpha * q / c.V;
    z[1] = q;
    z[2] = th;
    z[3] = (c.qbar * c.S / (c.mass * c.g)) * case1_CN(t, alpha, de) + (c.x_an / c.g) * qdot;
    z[4] = -(c.qbar * c.S / (c.mass * c.g)) * case1_CA(t, alpha, de) + (c.z_ax / c.g) * qdot;
    return z;
}

Vector case2_dynamics(const Vector& x, const Vector& t, const Vector& u,
                      const ModelConstants& c) {
    const double alpha = x[0], q = x[1], th = x[2];
    const double de = u[0], phi = u[1], beta = u[2], vt = u[3], pm = u[4], rm = u[5],
                 am = u[6];
    const double V = (c.V > 0.0) ? c.V : vt;

    const double cb = std::cos(beta);
    if (std::abs(cb) < 1e-6)
        throw NumericError("case-2 dynamics: cos(beta_m) degenerate (|beta_m| near pi/2)");

    const double CLw = t[C2_CLa] * alpha + t[C2_CLde] * de + t[C2_CL0];
    const double alphadot =
        -(c.qbar * c.S / (c.mass * vt * cb)) * CLw + q +
        (c.g / (vt * cb)) * (std::cos(phi) * std::cos(am) * std::cos(th) +
                             std::sin(am) * std::sin(th)) -
        std::tan(beta) * (pm * std::cos(am) + rm * std::sin(am));

    // The alphadot just computed feeds the pitching-moment C_m_alphadot term;
    // alphadot does not depend on qdot, so the substitution is exact.
    Vector xdot(3);
    xdot[0] = alphadot;
    xdot[1] = (c.qbar * c.S * c.cbar / c.Iyy) *
                  (t[C2_Cma] * alpha + t[C2_Cmq] * (c.cbar / (2.0 * V)) * q +
                   t[C2_Cmad] * (c.cbar / (2.0 * V)) * alphadot + t[C2_Cmde] * de +
                   t[C2_Cm0]) +
              ((c.Izz - c.Ixx) / c.Iyy) * rm * pm;
    xdot[2] = q * std::cos(phi) - rm * std::sin(phi) + t[C2_th0];
    return xdot;
}

Vector case2_measurement(const Vector& x, const Vector& xdot, const Vector& t,
                         const Vector& u, const ModelConstants& c) {
    const double alpha = x[0], q = x[1], th = x[2];
    const double de = u[0], vt = u[3];
    const double V = (c.V > 0.0) ? c.V : vt;
    const double qdot = xdot[1];

    Vector z(4);
    z[0] = c.K_alpha * alpha - c.K_alpha_x_alpha * q / V;
    z[1] = q;
    z[2] = th;
    // C_N_alpha := C_L_alpha and C_N_de := C_L_de
    z[3] = (c.qbar * c.S / (c.mass * c.g)) *
               (t[C2_CLa] * alpha + t[C2_CLde] * de + t[C2_CN0]) +
           (c.x_an / c.g) * qdot;
    return z;
}

Vector case3_dynamics(const Vector& x, const Vector& t, const Vector& u,
                      const ModelConstants& c, bool roll_cbar) {
    const double beta = x[0], p = x[1], phi = x[2], r = x[3];
    const double da = u[0], dr = u[1], thm = u[2], qm = u[3], am = u[4];

    const double bb = c.span / (2.0 * c.V);
    const double rollbar = roll_cbar ? c.cbar / (2.0 * c.V) : bb;

    const double CY = t[C3_CYb] * beta + t[C3_CYp] * bb * p + t[C3_CYr] * bb * r +
                      t[C3_CYda] * da + t[C3_CYdr] * dr + t[C3_b0];
    const double Lt = (c.qbar * c.S * c.span / c.Ixx) *
                          (t[C3_CLb] * beta + t[C3_CLp] * rollbar * p +
                           t[C3_CLr] * rollbar * r + t[C3_CLda] * da + t[C3_CLdr] * dr +
                           t[C3_CL0]) +
                      ((c.Iyy - c.Izz) / c.Ixx) * r * qm + (c.Izx / c.Ixx) * p * qm;
    const double Nt = (c.qbar * c.S * c.span / c.Izz) *
                          (t[C3_CNb] * beta + t[C3_CNp] * bb * p + t[C3_CNr] * bb * r +
                           t[C3_CNda] * da + t[C3_CNdr] * dr + t[C3_CN0]) +
                      ((c.Ixx - c.Iyy) / c.Izz) * p * qm - (c.Izx / c.Izz) * r * qm;

    // [1, -Izx/Ixx; -Izx/Izz, 1] * [pdot; rdot] = [Lt; Nt]
    const double det = 1.0 - c.Izx * c.Izx / (c.Ixx * c.Izz);
    if (!(det > 1e-12))
        throw ConfigError("case-3 constants: Ixx*Izz - Izx^2 must be positive");

    Vector xdot(4);
    xdot[0] = (c.qbar * c.S / (c.mass * c.V)) * CY +
              (c.g / c.V) * std::sin(phi) * std::cos(thm) + p * std::sin(am) -
              r * std::cos(am);
    xdot[1] = (Lt + (c.Izx / c.Ixx) * Nt) / det;
    xdot[2] = p + qm * std::tan(thm) * std::sin(phi) + r * std::tan(thm) * std::cos(phi) +
              t[C3_ph0];
    xdot[3] = ((c.Izx / c.Izz) * Lt + Nt) / det;
    return xdot;
}

Vector case3_measurement(const Vector& x, const Vector& xdot, const Vector& t,
                         const Vector& u, const ModelConstants& c) {
    const double beta = x[0], p = x[1], phi = x[2], r = x[3];
    const double da = u[0], dr = u[1];
    const double pdot = xdot[1], rdot = xdot[3];
    const double bb = c.span / (2.0 * c.V);

    Vector z(5);
    z[0] = beta - c.K_beta_z_beta * p / c.V + c.K_beta_x_beta * r / c.V;
    z[1] = p;
    z[2] = phi;
    z[3] = r;
    z[4] = (c.qbar * c.S / (c.mass * c.g)) *
               (t[C3_CYb] * beta + t[C3_CYp] * bb * p + t[C3_CYr] * bb * r +
                t[C3_CYda] * da + t[C3_CYdr] * dr + t[C3_CY0]) -
           (c.z_ay / c.g) * pdot + (c.x_ay / c.g) * rdot;
    return z;
}

ModelDefinition builtin_model(CaseId case_id, const ModelOverrides& ov) {
    ModelDefinition m;
    switch (case_id) {
        case CaseId::Case1Longitudinal: {
            m.name = "case1";
            m.n_states = 3;
            m.n_meas = 5;
            m.n_params = 13;
            ModelConstants c;
            c.cbar = 5.58;
            c.S = 184.0;
            c.mass = 172.667;
            c.Ixx = 4142.9;
            c.Iyy = 3922.4;
            c.Izz = 7642.5;
            c.g = 32.2;
            c.V = 403.1;
            c.qbar = 83.08;
            c.K_alpha_x_alpha = -0.0279;
            c.x_an = 0.101;
            c.z_ax = -1.17;
            m.constants = c;
            m.state_names = {"alpha", "q", "theta_pitch"};
            m.meas_names = {"alpha", "q", "theta", "an", "ax"};
            m.param_names = {"C_N_alpha", "C_N_de", "C_L_0",  "C_m_alpha", "C_m_q",
                             "C_m_de",    "C_m_0",  "theta_0", "C_N_0",    "C_A_alpha",
                             "C_A_alpha2", "C_A_de", "C_A_0"};
            m.input_names = {"de", "phi", "beta", "p", "r", "alpha"};
            m.theta_initial = Vector(13);
            m.theta_initial << 4.0, 0.24, 0.17, -0.48, -17.0, -0.9, -0.05, -0.02, 0.175,
                -0.3, 0.03, -0.083, -0.015;
            m.state_meas_index = {0, 1, 2};
            m.input_state_feedback = {-1, -1, -1, -1, -1, 0};
            m.dynamics = [c](const Vector& x, const Vector& t, const Vector& u) {
                return case1_dynamics(x, t, u, c);
            };
            m.measurement = [c](const Vector& x, const Vector& xd, const Vector& t,
                                const Vector& u) {
                return case1_measurement(x, xd, t, u, c);
            };
            break;
        }
        case CaseId::Case2Longitudinal: {
            m.name = "case2";
            m.n_states = 3;
            m.n_meas = 4;
            m.n_params = 10;
            if (!(ov.qbar > 0.0))
                throw ConfigError(
                    "case-2 requires a dynamic pressure: set qbar (> 0) in the run config");
            ModelConstants c;
            c.S = 184.0;
            c.mass = 196.0;
            c.Ixx = 6892.7;
            c.Iyy = 3953.2;
            c.Izz = 10416.4;
            c.g = 32.2;
            c.cbar = 5.58;
            c.K_alpha_x_alpha = -0.0279;
            c.x_an = 0.101;
            c.K_alpha = 1.0;
            c.qbar = ov.qbar;
            c.V = ov.vref;  // 0: use the measured velocity channel
            m.constants = c;
            m.state_names = {"alpha", "q", "theta_pitch"};
            m.meas_names = {"alpha", "q", "theta", "an"};
            m.param_names = {"C_L_alpha", "C_L_de", "C_L_0", "C_m_alpha", "C_m_q",
                             "C_m_alphadot", "C_m_de", "C_m_0", "theta_0", "C_N_0"};
            m.input_names = {"de", "phi", "beta", "vt", "p", "r", "alpha"};
            m.theta_initial = Vector(10);
            m.theta_initial << 4.0, 0.15, 0.2, -0.5, -11.5, -5.0, -1.38, -0.06, -0.01, 0.2;
            m.state_meas_index = {0, 1, 2};
            m.input_state_feedback = {-1, -1, -1, -1, -1, -1, 0};
            m.dynamics = [c](const Vector& x, const Vector& t, const Vector& u) {
                return case2_dynamics(x, t, u, c);
            };
            m.measurement = [c](const Vector& x, const Vector& xd, const Vector& t,
                                const Vector& u) {
                return case2_measurement(x, xd, t, u, c);
            };
            break;
        }
        case CaseId::Case3Lateral: {
            m.name = "case3";
            m.n_states = 4;
            m.n_meas = 5;
            m.n_params = 20;
            ModelConstants c;
            c.qbar = 865.3;
            c.S = 9.3;
            c.mass = 387.7;
            c.Ixx = 314.0;
            c.Iyy = 488.0;
            c.Izz = 698.0;
            c.Izx = 69.0;
            c.V = 39.41;
            c.g = 9.81;
            c.span = 6.81;
            c.K_beta_z_beta = 0.305;
            c.K_beta_x_beta = 2.73;
            c.z_ay = -0.098;
            c.x_ay = 0.651;
            if (ov.roll_cbar) {
                if (!(ov.cbar > 0.0))
                    throw ConfigError("case-3 roll_cbar switch requires a chord value (cbar)");
                c.cbar = ov.cbar;
            }
            m.constants = c;
            m.state_names = {"beta", "p", "phi", "r"};
            m.meas_names = {"beta", "p", "phi", "r", "ay"};
            m.param_names = {"C_Y_beta", "C_Y_dr", "beta_0", "C_L_beta", "C_L_p",
                             "C_L_r",    "C_L_da", "C_L_dr", "C_L_0",    "phi_0",
                             "C_N_beta", "C_N_p",  "C_N_r",  "C_N_da",   "C_N_dr",
                             "C_N_0",    "C_Y_0",  "C_Y_p",  "C_Y_r",    "C_Y_da"};
            m.input_names = {"da", "dr", "theta", "q", "alpha"};
            m.theta_initial = Vector(20);
            m.theta_initial << -0.5, 0.1, -0.01, 0.01, -0.35, 0.01, 0.06, 0.01, -0.002,
                0.002, 0.07, -0.055, -0.05, 0.003, -0.04, 0.0068, -0.025, 0.5, -1.0, 0.005;
            m.state_meas_index = {0, 1, 2, 3};
            m.input_state_feedback = {-1, -1, -1, -1, -1};
            const bool roll_cbar = ov.roll_cbar;
            m.dynamics = [c, roll_cbar](const Vector& x, const Vector& t, const Vector& u) {
                return case3_dynamics(x, t, u, c, roll_cbar);
            };
            m.measurement = [c](const Vector& x, const Vector& xd, const Vector& t,
                                const Vector& u) {
                return case3_measurement(x, xd, t, u, c);
            };
            break;
        }
    }
    if (!(m.constants.mass > 0.0) || !(m.constants.V >= 0.0))
        throw ConfigError(m.name + ": invalid constants");
    return m;
}

CaseId parse_case(int number) {
    switch (number) {
        case 1: return CaseId::Case1Longitudinal;
        case 2: return CaseId::Case2Longitudinal;
        case 3: return CaseId::Case3Lateral;
        default: throw ConfigError("unknown case number " + std::to_string(number));
    }
}

}  // namespace rrrekf
