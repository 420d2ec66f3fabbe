#include "rrrekf/ekf.hpp"

#include <cmath>

#include "rrrekf/numerics.hpp"

namespace rrrekf {

namespace {

// Jacobian of the augmented dynamics [f(x,theta,u); 0] at fixed inputs.
Matrix augmented_dynamics_jacobian(const ModelDefinition& model, const Vector& xa,
                                   const Vector& u) {
    const int n = model.n_states;
    const int na = model.n_aug();
    auto f = [&](const Vector& pert) {
        return model.dynamics(pert.head(n), pert.tail(na - n), u);
    };
    Matrix F = Matrix::Zero(na, na);
    F.topRows(n) = numeric_jacobian(f, xa);
    return F;
}

// Jacobian of the composite measurement h(x, f(x,theta,u), theta, u): the
// accelerometer channels depend on the state derivative, so the chain rule
// through the dynamics is captured by differentiating the composite.
Matrix measurement_jacobian(const ModelDefinition& model, const Vector& xa, const Vector& u) {
    const int n = model.n_states;
    const int na = model.n_aug();
    auto h = [&](const Vector& pert) {
        const Vector x = pert.head(n);
        const Vector th = pert.tail(na - n);
        return model.measurement(x, model.dynamics(x, th, u), th, u);
    };
    return numeric_jacobian(h, xa);
}

void check_finite(const Vector& xa, int step, const char* where) {
    if (!xa.allFinite())
        throw DivergenceError("filter diverged (" + std::string(where) + ") at step " +
                                  std::to_string(step),
                              step);
}

}  // namespace

FilterTrajectory ekf_forward(const ModelDefinition& model, const Dataset& data,
                             const Vector& theta0, const Vector& x0, const Matrix& P0,
                             const Matrix& Q, const Matrix& R) {
    const int n = model.n_states;
    const int m = model.n_meas;
    const int p = model.n_params;
    const int na = n + p;
    const Eigen::Index N = data.samples();

    if (theta0.size() != p || x0.size() != n)
        throw ConfigError("ekf_forward: theta0/x0 dimension mismatch");
    if (P0.rows() != na || P0.cols() != na)
        throw ConfigError("ekf_forward: P0 must be (n+p) x (n+p)");
    if (Q.rows() != n || Q.cols() != n)
        throw ConfigError("ekf_forward: Q must be n x n (parameters get zero process noise)");
    if (R.rows() != m || R.cols() != m) throw ConfigError("ekf_forward: R must be m x m");
    if (data.z.rows() != N || data.z.cols() != m)
        throw DataError("ekf_forward: measurement matrix shape mismatch");

    FilterTrajectory traj;
    traj.n = n;
    traj.m = m;
    traj.p = p;
    traj.time = data.time;
    traj.z = data.z;
    traj.x_prior.resize(N);
    traj.x_post.resize(N);
    traj.P_prior.resize(N);
    traj.P_post.resize(N);
    traj.phi.assign(N, Matrix());
    traj.H_prior.resize(N);
    traj.H_post.resize(N);
    traj.innovation.resize(N);
    traj.resid_filt.resize(N);

    Matrix Qa = Matrix::Zero(na, na);
    Qa.topLeftCorner(n, n) = Q;
    const Matrix I = Matrix::Identity(na, na);

    // Seed: no measurement update at the first sample.
    Vector xa(na);
    xa << x0, theta0;
    Matrix P = P0;
    symmetrize(P);
    {
        const Vector u0 = data.inputs.at(data.time[0]);
        const Matrix H0 = measurement_jacobian(model, xa, u0);
        const Vector zhat = model.measurement(x0, model.dynamics(x0, theta0, u0), theta0, u0);
        traj.x_prior[0] = xa;
        traj.x_post[0] = xa;
        traj.P_prior[0] = P;
        traj.P_post[0] = P;
        traj.H_prior[0] = H0;
        traj.H_post[0] = H0;
        traj.innovation[0] = data.z.row(0).transpose() - zhat;
        traj.resid_filt[0] = traj.innovation[0];
    }

    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        const double t = traj.time[k];
        const double dt = traj.time[k + 1] - t;
        if (!(dt > 0.0)) throw DataError("ekf_forward: non-increasing time at step " +
                                         std::to_string(k + 1));

        // Time update.
        const Vector uk = data.inputs.at(t);
        Matrix F;
        try {
            F = augmented_dynamics_jacobian(model, xa, uk);
        } catch (const NumericError& e) {
            throw DivergenceError("filter diverged (dynamics jacobian) at step " +
                                      std::to_string(k) + ": " + e.what(),
                                  static_cast<int>(k));
        }
        const Matrix Phi = I + F * dt + 0.5 * (F * F) * dt * dt;
        traj.phi[k] = Phi;

        AugmentedState st{xa.head(n), xa.tail(p)};
        try {
            st = rk4_step(model, st, data.inputs, t, dt);
        } catch (const NumericError& e) {
            throw DivergenceError("filter diverged (time update) at step " +
                                      std::to_string(k + 1) + ": " + e.what(),
                                  static_cast<int>(k + 1));
        }
        xa.head(n) = st.x;
        check_finite(xa, static_cast<int>(k + 1), "time update");

        P = Phi * P * Phi.transpose() + Qa;
        symmetrize(P);

        traj.x_prior[k + 1] = xa;
        traj.P_prior[k + 1] = P;

        // Measurement update (Joseph form).
        const Vector u1 = data.inputs.at(traj.time[k + 1]);
        Matrix H;
        try {
            H = measurement_jacobian(model, xa, u1);
        } catch (const NumericError& e) {
            throw DivergenceError("filter diverged (measurement jacobian) at step " +
                                      std::to_string(k + 1) + ": " + e.what(),
                                  static_cast<int>(k + 1));
        }
        traj.H_prior[k + 1] = H;

        const Vector zhat = model.measurement(xa.head(n), model.dynamics(xa.head(n), xa.tail(p), u1),
                                              xa.tail(p), u1);
        const Vector nu = data.z.row(k + 1).transpose() - zhat;
        traj.innovation[k + 1] = nu;

        Matrix S = H * P * H.transpose() + R;
        symmetrize(S);
        Eigen::LLT<Matrix> llt(S);
        if (llt.info() != Eigen::Success)
            throw NumericError("ekf_forward: innovation covariance not invertible at step " +
                               std::to_string(k + 1));
        const Matrix K = llt.solve(H * P).transpose();  // P H^T S^{-1}

        xa += K * nu;
        check_finite(xa, static_cast<int>(k + 1), "measurement update");

        const Matrix IKH = I - K * H;
        P = IKH * P * IKH.transpose() + K * R * K.transpose();
        symmetrize(P);

        traj.x_post[k + 1] = xa;
        traj.P_post[k + 1] = P;
        traj.H_post[k + 1] = measurement_jacobian(model, xa, u1);
        const Vector zpost = model.measurement(xa.head(n), model.dynamics(xa.head(n), xa.tail(p), u1),
                                               xa.tail(p), u1);
        traj.resid_filt[k + 1] = data.z.row(k + 1).transpose() - zpost;
    }
    traj.phi[N - 1] = I;

    // Open-loop dynamics with the final parameter estimate ("predicted
    // dynamics" trajectory, no measurement feedback, no process noise).
    const Vector theta_final = traj.x_post[N - 1].tail(p);
    traj.xd.resize(n, N);
    AugmentedState od{x0, theta_final};
    traj.xd.col(0) = od.x;
    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        od = rk4_step(model, od, data.inputs, traj.time[k], traj.time[k + 1] - traj.time[k]);
        if (!od.x.allFinite())
            od.x = traj.xd.col(k);  // keep the record usable if the open loop blows up
        traj.xd.col(k + 1) = od.x;
    }
    return traj;
}

}  // namespace rrrekf
