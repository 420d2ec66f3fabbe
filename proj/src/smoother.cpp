#include "rrrekf/smoother.hpp"

#include <cmath>

#include "rrrekf/numerics.hpp"

namespace rrrekf {

void rts_smooth(FilterTrajectory& traj, const ModelDefinition& model, const Dataset& data) {
    const Eigen::Index N = traj.samples();
    const int n = traj.n;
    const int p = traj.p;
    const int na = traj.n_aug();

    traj.x_smooth.resize(N);
    traj.P_smooth.resize(N);
    traj.lag_cov.assign(N, Matrix::Zero(na, na));
    traj.H_smooth.resize(N);
    traj.resid_smooth.resize(N);
    traj.pred_from_smooth.resize(N);

    traj.x_smooth[N - 1] = traj.x_post[N - 1];
    traj.P_smooth[N - 1] = traj.P_post[N - 1];

    std::vector<Matrix> gain(N);  // G_k = P+_k Phi_k^T (P-_{k+1})^{-1}
    for (Eigen::Index k = N - 2; k >= 0; --k) {
        Eigen::LDLT<Matrix> ldlt(traj.P_prior[k + 1]);
        if (ldlt.info() != Eigen::Success)
            throw NumericError("rts_smooth: prior covariance not factorizable at step " +
                               std::to_string(k + 1));
        // G = P+ Phi^T Pinv  computed as  (Pinv (Phi P+))^T
        const Matrix G = ldlt.solve(traj.phi[k] * traj.P_post[k]).transpose();
        gain[k] = G;

        traj.x_smooth[k] =
            traj.x_post[k] + G * (traj.x_smooth[k + 1] - traj.x_prior[k + 1]);
        Matrix Ps = traj.P_post[k] +
                    G * (traj.P_smooth[k + 1] - traj.P_prior[k + 1]) * G.transpose();
        symmetrize(Ps);
        traj.P_smooth[k] = Ps;
    }

    // Lag-one smoothed cross-covariance C_k = Cov(x_{k+1}, x_k | N)
    // (Shumway-Stoffer recursion seeded from the last measurement update).
    if (N >= 2) {
        const Matrix I = Matrix::Identity(na, na);
        // Seed: (I - K_N H_N) Phi_{N-1} P+_{N-1}; recover K H from the
        // covariance update ratio instead of storing the gain:
        // P+_N = (I - K H) P-_N  =>  (I - K H) = P+_N (P-_N)^{-1}.
        Eigen::LDLT<Matrix> ldlt(traj.P_prior[N - 1]);
        const Matrix IKH = ldlt.solve(traj.P_post[N - 1].transpose()).transpose();
        traj.lag_cov[N - 2] = IKH * traj.phi[N - 2] * traj.P_post[N - 2];
        for (Eigen::Index k = N - 3; k >= 0; --k) {
            traj.lag_cov[k] =
                traj.P_post[k + 1] * gain[k].transpose() +
                gain[k + 1] * (traj.lag_cov[k + 1] - traj.phi[k + 1] * traj.P_post[k + 1]) *
                    gain[k].transpose();
        }
    }

    // Smoothed residues, smoothed-point measurement Jacobians, one-step
    // dynamics predictions from smoothed states.
    for (Eigen::Index k = 0; k < N; ++k) {
        const Vector u = data.inputs.at(traj.time[k]);
        const Vector xs = traj.x_smooth[k].head(n);
        const Vector th = traj.x_smooth[k].tail(p);
        const Vector zhat = model.measurement(xs, model.dynamics(xs, th, u), th, u);
        traj.resid_smooth[k] = traj.z.row(k).transpose() - zhat;

        auto h = [&](const Vector& pert) {
            const Vector x = pert.head(n);
            const Vector t2 = pert.tail(p);
            return model.measurement(x, model.dynamics(x, t2, u), t2, u);
        };
        traj.H_smooth[k] = numeric_jacobian(h, traj.x_smooth[k]);

        if (k + 1 < N) {
            AugmentedState st{xs, th};
            st = rk4_step(model, st, data.inputs, traj.time[k], traj.time[k + 1] - traj.time[k]);
            traj.pred_from_smooth[k] = st.x;
        } else {
            traj.pred_from_smooth[k] = xs;
        }
    }
    traj.smoothed = true;
}

ResidueSeries residue_series(const FilterTrajectory& traj, const Matrix& R) {
    if (!traj.smoothed) throw NumericError("residue_series: smoothing not done");
    const Eigen::Index N = traj.samples();
    const int m = traj.m;

    ResidueSeries out;
    out.innovation.resize(m, N);
    out.filtered.resize(m, N);
    out.smoothed.resize(m, N);
    out.bound_innov.resize(m, N);
    out.bound_filt.resize(m, N);
    out.bound_smooth.resize(m, N);
    out.filt_negative.setConstant(m, N, false);
    out.smooth_negative.setConstant(m, N, false);

    for (Eigen::Index k = 0; k < N; ++k) {
        out.innovation.col(k) = traj.innovation[k];
        out.filtered.col(k) = traj.resid_filt[k];
        out.smoothed.col(k) = traj.resid_smooth[k];

        const Vector d_in =
            (R + traj.H_prior[k] * traj.P_prior[k] * traj.H_prior[k].transpose()).diagonal();
        const Vector d_fi =
            (R - traj.H_post[k] * traj.P_post[k] * traj.H_post[k].transpose()).diagonal();
        const Vector d_sm =
            (R - traj.H_smooth[k] * traj.P_smooth[k] * traj.H_smooth[k].transpose()).diagonal();
        for (int i = 0; i < m; ++i) {
            out.bound_innov(i, k) = std::sqrt(std::max(d_in[i], 0.0));
            out.bound_filt(i, k) = std::sqrt(std::abs(d_fi[i]));
            out.bound_smooth(i, k) = std::sqrt(std::abs(d_sm[i]));
            if (d_fi[i] < 0.0) {
                out.filt_negative(i, k) = true;
                ++out.filt_neg_count;
            }
            if (d_sm[i] < 0.0) {
                out.smooth_negative(i, k) = true;
                ++out.smooth_neg_count;
            }
        }
    }
    return out;
}

}  // namespace rrrekf
