#include "rrrekf/tuning.hpp"

#include <cmath>
#include <numbers>

#include "rrrekf/numerics.hpp"
#include "rrrekf/recipe.hpp"

namespace rrrekf {

std::string method_name(Method m) {
    switch (m) {
        case Method::Reference: return "reference";
        case Method::MT: return "mt";
        case Method::MS: return "ms";
    }
    return "?";
}

Method parse_method(const std::string& s) {
    if (s == "reference" || s == "ref") return Method::Reference;
    if (s == "mt") return Method::MT;
    if (s == "ms") return Method::MS;
    throw ConfigError("unknown method '" + s + "' (expected reference|mt|ms)");
}

namespace {

void require_smoothed(const FilterTrajectory& traj, const char* who) {
    if (!traj.smoothed) throw NumericError(std::string(who) + ": smoothing not done");
    if (traj.samples() < 2) throw DataError(std::string(who) + ": empty trajectory");
}

Matrix clamp_diagonal(const Matrix& M, bool diagonal_only, const std::string& tag,
                      std::vector<std::string>* flags) {
    Matrix out = diagonal_only ? Matrix(M.diagonal().asDiagonal()) : M;
    int clamped = 0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        if (out(i, i) < kVarianceFloor) {
            out(i, i) = kVarianceFloor;
            ++clamped;
        }
    }
    if (clamped > 0 && flags)
        flags->push_back(tag + ": " + std::to_string(clamped) +
                         " diagonal entries clamped to 1e-14");
    return out;
}

}  // namespace

Matrix estimate_R_smoothed(const FilterTrajectory& traj, bool diagonal_only) {
    require_smoothed(traj, "estimate_R_smoothed");
    const Eigen::Index N = traj.samples();
    const int m = traj.m;

    Matrix acc = Matrix::Zero(m, m);
    for (Eigen::Index k = 1; k < N; ++k) {
        const Vector& s = traj.resid_smooth[k];
        acc += s * s.transpose() +
               traj.H_smooth[k] * traj.P_smooth[k] * traj.H_smooth[k].transpose();
    }
    acc /= static_cast<double>(N - 1);
    symmetrize(acc);
    if (diagonal_only) acc = Matrix(acc.diagonal().asDiagonal());
    return acc;
}

Matrix estimate_Q_smoothed(const FilterTrajectory& traj, bool em_cross_term,
                           bool diagonal_only, std::vector<std::string>* flags) {
    require_smoothed(traj, "estimate_Q_smoothed");
    const Eigen::Index N = traj.samples();
    const int n = traj.n;

    Matrix acc = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        const Vector w = traj.x_smooth[k + 1].head(n) - traj.pred_from_smooth[k];
        acc += w * w.transpose();
        if (em_cross_term) {
            const Matrix& Phi = traj.phi[k];
            const Matrix& C = traj.lag_cov[k];  // Cov(x_{k+1}, x_k | N)
            const Matrix bracket = traj.P_smooth[k + 1] +
                                   Phi * traj.P_smooth[k] * Phi.transpose() -
                                   C * Phi.transpose() - Phi * C.transpose();
            acc += bracket.topLeftCorner(n, n);
        }
    }
    acc /= static_cast<double>(N - 1);
    symmetrize(acc);
    return clamp_diagonal(acc, diagonal_only, "Q (smoothed)", flags);
}

Matrix update_P0(const FilterTrajectory& traj, double scale) {
    require_smoothed(traj, "update_P0");
    Matrix P0 = traj.P_smooth[0];
    symmetrize(P0);
    P0.bottomRightCorner(traj.p, traj.p) *= scale;
    return P0;
}

CostVector compute_costs(const FilterTrajectory& traj, const ModelDefinition& model,
                         const Dataset& data, const Matrix& Q, const Matrix& R) {
    require_smoothed(traj, "compute_costs");
    const Eigen::Index N = traj.samples();
    const int n = traj.n;
    const int m = traj.m;
    CostVector c;

    const double log2pi = std::log(2.0 * std::numbers::pi);

    // Measurement-side costs over the update steps k = 1..N-1.
    double j1 = 0, j2 = 0, j3 = 0, j5 = 0;
    Eigen::Index n1 = 0, n2 = 0, n3 = 0;
    Vector sbar = Vector::Zero(m);
    for (Eigen::Index k = 1; k < N; ++k) {
        const Vector& nu = traj.innovation[k];
        Matrix S = traj.H_prior[k] * traj.P_prior[k] * traj.H_prior[k].transpose() + R;
        symmetrize(S);
        Eigen::LLT<Matrix> llt(S);
        if (llt.info() == Eigen::Success) {
            j1 += nu.dot(llt.solve(nu));
            double logdet = 0.0;
            for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
            j5 += logdet + m * log2pi + nu.dot(llt.solve(nu));
            ++n1;
        } else {
            ++c.skipped;
        }

        Matrix N2 = R - traj.H_post[k] * traj.P_post[k] * traj.H_post[k].transpose();
        symmetrize(N2);
        Eigen::LDLT<Matrix> l2(N2);
        if (l2.info() == Eigen::Success && l2.vectorD().cwiseAbs().minCoeff() > 1e-300) {
            if (l2.vectorD().minCoeff() < 0.0) ++c.j2_indefinite;
            j2 += traj.resid_filt[k].dot(l2.solve(traj.resid_filt[k]));
            ++n2;
        } else {
            ++c.skipped;
        }

        Matrix N3 = R - traj.H_smooth[k] * traj.P_smooth[k] * traj.H_smooth[k].transpose();
        symmetrize(N3);
        Eigen::LDLT<Matrix> l3(N3);
        if (l3.info() == Eigen::Success && l3.vectorD().cwiseAbs().minCoeff() > 1e-300) {
            if (l3.vectorD().minCoeff() < 0.0) ++c.j3_indefinite;
            j3 += traj.resid_smooth[k].dot(l3.solve(traj.resid_smooth[k]));
            ++n3;
        } else {
            ++c.skipped;
        }
        sbar += traj.resid_smooth[k];
    }
    c.j1 = n1 > 0 ? j1 / static_cast<double>(n1) : 0.0;
    c.j2 = n2 > 0 ? j2 / static_cast<double>(n2) : 0.0;
    c.j3 = n3 > 0 ? j3 / static_cast<double>(n3) : 0.0;
    c.j5 = n1 > 0 ? 0.5 * j5 / static_cast<double>(n1) : 0.0;

    sbar /= static_cast<double>(N - 1);
    {
        Eigen::LDLT<Matrix> lr(R);
        c.j4 = sbar.dot(lr.solve(sbar));
    }

    // State-side costs. J6 uses prior-based one-step samples, J7 the posterior
    // update increment, J8 smoothed samples against the smoothed process-noise
    // covariance (Q minus the smoother correction).
    Eigen::LDLT<Matrix> lq(Q);
    double j6 = 0, j7 = 0, j8 = 0;
    Eigen::Index n6 = 0, n7 = 0, n8 = 0;
    for (Eigen::Index k = 2; k < N; ++k) {
        AugmentedState st{traj.x_prior[k - 1].head(n), traj.x_prior[k - 1].tail(traj.p)};
        st = rk4_step(model, st, data.inputs, traj.time[k - 1], traj.time[k] - traj.time[k - 1]);
        const Vector w6 = traj.x_prior[k].head(n) - st.x;
        j6 += w6.dot(lq.solve(w6));
        ++n6;
    }
    for (Eigen::Index k = 1; k < N; ++k) {
        const Vector w7 = (traj.x_post[k] - traj.x_prior[k]).head(n);
        j7 += w7.dot(lq.solve(w7));
        ++n7;
    }
    for (Eigen::Index k = 0; k + 1 < N; ++k) {
        const Vector w8 = traj.x_smooth[k + 1].head(n) - traj.pred_from_smooth[k];
        const Matrix& Phi = traj.phi[k];
        const Matrix& C = traj.lag_cov[k];
        const Matrix corr = (traj.P_smooth[k + 1] + Phi * traj.P_smooth[k] * Phi.transpose() -
                             C * Phi.transpose() - Phi * C.transpose())
                                .topLeftCorner(n, n);
        Matrix N8 = Q - corr;
        symmetrize(N8);
        Eigen::LDLT<Matrix> l8(N8);
        if (l8.info() == Eigen::Success && l8.vectorD().cwiseAbs().minCoeff() > 1e-300) {
            if (l8.vectorD().minCoeff() < 0.0) ++c.j8_indefinite;
            j8 += w8.dot(l8.solve(w8));
            ++n8;
        } else {
            ++c.skipped;
        }
    }
    c.j6 = n6 > 0 ? j6 / static_cast<double>(n6) : 0.0;
    c.j7 = n7 > 0 ? j7 / static_cast<double>(n7) : 0.0;
    c.j8 = n8 > 0 ? j8 / static_cast<double>(n8) : 0.0;
    return c;
}

NoiseStatistics mt_estimate(const FilterTrajectory& traj, const ModelDefinition& model,
                            int window) {
    (void)model;
    const Eigen::Index N = traj.samples();
    if (window > N - 1) throw ConfigError("mt_estimate: window larger than the record");
    const Eigen::Index first = (window > 0) ? N - window : 1;
    const Eigen::Index cnt = N - first;
    if (cnt < 2) throw DataError("mt_estimate: not enough update steps");
    const int n = traj.n;
    const int m = traj.m;

    NoiseStatistics out;
    out.method = Method::MT;

    Vector nubar = Vector::Zero(m);
    for (Eigen::Index k = first; k < N; ++k) nubar += traj.innovation[k];
    nubar /= static_cast<double>(cnt);

    Matrix Rs = Matrix::Zero(m, m);
    Matrix Rcorr = Matrix::Zero(m, m);
    for (Eigen::Index k = first; k < N; ++k) {
        const Vector d = traj.innovation[k] - nubar;
        Rs += d * d.transpose();
        Rcorr += traj.H_prior[k] * traj.P_prior[k] * traj.H_prior[k].transpose();
    }
    Matrix R = Rs / static_cast<double>(cnt - 1) - Rcorr / static_cast<double>(cnt);
    symmetrize(R);
    out.R = clamp_diagonal(R, true, "R (MT)", &out.flags);

    // State-correction samples d_k = x+_k - x-_k; the covariance correction
    // uses the posterior at both ends (Phi P+_{k-1} Phi^T - P+_k), which makes
    // the estimator unbiased for Q when the filter is consistent.
    Vector dbar = Vector::Zero(n);
    for (Eigen::Index k = first; k < N; ++k)
        dbar += (traj.x_post[k] - traj.x_prior[k]).head(n);
    dbar /= static_cast<double>(cnt);

    Matrix Qs = Matrix::Zero(n, n);
    Matrix Qcorr = Matrix::Zero(n, n);
    for (Eigen::Index k = first; k < N; ++k) {
        const Vector d = (traj.x_post[k] - traj.x_prior[k]).head(n) - dbar;
        Qs += d * d.transpose();
        const Matrix prop = traj.phi[k - 1] * traj.P_post[k - 1] * traj.phi[k - 1].transpose();
        Qcorr += (prop - traj.P_post[k]).topLeftCorner(n, n);
    }
    Matrix Q = Qs / static_cast<double>(cnt - 1) - Qcorr / static_cast<double>(cnt);
    symmetrize(Q);
    out.Q = clamp_diagonal(Q, true, "Q (MT)", &out.flags);
    return out;
}

NoiseStatistics ms_estimate(const FilterTrajectory& traj, const ModelDefinition& model,
                            const Matrix& R_run) {
    (void)model;
    const Eigen::Index N = traj.samples();
    if (N < 3) throw DataError("ms_estimate: not enough update steps");
    const int n = traj.n;
    const int m = traj.m;

    NoiseStatistics out;
    out.method = Method::MS;

    Matrix Cnu = Matrix::Zero(m, m);
    Matrix Rcorr = Matrix::Zero(m, m);
    for (Eigen::Index k = 1; k < N; ++k) {
        Cnu += traj.innovation[k] * traj.innovation[k].transpose();
        Rcorr += traj.H_prior[k] * traj.P_prior[k] * traj.H_prior[k].transpose();
    }
    Cnu /= static_cast<double>(N - 1);
    Rcorr /= static_cast<double>(N - 1);

    Matrix R = Cnu - Rcorr;
    symmetrize(R);
    out.R = clamp_diagonal(R, true, "R (MS)", &out.flags);

    // Terminal gain rebuilt from the stored prior covariance.
    const Matrix& H = traj.H_prior[N - 1];
    Matrix S = H * traj.P_prior[N - 1] * H.transpose() + R_run;
    symmetrize(S);
    Eigen::LDLT<Matrix> ldlt(S);
    const Matrix K = ldlt.solve(H * traj.P_prior[N - 1]).transpose();  // P- H^T S^-1

    Matrix Q = (K * Cnu * K.transpose()).topLeftCorner(n, n);
    symmetrize(Q);
    out.Q = clamp_diagonal(Q, true, "Q (MS)", &out.flags);
    return out;
}

// ---------------------------------------------------------------------------
// Outer loop
// ---------------------------------------------------------------------------

namespace {

// Variance of the k-th difference of a column, normalized by the squared
// coefficient sum so white noise of variance R maps back to R.
double diff_variance(const Vector& col, int order) {
    Vector d = col;
    double norm = 0.0;
    for (int o = 0; o < order; ++o) d = Vector(d.tail(d.size() - 1) - d.head(d.size() - 1));
    // squared binomial coefficient sum: order 1 -> 2, order 2 -> 6
    norm = (order == 1) ? 2.0 : 6.0;
    const double mean = d.mean();
    return (d.array() - mean).square().sum() / static_cast<double>(d.size() - 1) / norm;
}

// R seed: half the first-difference variance per channel (for pure noise,
// var(dz) = 2R; the smooth signal inflates it, which only costs iterations).
Vector default_r_seed(const Dataset& data) {
    const int m = static_cast<int>(data.z.cols());
    Vector r(m);
    for (int j = 0; j < m; ++j)
        r[j] = std::max(diff_variance(data.z.col(j), 1), kVarianceFloor);
    return r;
}

Vector seed_x0(const ModelDefinition& model, const Dataset& data) {
    Vector x0 = Vector::Zero(model.n_states);
    for (int i = 0; i < model.n_states; ++i) {
        const int zi = model.state_meas_index.empty() ? -1 : model.state_meas_index[i];
        if (zi >= 0) x0[i] = data.z(0, zi);
    }
    return x0;
}


Matrix seed_P0(const ModelDefinition& model, const RecipeConfig& cfg, const Vector& r_seed,
               const Vector& theta0) {
    const int n = model.n_states;
    const int p = model.n_params;
    Matrix P0 = Matrix::Zero(n + p, n + p);
    for (int i = 0; i < n; ++i) {
        const int zi = model.state_meas_index.empty() ? -1 : model.state_meas_index[i];
        P0(i, i) = (zi >= 0) ? cfg.p0_state_var_scale * r_seed[zi] : 1e-4;
    }
    for (int i = 0; i < p; ++i) {
        const double sigma =
            std::max(cfg.p0_param_rel_sigma * std::abs(theta0[i]), cfg.p0_param_min_sigma);
        P0(n + i, n + i) = sigma * sigma;
    }
    // The MT/MS parameter-block scale-up applies to the per-iteration P0
    // resets, not to this seed; a scaled seed makes the first pass unstable.
    return P0;
}

double rel_change(const Vector& now, const Vector& prev, double floor_abs) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < now.size(); ++i) {
        const double denom = std::max(std::abs(prev[i]), floor_abs);
        worst = std::max(worst, std::abs(now[i] - prev[i]) / denom);
    }
    return worst;
}

}  // namespace

EstimationReport run_estimation(const ModelDefinition& model, const Dataset& data,
                                const RecipeConfig& config) {
    data.validate(model);
    const int n = model.n_states;
    const int p = model.n_params;

    Vector theta0 = config.theta0.size() ? config.theta0 : model.theta_initial;
    if (theta0.size() != p) throw ConfigError("run_estimation: theta0 dimension mismatch");
    const Vector x0 = config.x0.size() ? config.x0 : seed_x0(model, data);

    const Vector r_seed = config.r0_diag.size() ? config.r0_diag : default_r_seed(data);
    Matrix R = config.R0_full.size() ? config.R0_full : Matrix(r_seed.asDiagonal());
    Matrix Q = config.Q0_full.size()
                   ? config.Q0_full
                   : (config.q0_diag.size() ? Matrix(config.q0_diag.asDiagonal())
                                            : Matrix(1e-8 * Matrix::Identity(n, n)));
    Matrix P0 = config.P0_seed.size() ? config.P0_seed : seed_P0(model, config, r_seed, theta0);

    EstimationReport rep;
    rep.model_name = model.name;
    rep.method = config.method;
    rep.param_names = model.param_names;
    rep.state_names = model.state_names;
    rep.meas_names = model.meas_names;

    FilterTrajectory traj;
    Matrix Q_in, R_in, P0_in;
    Vector theta_in;

    Vector theta_prev;
    Vector j_prev;
    int quiet = 0;
    bool converged = false;
    int it = 0;

    for (it = 0; it < config.max_iterations; ++it) {
        theta_in = theta0;
        Q_in = Q;
        R_in = R;
        P0_in = P0;
        try {
            traj = ekf_forward(model, data, theta0, x0, P0, Q, R);
            rts_smooth(traj, model, data);
        } catch (const DivergenceError& e) {
            throw DivergenceError("iteration " + std::to_string(it + 1) + ": " + e.what(),
                                  e.step);
        }

        const CostVector costs = compute_costs(traj, model, data, Q, R);
        rep.cost_history.push_back(costs);
        rep.theta0_history.push_back(theta0);

        // Statistics updates for the next pass.
        const Vector theta_next = traj.x_post[traj.samples() - 1].tail(p);
        P0 = update_P0(traj, config.resolved_p0_scale());
        switch (config.method) {
            case Method::Reference: {
                R = estimate_R_smoothed(traj, config.diagonal_qr);
                Q = estimate_Q_smoothed(traj, config.em_cross_term, config.diagonal_qr,
                                        &rep.flags);
                for (Eigen::Index i = 0; i < R.rows(); ++i)
                    R(i, i) = std::max(R(i, i), kVarianceFloor);
                break;
            }
            case Method::MT: {
                NoiseStatistics ns = mt_estimate(traj, model, config.mt_window);
                Q = ns.Q;
                R = ns.R;
                for (auto& f : ns.flags) rep.flags.push_back(f);
                break;
            }
            case Method::MS: {
                NoiseStatistics ns = ms_estimate(traj, model, R_in);
                Q = ns.Q;
                R = ns.R;
                for (auto& f : ns.flags) rep.flags.push_back(f);
                break;
            }
        }

        // Convergence: theta and the tuning costs plateau together.
        Vector jnow(4);
        jnow << costs.j1, costs.j3, costs.j6, costs.j8;
        if (it > 0) {
            const double dtheta = rel_change(theta_next, theta_prev, 0.01);
            const double dj = rel_change(jnow, j_prev, 1e-9);
            quiet = (dtheta < config.tolerance && dj < config.tolerance) ? quiet + 1 : 0;
        }
        theta_prev = theta_next;
        j_prev = jnow;
        theta0 = theta_next;

        if (quiet >= config.plateau_iters) {
            converged = true;
            ++it;
            break;
        }
    }

    rep.iterations_run = static_cast<int>(rep.cost_history.size());
    rep.converged = converged;

    // Final estimates and trajectory-derived diagnostics.
    const Eigen::Index N = traj.samples();
    rep.theta_hat = traj.x_post[N - 1].tail(p);
    const Matrix P_theta = traj.P_post[N - 1].bottomRightCorner(p, p);
    rep.sigma_theta = P_theta.diagonal().cwiseMax(0.0).cwiseSqrt();
    rep.pct_crb = crb_percent(rep.theta_hat, P_theta);
    rep.corr_100 = correlation_matrix(P_theta, model.param_names);
    rep.Q = Q;
    rep.R = R;
    rep.P0 = P0;
    rep.theta0_in = theta_in;
    rep.x0_in = x0;
    rep.P0_in = P0_in;
    rep.Q_in = Q_in;
    rep.R_in = R_in;

    rep.residues = residue_series(traj, R_in);
    if (rep.residues.filt_neg_count > 0)
        rep.flags.push_back("filtered-residue bound variance negative at " +
                            std::to_string(rep.residues.filt_neg_count) + " entries");
    if (rep.residues.smooth_neg_count > 0)
        rep.flags.push_back("smoothed-residue bound variance negative at " +
                            std::to_string(rep.residues.smooth_neg_count) + " entries");
    {
        const CostVector& last = rep.cost_history.back();
        if (last.j2_indefinite > 0)
            rep.flags.push_back("J2 normalizer indefinite at " +
                                std::to_string(last.j2_indefinite) + " steps (final pass)");
        if (last.skipped > 0)
            rep.flags.push_back("cost evaluation skipped " + std::to_string(last.skipped) +
                                " singular steps (final pass)");
    }

    rep.theta_trajectory.resize(p, N);
    rep.xd = traj.xd;
    rep.x_prior.resize(n, N);
    rep.x_post.resize(n, N);
    rep.x_smooth.resize(n, N);
    for (Eigen::Index k = 0; k < N; ++k) {
        rep.theta_trajectory.col(k) = traj.x_post[k].tail(p);
        rep.x_prior.col(k) = traj.x_prior[k].head(n);
        rep.x_post.col(k) = traj.x_post[k].head(n);
        rep.x_smooth.col(k) = traj.x_smooth[k].head(n);
    }
    rep.z = traj.z.transpose();
    rep.time = traj.time;
    return rep;
}

EstimationReport reference_recipe(const ModelDefinition& model, const Dataset& data,
                                  RecipeConfig config) {
    config.method = Method::Reference;
    return run_estimation(model, data, config);
}

}  // namespace rrrekf
