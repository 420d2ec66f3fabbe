#include "rrrekf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rrrekf {

Vector crb_percent(const Vector& theta, const Matrix& P_theta) {
    if (P_theta.rows() != theta.size() || P_theta.cols() != theta.size())
        throw NumericError("crb_percent: dimension mismatch");
    Vector out(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double var = std::max(P_theta(i, i), 0.0);
        if (theta[i] == 0.0)
            out[i] = std::numeric_limits<double>::infinity();
        else
            out[i] = 100.0 * std::sqrt(var) / std::abs(theta[i]);
    }
    return out;
}

Eigen::MatrixXi correlation_matrix(const Matrix& P_theta,
                                   const std::vector<std::string>& names) {
    const Eigen::Index p = P_theta.rows();
    Vector sd(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(P_theta(i, i) > 0.0)) {
            const std::string who =
                (static_cast<size_t>(i) < names.size()) ? names[i] : std::to_string(i);
            throw NumericError("correlation_matrix: zero variance for parameter " + who);
        }
        sd[i] = std::sqrt(P_theta(i, i));
    }
    Eigen::MatrixXi out(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        out(i, i) = 100;
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double c = P_theta(i, j) / (sd[i] * sd[j]);
            const int v = static_cast<int>(std::round(100.0 * std::clamp(c, -1.0, 1.0)));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

namespace {

// rho_l = mean over N-l of x_k x_{k+l}, normalized by the lag-0 mean square.
Matrix autocorr_rows(const Matrix& series, Eigen::Index lags) {
    const Eigen::Index rows = series.rows();
    const Eigen::Index N = series.cols();
    Matrix out = Matrix::Zero(rows, lags + 1);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double ms = series.row(r).squaredNorm() / static_cast<double>(N);
        for (Eigen::Index l = 0; l <= lags; ++l) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k + l < N; ++k) acc += series(r, k) * series(r, k + l);
            acc /= static_cast<double>(N - l);
            out(r, l) = (ms > 0.0) ? acc / ms : (l == 0 ? 1.0 : 0.0);
        }
    }
    return out;
}

}  // namespace

NoiseSamples noise_samples(const FilterTrajectory& traj) {
    if (!traj.smoothed) throw NumericError("noise_samples: smoothing not done");
    const Eigen::Index N = traj.samples();
    const int n = traj.n;
    const int m = traj.m;

    NoiseSamples out;
    out.v.resize(m, N);
    for (Eigen::Index k = 0; k < N; ++k) out.v.col(k) = traj.resid_smooth[k];
    out.w.resize(n, N - 1);
    for (Eigen::Index k = 0; k + 1 < N; ++k)
        out.w.col(k) = traj.x_smooth[k + 1].head(n) - traj.pred_from_smooth[k];

    const Eigen::Index lags_v = N / 10;
    const Eigen::Index lags_w = (N - 1) / 10;
    out.v_autocorr = autocorr_rows(out.v, lags_v);
    out.w_autocorr = autocorr_rows(out.w, lags_w);
    return out;
}

std::vector<WeakParameter> weak_parameter_screen(const EstimationReport& report,
                                                 double pct_crb_threshold) {
    std::vector<WeakParameter> out;
    for (Eigen::Index i = 0; i < report.pct_crb.size(); ++i) {
        if (report.pct_crb[i] > pct_crb_threshold) {
            WeakParameter w;
            w.index = static_cast<int>(i);
            w.name = (static_cast<size_t>(i) < report.param_names.size())
                         ? report.param_names[i]
                         : std::to_string(i);
            w.pct_crb = report.pct_crb[i];
            out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const WeakParameter& a, const WeakParameter& b) {
                  return a.pct_crb > b.pct_crb;
              });
    return out;
}

}  // namespace rrrekf
