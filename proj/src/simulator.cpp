#include "rrrekf/simulator.hpp"

#include <cmath>
#include <random>

#include "rrrekf/numerics.hpp"

namespace rrrekf {

void SimConfig::validate(const ModelDefinition& model) const {
    if (theta_true.size() != model.n_params)
        throw ConfigError("sim config: theta_true dimension mismatch");
    if (q_diag.size() != model.n_states || r_diag.size() != model.n_meas)
        throw ConfigError("sim config: q/r diagonal dimension mismatch");
    if (q_diag.minCoeff() < 0.0 || r_diag.minCoeff() < 0.0)
        throw ConfigError("sim config: noise variances must be >= 0");
    if (x0.size() != model.n_states) throw ConfigError("sim config: x0 dimension mismatch");
    if (!(dt > 0.0)) throw ConfigError("sim config: dt must be positive");
    if (n_samples < 10) throw ConfigError("sim config: need at least 10 samples");
    if (inputs.size() != model.input_names.size())
        throw ConfigError("sim config: one input shape per model input channel required");
    for (const auto& shape : inputs) {
        for (const auto& d : shape.doublets) {
            if (!(0.0 <= d.t_start && d.t_start < d.t_up && d.t_up < d.t_down))
                throw ConfigError("sim config: doublet needs t_start < t_up < t_down");
        }
    }
}

namespace {

double eval_shape(const InputShape& shape, double t, const Vector& x) {
    switch (shape.kind) {
        case InputShape::Kind::Constant:
            return shape.value;
        case InputShape::Kind::Doublets: {
            double v = shape.value;
            for (const auto& d : shape.doublets) {
                if (t >= d.t_start && t < d.t_up)
                    v += d.amplitude;
                else if (t >= d.t_up && t < d.t_down)
                    v -= d.amplitude;
            }
            return v;
        }
        case InputShape::Kind::Series:
            return interpolate_channel(shape.series, t);
        case InputShape::Kind::StateFeedback:
            return x[shape.state_index];
    }
    return 0.0;
}

}  // namespace

SimResult simulate_dataset(const ModelDefinition& model, const SimConfig& config) {
    config.validate(model);
    const int n = model.n_states;
    const int m = model.n_meas;
    const Eigen::Index N = config.n_samples;
    const double dt = config.dt;
    const Vector time_grid = Vector::LinSpaced(N, 0.0, dt * static_cast<double>(N - 1));

    // Sample every non-feedback shape onto the tick grid and interpolate it
    // during integration, exactly the way the filter will consume the emitted
    // channels. Evaluating shapes continuously instead would make the truth
    // inconsistent with the recorded data at doublet edges.
    std::vector<InputShape> shapes = config.inputs;
    for (auto& shape : shapes) {
        if (shape.kind == InputShape::Kind::StateFeedback) continue;
        ChannelSeries s;
        s.name = "sampled";
        s.times = time_grid;
        s.values.resize(N);
        for (Eigen::Index k = 0; k < N; ++k)
            s.values[k] = eval_shape(shape, time_grid[k], Vector());
        shape.kind = InputShape::Kind::Series;
        shape.series = std::move(s);
    }

    auto inputs_at = [&](double t, const Vector& x) {
        Vector u(static_cast<Eigen::Index>(shapes.size()));
        for (size_t i = 0; i < shapes.size(); ++i)
            u[static_cast<Eigen::Index>(i)] = eval_shape(shapes[i], t, x);
        return u;
    };

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Vector q_sd = config.q_diag.cwiseSqrt();
    const Vector r_sd = config.r_diag.cwiseSqrt();

    TruthRecord truth;
    truth.theta = config.theta_true;
    truth.x_true.resize(n, N);
    truth.w = Matrix::Zero(n, N - 1);
    truth.v = Matrix::Zero(m, N);

    Matrix z(N, m);
    const Vector& time = time_grid;

    Vector x = config.x0;
    for (Eigen::Index k = 0; k < N; ++k) {
        const double t = time[k];
        if (!x.allFinite())
            throw DivergenceError("simulate_dataset: non-finite state at step " +
                                      std::to_string(k),
                                  static_cast<int>(k));
        truth.x_true.col(k) = x;

        const Vector u = inputs_at(t, x);
        const Vector xdot = model.dynamics(x, config.theta_true, u);
        Vector v(m);
        for (int i = 0; i < m; ++i) v[i] = r_sd[i] * gauss(rng);
        truth.v.col(k) = v;
        z.row(k) = (model.measurement(x, xdot, config.theta_true, u) + v).transpose();

        if (k + 1 < N) {
            auto deriv = [&](const Vector& xi, double ti) {
                return model.dynamics(xi, config.theta_true, inputs_at(ti, xi));
            };
            x = rk4_step(deriv, x, t, dt);
            Vector w(n);
            for (int i = 0; i < n; ++i) w[i] = q_sd[i] * gauss(rng);
            truth.w.col(k) = w;
            x += w;
        }
    }

    // Emit channels the way the CSV format stores them: a channel that shares
    // its name with a measurement carries the noisy measurement samples.
    Dataset ds;
    ds.time = time;
    ds.z = z;
    ds.inputs.series.resize(config.inputs.size());
    for (size_t i = 0; i < config.inputs.size(); ++i) {
        ChannelSeries s;
        s.name = model.input_names[i];
        s.times = time;
        int zi = -1;
        for (int j = 0; j < m; ++j)
            if (model.meas_names[j] == s.name) zi = j;
        if (zi >= 0) {
            s.values = z.col(zi);
        } else {
            s.values.resize(N);
            for (Eigen::Index k = 0; k < N; ++k)
                s.values[k] = eval_shape(shapes[i], time[k], truth.x_true.col(k));
        }
        ds.inputs.series[i] = s;
    }
    return SimResult{std::move(ds), std::move(truth)};
}

ChannelSeries doublet_input(const std::string& name, double amplitude_deg, double t_start,
                            double t_up, double t_down, double dt, double span) {
    if (!(0.0 <= t_start && t_start < t_up && t_up < t_down && t_down <= span))
        throw ConfigError("doublet_input: need 0 <= t_start < t_up < t_down <= span");
    const double amp = amplitude_deg * kDegToRad;
    const Eigen::Index N = static_cast<Eigen::Index>(std::floor(span / dt)) + 1;
    ChannelSeries s;
    s.name = name;
    s.times = Vector::LinSpaced(N, 0.0, dt * static_cast<double>(N - 1));
    s.values.resize(N);
    for (Eigen::Index k = 0; k < N; ++k) {
        const double t = s.times[k];
        if (t >= t_start && t < t_up)
            s.values[k] = amp;
        else if (t >= t_up && t < t_down)
            s.values[k] = -amp;
        else
            s.values[k] = 0.0;
    }
    return s;
}

NominalEstimates nominal_estimates(CaseId case_id) {
    NominalEstimates e;
    switch (case_id) {
        case CaseId::Case1Longitudinal:
            e.theta = Vector(13);
            e.theta << 4.6469, 0.0555, 0.0162, -0.5468, -19.8027, -1.1229, -0.0495, 0.0007,
                0.2195, -0.1398, -3.2088, -0.0651, -0.0155;
            e.r_diag = Vector(5);
            e.r_diag << 0.49e-6, 0.04e-6, 0.40e-6, 15.98e-6, 17.70e-6;
            e.q_diag = Vector(3);
            e.q_diag << 0.134e-6, 2.287e-6, 1.204e-6;
            break;
        case CaseId::Case2Longitudinal:
            e.theta = Vector(10);
            e.theta << 4.9235, 0.1554, 0.2409, -0.5293, -11.8596, -6.8959, -0.9731, -0.0425,
                0.0003, 0.2538;
            e.r_diag = Vector(4);
            e.r_diag << 1.241e-6, 0.051e-6, 0.460e-6, 5.668e-6;
            e.q_diag = Vector(3);
            e.q_diag << 0.180e-6, 2.954e-6, 2.646e-6;
            break;
        case CaseId::Case3Lateral:
            e.theta = Vector(20);
            e.theta << -0.4579, 0.1040, -0.0143, -0.0168, -0.3100, 0.0740, 0.0557, 0.0072,
                -0.0020, 0.0018, 0.0656, -0.0429, -0.0880, 0.0004, -0.0478, 0.0067, -0.0259,
                -0.2828, 0.2224, 0.0384;
            e.r_diag = Vector(5);
            e.r_diag << 0.0871e-6, 0.0623e-6, 0.2255e-6, 0.0200e-6, 43.8064e-6;
            e.q_diag = Vector(4);
            e.q_diag << 4.2163e-6, 5.1340e-6, 4.9426e-6, 1.4324e-6;
            break;
    }
    return e;
}

namespace {

InputShape constant_shape(double v) {
    InputShape s;
    s.kind = InputShape::Kind::Constant;
    s.value = v;
    return s;
}

InputShape feedback_shape(int state_index) {
    InputShape s;
    s.kind = InputShape::Kind::StateFeedback;
    s.state_index = state_index;
    return s;
}

InputShape doublet_shape(double baseline, std::initializer_list<DoubletSpec> pulses) {
    InputShape s;
    s.kind = InputShape::Kind::Doublets;
    s.value = baseline;
    s.doublets = pulses;
    return s;
}

}  // namespace

SimConfig default_sim_config(CaseId case_id, const ModelDefinition& model) {
    const NominalEstimates nom = nominal_estimates(case_id);
    SimConfig cfg;
    cfg.theta_true = nom.theta;
    cfg.q_diag = nom.q_diag;
    cfg.r_diag = nom.r_diag;
    cfg.dt = 0.02;
    cfg.n_samples = 2000;

    const double a2 = 2.0 * kDegToRad;
    // Case-1 keeps the elevator excitation gentle: the weakly identified
    // derivatives (theta_0, C_A_de) stay weak, as they are on the real record.
    const double a04 = 0.4 * kDegToRad;
    switch (case_id) {
        case CaseId::Case1Longitudinal: {
            cfg.x0 = Vector(3);
            cfg.x0 << 0.031, 0.0, 0.031;
            cfg.inputs = {
                doublet_shape(-0.0592, {{a04, 1.0, 2.0, 3.0},
                                        {a04, 20.0, 21.0, 22.0}}),  // de around trim
                constant_shape(0.0),                                // phi
                constant_shape(0.0),                                // beta
                constant_shape(0.0),                                // p
                constant_shape(0.0),                                // r
                feedback_shape(0),                                  // alpha
            };
            break;
        }
        case CaseId::Case2Longitudinal: {
            cfg.x0 = Vector(3);
            cfg.x0 << 0.05, 0.0, 0.05;
            cfg.inputs = {
                doublet_shape(-0.0709, {{a2, 1.0, 2.0, 3.0}, {a2, 15.0, 16.0, 17.0}}),  // de
                constant_shape(0.0),    // phi
                constant_shape(0.0),    // beta
                constant_shape(425.0),  // vt
                constant_shape(0.0),    // p
                constant_shape(0.0),    // r
                feedback_shape(0),      // alpha
            };
            break;
        }
        case CaseId::Case3Lateral: {
            cfg.x0 = Vector::Zero(4);
            cfg.inputs = {
                doublet_shape(0.0, {{a2, 1.0, 2.0, 3.0}, {a2, 15.0, 16.0, 17.0}}),  // da
                doublet_shape(0.0, {{a2, 8.0, 9.0, 10.0}, {a2, 22.0, 23.0, 24.0}}),  // dr
                constant_shape(0.02),  // theta
                constant_shape(0.0),   // q
                constant_shape(0.05),  // alpha
            };
            break;
        }
    }
    (void)model;
    return cfg;
}

}  // namespace rrrekf
