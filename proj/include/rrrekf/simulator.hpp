#pragma once

#include <cstdint>
#include <vector>

#include "rrrekf/aircraft_models.hpp"
#include "rrrekf/dataset.hpp"

namespace rrrekf {

/// Up-then-down square pulse: +A on [t_start, t_up), -A on [t_up, t_down).
struct DoubletSpec {
    double amplitude = 0.0;  // radians
    double t_start = 0.0, t_up = 0.0, t_down = 0.0;
};

/// How one exogenous input channel behaves during simulation.
struct InputShape {
    enum class Kind { Constant, Doublets, Series, StateFeedback };
    Kind kind = Kind::Constant;
    double value = 0.0;  // Constant level; also the baseline under Doublets
    std::vector<DoubletSpec> doublets;
    ChannelSeries series;
    int state_index = -1;  // StateFeedback: mirror this true state
};

struct SimConfig {
    Vector theta_true;
    Vector q_diag, r_diag;  // injected process / measurement noise variances
    Vector x0;
    double dt = 0.02;
    int n_samples = 2000;
    std::uint64_t seed = 1;
    std::vector<InputShape> inputs;  // one per model input channel

    void validate(const ModelDefinition& model) const;
};

struct TruthRecord {
    Matrix x_true;  // n x N
    Matrix w;       // n x (N-1) injected process noise
    Matrix v;       // m x N injected measurement noise
    Vector theta;
};

struct SimResult {
    Dataset dataset;
    TruthRecord truth;
};

/**
 * @brief Generate a synthetic dataset: RK4 truth with additive discrete
 * process noise per step, measurements with additive noise. Deterministic
 * for a fixed seed. Input channels named like a measurement channel take the
 * noisy measurement values in the emitted dataset (one column serves both
 * roles, as in the ingested CSV format).
 */
SimResult simulate_dataset(const ModelDefinition& model, const SimConfig& config);

/// Doublet channel sampled at dt over [0, span]; amplitude in degrees.
ChannelSeries doublet_input(const std::string& name, double amplitude_deg, double t_start,
                            double t_up, double t_down, double dt, double span);

/// Representative converged estimates per case (theta, diag Q, diag R);
/// simulation defaults and regression fixtures.
struct NominalEstimates {
    Vector theta;
    Vector q_diag;
    Vector r_diag;
};
NominalEstimates nominal_estimates(CaseId case_id);

/// Ready-to-run simulation setup for a built-in case: nominal estimates as
/// truth, near-trim initial state, doublet excitation on the controls.
SimConfig default_sim_config(CaseId case_id, const ModelDefinition& model);

}  // namespace rrrekf
