#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rrrekf/recipe.hpp"
#include "rrrekf/report_io.hpp"
#include "rrrekf/simulator.hpp"

namespace py = pybind11;
using namespace rrrekf;

namespace {

Matrix costs_as_matrix(const EstimationReport& rep) {
    Matrix out(static_cast<Eigen::Index>(rep.cost_history.size()), 8);
    for (size_t i = 0; i < rep.cost_history.size(); ++i) {
        const auto v = rep.cost_history[i].values();
        for (int j = 0; j < 8; ++j) out(static_cast<Eigen::Index>(i), j) = v[static_cast<size_t>(j)];
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive EKF tuning for aircraft parameter estimation";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");
    py::register_exception<DivergenceError>(m, "DivergenceError");

    py::class_<ModelDefinition>(m, "Model")
        .def_readonly("name", &ModelDefinition::name)
        .def_readonly("n_states", &ModelDefinition::n_states)
        .def_readonly("n_meas", &ModelDefinition::n_meas)
        .def_readonly("n_params", &ModelDefinition::n_params)
        .def_readonly("state_names", &ModelDefinition::state_names)
        .def_readonly("meas_names", &ModelDefinition::meas_names)
        .def_readonly("param_names", &ModelDefinition::param_names)
        .def_readonly("input_names", &ModelDefinition::input_names)
        .def_readonly("theta_initial", &ModelDefinition::theta_initial)
        .def("_has_fns",
             [](const ModelDefinition& self) {
                 return std::make_pair(static_cast<bool>(self.dynamics),
                                       static_cast<bool>(self.measurement));
             })
        .def(
            "dynamics",
            [](const ModelDefinition& self, const Vector& x, const Vector& theta,
               const Vector& u) { return self.dynamics(x, theta, u); },
            py::arg("x"), py::arg("theta"), py::arg("u"))
        .def(
            "measurement",
            [](const ModelDefinition& self, const Vector& x, const Vector& theta,
               const Vector& u) { return self.eval_measurement(x, theta, u); },
            py::arg("x"), py::arg("theta"), py::arg("u"),
            "Measurement prediction; the state derivative is computed internally.");

    m.def(
        "builtin_model",
        [](int case_number, double qbar, double vref, bool roll_cbar, double cbar) {
            ModelOverrides ov;
            ov.qbar = qbar;
            ov.vref = vref;
            ov.roll_cbar = roll_cbar;
            ov.cbar = cbar;
            return builtin_model(parse_case(case_number), ov);
        },
        py::arg("case_number"), py::arg("qbar") = 0.0, py::arg("vref") = 0.0,
        py::arg("roll_cbar") = false, py::arg("cbar") = 0.0,
        "One of the three built-in flight-test models (1, 2 or 3).");

    py::class_<NominalEstimates>(m, "NominalEstimates")
        .def_readonly("theta", &NominalEstimates::theta)
        .def_readonly("q_diag", &NominalEstimates::q_diag)
        .def_readonly("r_diag", &NominalEstimates::r_diag);
    m.def(
        "nominal_estimates",
        [](int case_number) { return nominal_estimates(parse_case(case_number)); },
        py::arg("case_number"),
        "Representative converged estimates used as simulation defaults.");

    py::class_<SimConfig>(m, "SimConfig")
        .def_readwrite("theta_true", &SimConfig::theta_true)
        .def_readwrite("q_diag", &SimConfig::q_diag)
        .def_readwrite("r_diag", &SimConfig::r_diag)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("n_samples", &SimConfig::n_samples)
        .def_readwrite("seed", &SimConfig::seed);
    m.def(
        "default_sim_config",
        [](int case_number, const ModelDefinition& model) {
            return default_sim_config(parse_case(case_number), model);
        },
        py::arg("case_number"), py::arg("model"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("time", &Dataset::time)
        .def_readonly("z", &Dataset::z)
        .def("channel_names",
             [](const Dataset& self) {
                 std::vector<std::string> names;
                 for (const auto& s : self.inputs.series) names.push_back(s.name);
                 return names;
             })
        .def("channel", [](const Dataset& self, const std::string& name) {
            for (const auto& s : self.inputs.series)
                if (s.name == name) return s.values;
            throw DataError("no channel named '" + name + "'");
        });

    py::class_<TruthRecord>(m, "TruthRecord")
        .def_readonly("x_true", &TruthRecord::x_true)
        .def_readonly("w", &TruthRecord::w)
        .def_readonly("v", &TruthRecord::v)
        .def_readonly("theta", &TruthRecord::theta);

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("dataset", &SimResult::dataset)
        .def_readonly("truth", &SimResult::truth);

    m.def("simulate_dataset", &simulate_dataset, py::arg("model"), py::arg("config"),
          "Generate a synthetic dataset with additive process/measurement noise.");

    m.def(
        "read_dataset",
        [](const ModelDefinition& model, const std::string& path) {
            return read_dataset(model, path);
        },
        py::arg("model"), py::arg("path"));
    m.def(
        "write_dataset",
        [](const ModelDefinition& model, const Dataset& data, const std::string& path) {
            write_dataset(model, data, path);
        },
        py::arg("model"), py::arg("dataset"), py::arg("path"));

    py::class_<RecipeConfig>(m, "RecipeConfig")
        .def(py::init<>())
        .def_property(
            "method",
            [](const RecipeConfig& self) { return method_name(self.method); },
            [](RecipeConfig& self, const std::string& v) { self.method = parse_method(v); })
        .def_readwrite("max_iterations", &RecipeConfig::max_iterations)
        .def_readwrite("tolerance", &RecipeConfig::tolerance)
        .def_readwrite("plateau_iters", &RecipeConfig::plateau_iters)
        .def_readwrite("p0_scale", &RecipeConfig::p0_scale)
        .def_readwrite("em_cross_term", &RecipeConfig::em_cross_term)
        .def_readwrite("diagonal_qr", &RecipeConfig::diagonal_qr)
        .def_readwrite("mt_window", &RecipeConfig::mt_window)
        .def_readwrite("theta0", &RecipeConfig::theta0)
        .def_readwrite("x0", &RecipeConfig::x0)
        .def_readwrite("q0_diag", &RecipeConfig::q0_diag)
        .def_readwrite("r0_diag", &RecipeConfig::r0_diag);

    py::class_<ResidueSeries>(m, "ResidueSeries")
        .def_readonly("innovation", &ResidueSeries::innovation)
        .def_readonly("filtered", &ResidueSeries::filtered)
        .def_readonly("smoothed", &ResidueSeries::smoothed)
        .def_readonly("bound_innovation", &ResidueSeries::bound_innov)
        .def_readonly("bound_filtered", &ResidueSeries::bound_filt)
        .def_readonly("bound_smoothed", &ResidueSeries::bound_smooth);

    py::class_<EstimationReport>(m, "EstimationReport")
        .def_readonly("model_name", &EstimationReport::model_name)
        .def_property_readonly(
            "method", [](const EstimationReport& self) { return method_name(self.method); })
        .def_readonly("iterations_run", &EstimationReport::iterations_run)
        .def_readonly("converged", &EstimationReport::converged)
        .def_readonly("theta", &EstimationReport::theta_hat)
        .def_readonly("sigma_theta", &EstimationReport::sigma_theta)
        .def_readonly("pct_crb", &EstimationReport::pct_crb)
        .def_readonly("corr_100", &EstimationReport::corr_100)
        .def_property_readonly("q_diag",
                               [](const EstimationReport& self) {
                                   return Vector(self.Q.diagonal());
                               })
        .def_property_readonly("r_diag",
                               [](const EstimationReport& self) {
                                   return Vector(self.R.diagonal());
                               })
        .def_property_readonly("costs", &costs_as_matrix,
                               "J1..J8 per iteration, one row each")
        .def_readonly("residues", &EstimationReport::residues)
        .def_readonly("theta_trajectory", &EstimationReport::theta_trajectory)
        .def_readonly("x_smooth", &EstimationReport::x_smooth)
        .def_readonly("xd", &EstimationReport::xd)
        .def_readonly("time", &EstimationReport::time)
        .def_readonly("flags", &EstimationReport::flags)
        .def_readonly("param_names", &EstimationReport::param_names);

    m.def("run_estimation", &run_estimation, py::arg("model"), py::arg("dataset"),
          py::arg("config"),
          "Iterative tuning of theta0, P0, Q, R across filter-smoother passes.");
    m.def(
        "reference_recipe",
        [](const ModelDefinition& model, const Dataset& data, RecipeConfig cfg) {
            return reference_recipe(model, data, cfg);
        },
        py::arg("model"), py::arg("dataset"), py::arg("config") = RecipeConfig());

    m.def("crb_percent", &crb_percent, py::arg("theta"), py::arg("P_theta"));
    m.def("correlation_matrix", &correlation_matrix, py::arg("P_theta"),
          py::arg("names") = std::vector<std::string>());
    m.def(
        "weak_parameter_screen",
        [](const EstimationReport& rep, double threshold) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& w : weak_parameter_screen(rep, threshold))
                out.emplace_back(w.name, w.pct_crb);
            return out;
        },
        py::arg("report"), py::arg("threshold") = 20.0,
        "Parameters whose %CRB exceeds the threshold, worst first.");

    m.def(
        "write_report",
        [](const EstimationReport& rep, const std::string& dir) { write_report(rep, dir); },
        py::arg("report"), py::arg("dir"));

    m.attr("__version__") = "0.1.0";
}
