#include "rrrekf/report_io.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "rrrekf/dataset.hpp"

namespace rrrekf {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw DataError("cannot write '" + p.string() + "'");
    return out;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix json_to_matrix(const json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Matrix();
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index jj = 0; jj < cols; ++jj) m(i, jj) = j.at(i).at(jj).get<double>();
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Vector json_to_vector(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
    return v;
}

}  // namespace

void write_report(const EstimationReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        auto out = open_out(dir / "theta.csv");
        out << "name,estimate,sigma,pct_crb\n";
        for (Eigen::Index i = 0; i < rep.theta_hat.size(); ++i) {
            out << rep.param_names[static_cast<size_t>(i)] << ',' << num(rep.theta_hat[i])
                << ',' << num(rep.sigma_theta[i]) << ',' << num(rep.pct_crb[i]) << "\n";
        }
    }
    {
        auto out = open_out(dir / "corr100.csv");
        out << "param";
        for (const auto& n : rep.param_names) out << ',' << n;
        out << "\n";
        for (Eigen::Index i = 0; i < rep.corr_100.rows(); ++i) {
            out << rep.param_names[static_cast<size_t>(i)];
            for (Eigen::Index j = 0; j < rep.corr_100.cols(); ++j)
                out << ',' << rep.corr_100(i, j);
            out << "\n";
        }
    }
    {
        auto out = open_out(dir / "qr.csv");
        out << "kind,name,value\n";
        for (Eigen::Index i = 0; i < rep.R.rows(); ++i)
            out << "R," << rep.meas_names[static_cast<size_t>(i)] << ',' << num(rep.R(i, i))
                << "\n";
        for (Eigen::Index i = 0; i < rep.Q.rows(); ++i)
            out << "Q," << rep.state_names[static_cast<size_t>(i)] << ',' << num(rep.Q(i, i))
                << "\n";
    }
    {
        auto out = open_out(dir / "costs.csv");
        out << "iteration,J1,J2,J3,J4,J5,J6,J7,J8\n";
        for (size_t it = 0; it < rep.cost_history.size(); ++it) {
            out << (it + 1);
            for (double v : rep.cost_history[it].values()) out << ',' << num(v);
            out << "\n";
        }
    }
    {
        auto out = open_out(dir / "residues.csv");
        out << "time_s,channel,innovation,innovation_bound,filtered,filtered_bound,"
               "smoothed,smoothed_bound,filtered_bound_negative,smoothed_bound_negative\n";
        const Eigen::Index N = rep.time.size();
        for (Eigen::Index k = 0; k < N; ++k) {
            for (Eigen::Index i = 0; i < rep.z.rows(); ++i) {
                const auto& r = rep.residues;
                out << num(rep.time[k]) << ',' << rep.meas_names[static_cast<size_t>(i)] << ','
                    << num(r.innovation(i, k)) << ',' << num(r.bound_innov(i, k)) << ','
                    << num(r.filtered(i, k)) << ',' << num(r.bound_filt(i, k)) << ','
                    << num(r.smoothed(i, k)) << ',' << num(r.bound_smooth(i, k)) << ','
                    << (r.filt_negative(i, k) ? 1 : 0) << ','
                    << (r.smooth_negative(i, k) ? 1 : 0) << "\n";
            }
        }
    }
    {
        auto out = open_out(dir / "trajectory.csv");
        out << "time_s";
        for (const auto& s : rep.state_names)
            out << ",xd_" << s;
        for (const auto& s : rep.state_names)
            out << ",xprior_" << s;
        for (const auto& s : rep.state_names)
            out << ",xpost_" << s;
        for (const auto& s : rep.state_names)
            out << ",xsmooth_" << s;
        for (const auto& s : rep.meas_names)
            out << ",z_" << s;
        out << "\n";
        const Eigen::Index N = rep.time.size();
        for (Eigen::Index k = 0; k < N; ++k) {
            out << num(rep.time[k]);
            for (Eigen::Index i = 0; i < rep.xd.rows(); ++i) out << ',' << num(rep.xd(i, k));
            for (Eigen::Index i = 0; i < rep.x_prior.rows(); ++i)
                out << ',' << num(rep.x_prior(i, k));
            for (Eigen::Index i = 0; i < rep.x_post.rows(); ++i)
                out << ',' << num(rep.x_post(i, k));
            for (Eigen::Index i = 0; i < rep.x_smooth.rows(); ++i)
                out << ',' << num(rep.x_smooth(i, k));
            for (Eigen::Index i = 0; i < rep.z.rows(); ++i) out << ',' << num(rep.z(i, k));
            out << "\n";
        }
    }
    {
        auto out = open_out(dir / "flags.txt");
        for (const auto& f : rep.flags) out << f << "\n";
    }
}

void write_comparison(const std::vector<EstimationReport>& reports,
                      const std::filesystem::path& file) {
    if (reports.empty()) throw ConfigError("write_comparison: no reports");
    auto out = open_out(file);
    out << "param";
    for (const auto& r : reports)
        out << ',' << method_name(r.method) << ',' << method_name(r.method) << "_sigma";
    out << "\n";
    const auto& names = reports.front().param_names;
    for (size_t i = 0; i < names.size(); ++i) {
        out << names[i];
        for (const auto& r : reports)
            out << ',' << num(r.theta_hat[static_cast<Eigen::Index>(i)]) << ','
                << num(r.sigma_theta[static_cast<Eigen::Index>(i)]);
        out << "\n";
    }
}

void write_checkpoint(const EstimationReport& rep, const RunConfig& cfg,
                      const std::filesystem::path& file) {
    json j;
    j["format"] = "rrrekf-checkpoint-1";
    j["run"] = {{"case", cfg.case_number},
                {"method", method_name(rep.method)},
                {"qbar", cfg.qbar},
                {"vref", cfg.vref},
                {"roll_cbar", cfg.roll_cbar},
                {"cbar", cfg.cbar},
                {"p0_scale", cfg.p0_scale},
                {"em_cross_term", cfg.em_cross_term},
                {"diagonal_qr", cfg.diagonal_qr},
                {"mt_window", cfg.mt_window},
                {"data", cfg.data_path}};
    j["state"] = {{"theta0", vector_to_json(rep.theta0_in)},
                  {"x0", vector_to_json(rep.x0_in)},
                  {"P0", matrix_to_json(rep.P0_in)},
                  {"Q", matrix_to_json(rep.Q_in)},
                  {"R", matrix_to_json(rep.R_in)}};
    json costs = json::array();
    for (const auto& c : rep.cost_history) {
        json row = json::array();
        for (double v : c.values()) row.push_back(v);
        costs.push_back(std::move(row));
    }
    json thetas = json::array();
    for (const auto& t : rep.theta0_history) thetas.push_back(vector_to_json(t));
    j["history"] = {{"iterations", rep.iterations_run},
                    {"converged", rep.converged},
                    {"costs", std::move(costs)},
                    {"theta0", std::move(thetas)}};

    auto out = open_out(file);
    out << j.dump(1) << "\n";
}

EstimationReport rebuild_from_checkpoint(const std::filesystem::path& file,
                                         std::string* dataset_path) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open checkpoint '" + file.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw DataError("bad checkpoint '" + file.string() + "': " + e.what());
    }
    if (j.value("format", "") != std::string("rrrekf-checkpoint-1"))
        throw DataError("unrecognized checkpoint format in '" + file.string() + "'");

    RunConfig cfg;
    const json& r = j.at("run");
    cfg.case_number = r.at("case").get<int>();
    cfg.method = r.at("method").get<std::string>();
    cfg.qbar = r.value("qbar", 0.0);
    cfg.vref = r.value("vref", 0.0);
    cfg.roll_cbar = r.value("roll_cbar", false);
    cfg.cbar = r.value("cbar", 0.0);
    cfg.p0_scale = r.value("p0_scale", 0.0);
    cfg.em_cross_term = r.value("em_cross_term", true);
    cfg.diagonal_qr = r.value("diagonal_qr", true);
    cfg.mt_window = r.value("mt_window", 0);
    cfg.data_path = r.at("data").get<std::string>();
    if (dataset_path) *dataset_path = cfg.data_path;

    const ModelDefinition model = cfg.make_model();
    const Dataset data = read_dataset(model, cfg.data_path);

    RecipeConfig rc = cfg.recipe();
    rc.max_iterations = 1;
    const json& s = j.at("state");
    rc.theta0 = json_to_vector(s.at("theta0"));
    rc.x0 = json_to_vector(s.at("x0"));
    rc.P0_seed = json_to_matrix(s.at("P0"));
    rc.Q0_full = json_to_matrix(s.at("Q"));
    rc.R0_full = json_to_matrix(s.at("R"));

    EstimationReport rep = run_estimation(model, data, rc);

    const json& h = j.at("history");
    rep.iterations_run = h.at("iterations").get<int>();
    rep.converged = h.at("converged").get<bool>();
    rep.theta0_history.clear();
    for (const auto& t : h.at("theta0")) rep.theta0_history.push_back(json_to_vector(t));
    const CostVector last = rep.cost_history.back();
    rep.cost_history.clear();
    const auto& costs = h.at("costs");
    for (size_t i = 0; i < costs.size(); ++i) {
        if (i + 1 == costs.size()) {
            rep.cost_history.push_back(last);  // recomputed, identical by determinism
        } else {
            CostVector c;
            const auto& row = costs.at(i);
            c.j1 = row.at(0);
            c.j2 = row.at(1);
            c.j3 = row.at(2);
            c.j4 = row.at(3);
            c.j5 = row.at(4);
            c.j6 = row.at(5);
            c.j7 = row.at(6);
            c.j8 = row.at(7);
            rep.cost_history.push_back(c);
        }
    }
    return rep;
}

}  // namespace rrrekf
