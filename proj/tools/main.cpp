#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "rrrekf/config.hpp"
#include "rrrekf/report_io.hpp"
#include "rrrekf/simulator.hpp"

namespace {

using namespace rrrekf;

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--case", cfg.case_number, "Built-in model (1, 2 or 3)")
        ->check(CLI::Range(1, 3));
    cmd->add_option("--qbar", cfg.qbar, "Dynamic pressure for case 2 (required there)");
    cmd->add_option("--vref", cfg.vref,
                    "Case-2 reference airspeed (default: measured velocity channel)");
    cmd->add_flag("--roll-cbar", cfg.roll_cbar,
                  "Case-3: use cbar/2V instead of b/2V in the roll moment equation");
    cmd->add_option("--cbar", cfg.cbar, "Chord for --roll-cbar");
}

void add_fit_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path,
                    "Config file with key = value lines (CLI flags override)");
    add_model_options(cmd, cfg);
    cmd->add_option("--data", cfg.data_path, "Input dataset CSV (or `data` config key)");
    cmd->add_option("--iterations", cfg.iterations, "Maximum outer iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", cfg.tolerance, "Relative plateau tolerance");
    cmd->add_option("--plateau", cfg.plateau, "Quiet iterations required to stop");
    cmd->add_option("--p0-scale", cfg.p0_scale,
                    "Parameter-block P0 scale per iteration (0 = auto: 1 ref, 100 MT/MS)");
    cmd->add_flag("--em-cross-term,!--no-em-cross-term", cfg.em_cross_term,
                  "Keep the smoother covariance bracket in the Q update");
    cmd->add_flag("--diagonal-qr,!--full-qr", cfg.diagonal_qr, "Constrain Q and R diagonal");
    cmd->add_option("--mt-window", cfg.mt_window, "MT estimator window (0 = whole record)");
    cmd->add_option("--q0", cfg.q0, "Q seed diagonal")->delimiter(',');
    cmd->add_option("--r0", cfg.r0, "R seed diagonal")->delimiter(',');
    cmd->add_option("--out", cfg.out_dir, "Output directory");
}

void print_summary(const EstimationReport& rep) {
    std::printf("%s: %d iteration(s)%s\n", method_name(rep.method).c_str(),
                rep.iterations_run, rep.converged ? ", converged" : "");
    const CostVector& c = rep.cost_history.back();
    std::printf("  J1-J8: %.4g %.4g %.4g %.4g %.4g %.4g %.4g %.4g\n", c.j1, c.j2, c.j3, c.j4,
                c.j5, c.j6, c.j7, c.j8);
    for (Eigen::Index i = 0; i < rep.theta_hat.size(); ++i)
        std::printf("  %-12s %12.5g  (sigma %.3g, %%CRB %.3g)\n",
                    rep.param_names[static_cast<size_t>(i)].c_str(), rep.theta_hat[i],
                    rep.sigma_theta[i], rep.pct_crb[i]);
}

int thread_cap() {
    if (const char* env = std::getenv("RRR_EKF_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 3;
}

int run_simulate(const RunConfig& cfg, double amplitude_deg, int n_samples, double dt,
                 std::uint64_t seed, const std::vector<double>& theta,
                 const std::vector<double>& q, const std::vector<double>& r) {
    const CaseId cid = parse_case(cfg.case_number);
    const ModelDefinition model = builtin_model(cid, cfg.overrides());
    SimConfig sim = default_sim_config(cid, model);
    sim.n_samples = n_samples;
    sim.dt = dt;
    sim.seed = seed;
    for (auto& shape : sim.inputs)
        for (auto& d : shape.doublets) d.amplitude = amplitude_deg * kDegToRad;
    auto copy_into = [](const std::vector<double>& src, Vector& dst, const char* what) {
        if (src.empty()) return;
        if (static_cast<Eigen::Index>(src.size()) != dst.size())
            throw ConfigError(std::string(what) + ": expected " + std::to_string(dst.size()) +
                              " values");
        dst = Eigen::Map<const Vector>(src.data(), dst.size());
    };
    copy_into(theta, sim.theta_true, "--theta");
    copy_into(q, sim.q_diag, "--q");
    copy_into(r, sim.r_diag, "--r");

    const SimResult res = simulate_dataset(model, sim);
    std::filesystem::create_directories(cfg.out_dir);
    write_dataset(model, res.dataset, std::filesystem::path(cfg.out_dir) / "dataset.csv");

    std::ofstream out(std::filesystem::path(cfg.out_dir) / "truth.csv");
    if (!out) throw DataError("cannot write truth.csv");
    out << "time_s";
    for (const auto& s : model.state_names) out << ",x_" << s;
    for (const auto& s : model.state_names) out << ",w_" << s;
    for (const auto& s : model.meas_names) out << ",v_" << s;
    out << "\n";
    char buf[40];
    const Eigen::Index N = res.dataset.time.size();
    for (Eigen::Index k = 0; k < N; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", res.dataset.time[k]);
        out << buf;
        for (int i = 0; i < model.n_states; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", res.truth.x_true(i, k));
            out << buf;
        }
        for (int i = 0; i < model.n_states; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", k + 1 < N ? res.truth.w(i, k) : 0.0);
            out << buf;
        }
        for (int i = 0; i < model.n_meas; ++i) {
            std::snprintf(buf, sizeof buf, ",%.17g", res.truth.v(i, k));
            out << buf;
        }
        out << "\n";
    }
    std::printf("wrote %s/dataset.csv and truth.csv (%d samples, dt=%g, seed=%llu)\n",
                cfg.out_dir.c_str(), static_cast<int>(N), sim.dt,
                static_cast<unsigned long long>(sim.seed));
    return 0;
}

int run_fit(const RunConfig& cfg) {
    if (cfg.data_path.empty()) throw ConfigError("no input dataset: pass --data or a config key");
    const ModelDefinition model = cfg.make_model();
    const Dataset data = read_dataset(model, cfg.data_path);
    const auto t0 = std::chrono::steady_clock::now();
    const EstimationReport rep = run_estimation(model, data, cfg.recipe());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(rep, cfg.out_dir);
    write_checkpoint(rep, cfg, std::filesystem::path(cfg.out_dir) / "checkpoint.json");
    print_summary(rep);
    std::printf("  %.1f s, reports in %s\n", secs, cfg.out_dir.c_str());
    return 0;
}

int run_compare(const RunConfig& base) {
    if (base.data_path.empty())
        throw ConfigError("no input dataset: pass --data or a config key");
    const ModelDefinition model = base.make_model();
    const Dataset data = read_dataset(model, base.data_path);

    const std::vector<std::string> methods = {"reference", "mt", "ms"};
    std::vector<EstimationReport> reports(methods.size());
    std::vector<std::exception_ptr> errors(methods.size());
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= methods.size()) return;
            try {
                RunConfig cfg = base;
                cfg.method = methods[i];
                reports[i] = run_estimation(model, data, cfg.recipe());
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int nthreads = std::min<int>(thread_cap(), static_cast<int>(methods.size()));
    std::vector<std::thread> pool;
    for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::filesystem::create_directories(base.out_dir);
    for (size_t i = 0; i < methods.size(); ++i) {
        const auto dir = std::filesystem::path(base.out_dir) / methods[i];
        write_report(reports[i], dir);
        RunConfig cfg = base;
        cfg.method = methods[i];
        write_checkpoint(reports[i], cfg, dir / "checkpoint.json");
        print_summary(reports[i]);
    }
    write_comparison(reports, std::filesystem::path(base.out_dir) / "compare.csv");
    std::printf("comparison table: %s/compare.csv\n", base.out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive EKF tuning for aircraft parameter estimation"};
    app.require_subcommand(1);

    RunConfig cfg;

    // simulate
    auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset + truth record");
    double amplitude_deg = 2.0, sim_dt = 0.02;
    int sim_n = 2000;
    std::uint64_t seed = 1;
    std::vector<double> theta_true, q_true, r_true;
    add_model_options(sim, cfg);
    sim->add_option("--out", cfg.out_dir, "Output directory");
    sim->add_option("--n", sim_n, "Number of samples")->check(CLI::Range(10, 10000000));
    sim->add_option("--dt", sim_dt, "Sample interval, seconds");
    sim->add_option("--seed", seed, "Noise seed");
    sim->add_option("--amplitude-deg", amplitude_deg, "Doublet amplitude in degrees");
    sim->add_option("--theta", theta_true, "True parameters (default: nominal estimates)")
        ->delimiter(',');
    sim->add_option("--q", q_true, "True process-noise diagonal")->delimiter(',');
    sim->add_option("--r", r_true, "True measurement-noise diagonal")->delimiter(',');

    // Config file values are applied before parsing, so explicit CLI flags
    // override them.
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            config_path = arg.substr(9);
    }
    if (!config_path.empty()) {
        try {
            apply_config_file(cfg, config_path);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
    }

    // fit
    auto* fit = app.add_subcommand("fit", "Estimate parameters and filter statistics");
    fit->add_option("--method", cfg.method, "reference | mt | ms");
    add_fit_options(fit, cfg, config_path);

    // compare
    auto* cmp = app.add_subcommand("compare", "Run reference, MT and MS on one dataset");
    add_fit_options(cmp, cfg, config_path);

    // report
    auto* repc = app.add_subcommand("report", "Regenerate outputs from a saved checkpoint");
    std::string checkpoint_path;
    repc->add_option("--checkpoint", checkpoint_path, "checkpoint.json from a fit run")
        ->required();
    repc->add_option("--out", cfg.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(cfg, amplitude_deg, sim_n, sim_dt, seed, theta_true, q_true,
                                r_true);
        if (fit->parsed()) return run_fit(cfg);
        if (cmp->parsed()) return run_compare(cfg);
        if (repc->parsed()) {
            const EstimationReport rep = rebuild_from_checkpoint(checkpoint_path);
            write_report(rep, cfg.out_dir);
            print_summary(rep);
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
