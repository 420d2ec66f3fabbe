#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rrrekf/report_io.hpp"
#include "rrrekf/simulator.hpp"
#include "test_helpers.hpp"

using namespace rrrekf;

namespace {

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "rrrekf_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("dataset round trip is bit exact") {
    const CaseId cid = CaseId::Case1Longitudinal;
    const ModelDefinition m = builtin_model(cid);
    SimConfig sim = default_sim_config(cid, m);
    sim.n_samples = 60;
    sim.seed = 3;
    const SimResult res = simulate_dataset(m, sim);

    const auto path = temp_dir() / "roundtrip.csv";
    write_dataset(m, res.dataset, path);
    const Dataset back = read_dataset(m, path);

    CHECK((back.time - res.dataset.time).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.z - res.dataset.z).lpNorm<Eigen::Infinity>() == 0.0);
    for (size_t i = 0; i < back.inputs.series.size(); ++i)
        CHECK((back.inputs.series[i].values - res.dataset.inputs.series[i].values)
                  .lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("degree columns convert to radians") {
    const ModelDefinition m = builtin_model(CaseId::Case1Longitudinal);
    const auto path = temp_dir() / "degrees.csv";
    {
        std::ofstream out(path);
        out << "time_s,alpha_deg,q_rad,theta_rad,an_g,ax_g,de_deg,phi_rad,beta_rad,p_rad,r_rad\n";
        out << "0,5.0,0,0,0,0,1,0,0,0,0\n";
        out << "0.02,5.0,0,0,0,0,1,0,0,0,0\n";
    }
    const Dataset ds = read_dataset(m, path);
    CHECK(ds.z(0, 0) == doctest::Approx(0.0872665).epsilon(1e-6));
    CHECK(ds.inputs.series[0].values[0] == doctest::Approx(0.0174533).epsilon(1e-6));
    // alpha serves both roles through the same column
    CHECK(ds.inputs.series[5].values[0] == ds.z(0, 0));
}

TEST_CASE("ingestion errors name the offender") {
    const ModelDefinition m = builtin_model(CaseId::Case1Longitudinal);
    const auto dir = temp_dir();

    SUBCASE("non-monotone time reports the row") {
        const auto path = dir / "shuffled.csv";
        std::ofstream out(path);
        out << "time_s,alpha_rad,q_rad,theta_rad,an_g,ax_g,de_rad,phi_rad,beta_rad,p_rad,r_rad\n";
        out << "0,0,0,0,0,0,0,0,0,0,0\n";
        out << "0.04,0,0,0,0,0,0,0,0,0,0\n";
        out << "0.02,0,0,0,0,0,0,0,0,0,0\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_dataset(m, path), doctest::Contains("row 2"), DataError);
    }
    SUBCASE("missing column is named") {
        const auto path = dir / "missing.csv";
        std::ofstream out(path);
        out << "time_s,alpha_rad,q_rad,theta_rad,an_g,de_rad,phi_rad,beta_rad,p_rad,r_rad\n";
        out << "0,0,0,0,0,0,0,0,0,0\n0.02,0,0,0,0,0,0,0,0,0\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_dataset(m, path), doctest::Contains("'ax'"), DataError);
    }
    SUBCASE("unknown unit suffix is named") {
        const auto path = dir / "badunit.csv";
        std::ofstream out(path);
        out << "time_s,alpha_furlong,q_rad,theta_rad,an_g,ax_g,de_rad,phi_rad,beta_rad,p_rad,r_rad\n";
        out << "0,0,0,0,0,0,0,0,0,0,0\n0.02,0,0,0,0,0,0,0,0,0,0\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_dataset(m, path), doctest::Contains("furlong"), DataError);
    }
    SUBCASE("missing cell is reported") {
        const auto path = dir / "hole.csv";
        std::ofstream out(path);
        out << "time_s,alpha_rad,q_rad,theta_rad,an_g,ax_g,de_rad,phi_rad,beta_rad,p_rad,r_rad\n";
        out << "0,0,0,0,0,0,0,0,0,0,\n0.02,0,0,0,0,0,0,0,0,0,0\n";
        out.close();
        CHECK_THROWS_AS(read_dataset(m, path), DataError);
    }
}

TEST_CASE("report serialization") {
    const CaseId cid = CaseId::Case1Longitudinal;
    const ModelDefinition m = builtin_model(cid);
    SimConfig sim = default_sim_config(cid, m);
    sim.n_samples = 150;
    sim.seed = 12;
    const SimResult res = simulate_dataset(m, sim);

    RecipeConfig cfg;
    cfg.max_iterations = 3;
    const EstimationReport rep = reference_recipe(m, res.dataset, cfg);

    const auto dir = temp_dir() / "report";
    write_report(rep, dir);
    for (const char* f : {"theta.csv", "corr100.csv", "qr.csv", "costs.csv", "residues.csv",
                           "trajectory.csv", "flags.txt"})
        CHECK(std::filesystem::exists(dir / f));

    SUBCASE("theta.csv: 13 rows in model order starting with C_N_alpha") {
        const std::string theta = slurp(dir / "theta.csv");
        CHECK(theta.find("name,estimate,sigma,pct_crb\nC_N_alpha,") != std::string::npos);
        int rows = -1;  // header
        for (char ch : theta)
            if (ch == '\n') ++rows;
        CHECK(rows == 13);
    }
    SUBCASE("corr100.csv diagonal reads 100") {
        std::ifstream in(dir / "corr100.csv");
        std::string line;
        std::getline(in, line);  // header
        int row = 0;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ',');  // name
            for (int col = 0; std::getline(ss, cell, ','); ++col)
                if (col == row) CHECK(cell == "100");
            ++row;
        }
        CHECK(row == 13);
    }
    SUBCASE("costs.csv has one row per iteration") {
        const std::string costs = slurp(dir / "costs.csv");
        int rows = -1;
        for (char ch : costs)
            if (ch == '\n') ++rows;
        CHECK(rows == rep.iterations_run);
    }
    SUBCASE("reports are byte deterministic") {
        const auto dir2 = temp_dir() / "report2";
        const EstimationReport rep2 = reference_recipe(m, res.dataset, cfg);
        write_report(rep2, dir2);
        for (const char* f : {"theta.csv", "corr100.csv", "qr.csv", "costs.csv",
                               "residues.csv", "trajectory.csv", "flags.txt"})
            CHECK(slurp(dir / f) == slurp(dir2 / f));
    }
}

TEST_CASE("checkpoint rebuild reproduces the report") {
    const CaseId cid = CaseId::Case1Longitudinal;
    const ModelDefinition m = builtin_model(cid);
    SimConfig sim = default_sim_config(cid, m);
    sim.n_samples = 120;
    sim.seed = 5;
    const SimResult res = simulate_dataset(m, sim);

    const auto dir = temp_dir() / "ckpt";
    std::filesystem::create_directories(dir);
    const auto data_path = dir / "dataset.csv";
    write_dataset(m, res.dataset, data_path);

    RunConfig rc;
    rc.case_number = 1;
    rc.method = "reference";
    rc.iterations = 2;
    rc.data_path = data_path.string();

    const Dataset data = read_dataset(m, data_path);
    const EstimationReport rep = run_estimation(m, data, rc.recipe());
    write_checkpoint(rep, rc, dir / "checkpoint.json");

    const EstimationReport back = rebuild_from_checkpoint(dir / "checkpoint.json");
    CHECK(back.iterations_run == rep.iterations_run);
    CHECK((back.theta_hat - rep.theta_hat).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.sigma_theta - rep.sigma_theta).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.Q - rep.Q).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((back.R - rep.R).lpNorm<Eigen::Infinity>() == 0.0);
    for (int it = 0; it < rep.iterations_run; ++it)
        CHECK(back.cost_history[it].j5 == rep.cost_history[it].j5);

    const auto rdir1 = dir / "out1";
    const auto rdir2 = dir / "out2";
    write_report(rep, rdir1);
    write_report(back, rdir2);
    for (const char* f : {"theta.csv", "qr.csv", "residues.csv", "trajectory.csv"})
        CHECK(slurp(rdir1 / f) == slurp(rdir2 / f));
}
