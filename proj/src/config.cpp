#include "rrrekf/config.hpp"

#include <fstream>
#include <sstream>

namespace rrrekf {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config: bad boolean '" + v + "' for key '" + key + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw ConfigError("config: bad number '" + v + "' for key '" + key + "'");
    }
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(parse_num(trim(cell), key));
    return out;
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "case")
            cfg.case_number = static_cast<int>(parse_num(value, key));
        else if (key == "method")
            cfg.method = value;
        else if (key == "iterations")
            cfg.iterations = static_cast<int>(parse_num(value, key));
        else if (key == "tolerance")
            cfg.tolerance = parse_num(value, key);
        else if (key == "plateau")
            cfg.plateau = static_cast<int>(parse_num(value, key));
        else if (key == "p0_scale")
            cfg.p0_scale = parse_num(value, key);
        else if (key == "em_cross_term")
            cfg.em_cross_term = parse_bool(value, key);
        else if (key == "diagonal_qr")
            cfg.diagonal_qr = parse_bool(value, key);
        else if (key == "roll_cbar")
            cfg.roll_cbar = parse_bool(value, key);
        else if (key == "qbar")
            cfg.qbar = parse_num(value, key);
        else if (key == "vref")
            cfg.vref = parse_num(value, key);
        else if (key == "cbar")
            cfg.cbar = parse_num(value, key);
        else if (key == "mt_window")
            cfg.mt_window = static_cast<int>(parse_num(value, key));
        else if (key == "q0")
            cfg.q0 = parse_list(value, key);
        else if (key == "r0")
            cfg.r0 = parse_list(value, key);
        else if (key == "data")
            cfg.data_path = value;
        else if (key == "out")
            cfg.out_dir = value;
        else
            throw ConfigError("config: unknown key '" + key + "' at line " +
                              std::to_string(lineno));
    }
}

ModelOverrides RunConfig::overrides() const {
    ModelOverrides ov;
    ov.qbar = qbar;
    ov.vref = vref;
    ov.roll_cbar = roll_cbar;
    ov.cbar = cbar;
    return ov;
}

RecipeConfig RunConfig::recipe() const {
    RecipeConfig rc;
    rc.method = parse_method(method);
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    rc.max_iterations = iterations;
    rc.tolerance = tolerance;
    rc.plateau_iters = plateau;
    rc.p0_scale = p0_scale;
    rc.em_cross_term = em_cross_term;
    rc.diagonal_qr = diagonal_qr;
    rc.mt_window = mt_window;
    if (!q0.empty()) rc.q0_diag = Eigen::Map<const Vector>(q0.data(), static_cast<Eigen::Index>(q0.size()));
    if (!r0.empty()) rc.r0_diag = Eigen::Map<const Vector>(r0.data(), static_cast<Eigen::Index>(r0.size()));
    return rc;
}

ModelDefinition RunConfig::make_model() const {
    return builtin_model(parse_case(case_number), overrides());
}

}  // namespace rrrekf
