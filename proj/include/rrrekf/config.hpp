#pragma once

#include <string>
#include <vector>

#include "rrrekf/aircraft_models.hpp"
#include "rrrekf/recipe.hpp"

namespace rrrekf {

/**
 * @brief Declarative run settings; every field maps 1:1 to a CLI flag and to
 * a `key = value` line in a config file.
 */
struct RunConfig {
    int case_number = 1;
    std::string method = "reference";
    int iterations = 100;
    double tolerance = 1e-4;
    int plateau = 5;
    double p0_scale = 0.0;  // 0 = auto (1 for reference, 100 for MT/MS)
    bool em_cross_term = true;
    bool diagonal_qr = true;
    bool roll_cbar = false;  // case-3: cbar/2V in the roll moment equation
    double qbar = 0.0;       // case-2 dynamic pressure (required there)
    double vref = 0.0;       // case-2 reference airspeed (0: measured velocity)
    double cbar = 0.0;       // chord for the case-3 roll_cbar switch
    int mt_window = 0;
    std::vector<double> q0;  // optional Q seed diagonal
    std::vector<double> r0;  // optional R seed diagonal

    std::string data_path;
    std::string out_dir = ".";

    ModelOverrides overrides() const;
    RecipeConfig recipe() const;
    ModelDefinition make_model() const;
};

/**
 * @brief Apply a declarative config file to `cfg`.
 *
 * Format: one `key = value` per line, `#` comments. Keys are the long CLI
 * flag names without dashes (case, method, iterations, tolerance, plateau,
 * p0_scale, em_cross_term, diagonal_qr, roll_cbar, qbar, vref, cbar,
 * mt_window, q0, r0, data, out). List values are comma separated. Unknown
 * keys raise ConfigError naming them.
 */
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace rrrekf
