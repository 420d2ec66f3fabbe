#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rrrekf/model.hpp"

namespace rrrekf {

/**
 * @brief One flight record: sample times, measurement matrix and the input
 * channels a model needs, already converted to internal units (radians, g).
 */
struct Dataset {
    Vector time;      ///< N sample instants, strictly increasing
    Matrix z;         ///< N x m measurement matrix (model meas_names order)
    InputBank inputs; ///< model input_names order

    Eigen::Index samples() const { return time.size(); }
    void validate(const ModelDefinition& model) const;
};

/**
 * @brief Read a CSV flight record for `model`.
 *
 * Expected header: `time_s` plus one column per model channel, named
 * `<channel>_<unit>` with unit in {deg, rad, fps, fps2, g}. Angles arrive in
 * radians internally; `fps2` accelerations are divided by the model's g.
 * A column may serve both as measurement and exogenous input (matched by
 * base name). Missing columns, unknown unit suffixes and non-monotone time
 * raise DataError naming the offender.
 */
Dataset read_dataset(const ModelDefinition& model, const std::filesystem::path& path);

/// Write a dataset in the exact format read_dataset ingests (17 significant
/// digits, internal units, so read(write(x)) == x).
void write_dataset(const ModelDefinition& model, const Dataset& data,
                   const std::filesystem::path& path);

}  // namespace rrrekf
