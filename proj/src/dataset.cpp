#include "rrrekf/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rrrekf {

void Dataset::validate(const ModelDefinition& model) const {
    const Eigen::Index N = time.size();
    if (N < 2) throw DataError("dataset: needs at least 2 samples");
    for (Eigen::Index k = 1; k < N; ++k)
        if (!(time[k] > time[k - 1]))
            throw DataError("dataset: time not strictly increasing at row " + std::to_string(k));
    if (z.rows() != N || z.cols() != model.n_meas)
        throw DataError("dataset: measurement matrix must be N x m");
    if (!z.allFinite()) throw DataError("dataset: non-finite measurement");
    if (inputs.series.size() != model.input_names.size())
        throw DataError("dataset: expected " + std::to_string(model.input_names.size()) +
                        " input channels");
    for (size_t i = 0; i < inputs.series.size(); ++i) {
        const ChannelSeries& s = inputs.series[i];
        if (s.name != model.input_names[i])
            throw DataError("dataset: input channel order mismatch at '" + s.name + "'");
        s.validate();
        if (s.times[0] > time[0] || s.times[s.times.size() - 1] < time[N - 1])
            throw DataError("dataset: channel '" + s.name + "' does not cover the time span");
    }
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

struct ColumnSpec {
    std::string base;
    std::string unit;
};

ColumnSpec parse_header_name(const std::string& raw) {
    const auto pos = raw.rfind('_');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= raw.size())
        throw DataError("dataset: column '" + raw + "' has no unit suffix");
    return {raw.substr(0, pos), raw.substr(pos + 1)};
}

double convert_in(double v, const std::string& unit, const std::string& column, double g) {
    if (unit == "rad" || unit == "fps" || unit == "g") return v;
    if (unit == "deg") return v * kDegToRad;
    if (unit == "fps2") {
        if (!(g > 0.0))
            throw DataError("dataset: column '" + column + "': fps2 needs a model g constant");
        return v / g;
    }
    throw DataError("dataset: column '" + column + "': unknown unit suffix '" + unit + "'");
}

// Canonical output suffix; everything is angular except the accelerometer
// and velocity channels.
std::string unit_for(const std::string& base) {
    if (base == "an" || base == "ax" || base == "ay") return "g";
    if (base == "vt") return "fps";
    return "rad";
}

void format_value(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

}  // namespace

Dataset read_dataset(const ModelDefinition& model, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("dataset: cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset: empty file '" + path.string() + "'");
    const std::vector<std::string> header = split_csv(line);
    if (header.empty() || header[0] != "time_s")
        throw DataError("dataset: first column must be time_s");

    std::vector<ColumnSpec> cols(header.size());
    for (size_t j = 1; j < header.size(); ++j) cols[j] = parse_header_name(header[j]);

    std::vector<std::vector<double>> raw(header.size());
    size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != header.size())
            throw DataError("dataset: row " + std::to_string(row + 1) + " has " +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()));
        for (size_t j = 0; j < cells.size(); ++j) {
            if (cells[j].empty())
                throw DataError("dataset: missing cell at row " + std::to_string(row + 1) +
                                ", column '" + header[j] + "'");
            size_t used = 0;
            double v;
            try {
                v = std::stod(cells[j], &used);
            } catch (const std::exception&) {
                throw DataError("dataset: bad number '" + cells[j] + "' at row " +
                                std::to_string(row + 1) + ", column '" + header[j] + "'");
            }
            raw[j].push_back(j == 0 ? v
                                    : convert_in(v, cols[j].unit, header[j], model.constants.g));
        }
        ++row;
    }
    const Eigen::Index N = static_cast<Eigen::Index>(row);
    if (N < 2) throw DataError("dataset: needs at least 2 rows");

    Dataset ds;
    ds.time.resize(N);
    for (Eigen::Index k = 0; k < N; ++k) {
        ds.time[k] = raw[0][static_cast<size_t>(k)];
        if (k > 0 && !(ds.time[k] > ds.time[k - 1]))
            throw DataError("dataset: time not strictly increasing at row " + std::to_string(k));
    }

    auto find_column = [&](const std::string& base) {
        for (size_t j = 1; j < cols.size(); ++j)
            if (cols[j].base == base) return j;
        throw DataError("dataset: missing column for channel '" + base + "'");
    };

    ds.z.resize(N, model.n_meas);
    for (int j = 0; j < model.n_meas; ++j) {
        const size_t cj = find_column(model.meas_names[static_cast<size_t>(j)]);
        for (Eigen::Index k = 0; k < N; ++k) ds.z(k, j) = raw[cj][static_cast<size_t>(k)];
    }
    ds.inputs.series.resize(model.input_names.size());
    for (size_t i = 0; i < model.input_names.size(); ++i) {
        const size_t cj = find_column(model.input_names[i]);
        ChannelSeries s;
        s.name = model.input_names[i];
        s.times = ds.time;
        s.values.resize(N);
        for (Eigen::Index k = 0; k < N; ++k) s.values[k] = raw[cj][static_cast<size_t>(k)];
        ds.inputs.series[i] = s;
    }
    ds.validate(model);
    return ds;
}

void write_dataset(const ModelDefinition& model, const Dataset& data,
                   const std::filesystem::path& path) {
    data.validate(model);
    std::ofstream out(path);
    if (!out) throw DataError("dataset: cannot write '" + path.string() + "'");

    // Measurement columns first, then inputs that are not already covered.
    std::vector<std::string> bases = model.meas_names;
    std::vector<const ChannelSeries*> extra;
    for (size_t i = 0; i < model.input_names.size(); ++i) {
        const std::string& nm = model.input_names[i];
        if (std::find(bases.begin(), bases.end(), nm) == bases.end()) {
            bases.push_back(nm);
            extra.push_back(&data.inputs.series[i]);
        }
    }

    std::string line = "time_s";
    for (const auto& b : bases) line += "," + b + "_" + unit_for(b);
    out << line << "\n";

    const Eigen::Index N = data.time.size();
    for (Eigen::Index k = 0; k < N; ++k) {
        line.clear();
        format_value(line, data.time[k]);
        for (int j = 0; j < model.n_meas; ++j) {
            line += ',';
            format_value(line, data.z(k, j));
        }
        for (const ChannelSeries* s : extra) {
            line += ',';
            format_value(line, s->values[k]);
        }
        out << line << "\n";
    }
    if (!out) throw DataError("dataset: write failed for '" + path.string() + "'");
}

}  // namespace rrrekf
