#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rrrekf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad or inconsistent user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular covariance, non-finite function value, ...).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filter state left the finite domain (CLI exit code 3).
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, int step)
        : std::runtime_error(what), step(step) {}
    int step;
};

inline void symmetrize(Matrix& a) { a = 0.5 * (a + a.transpose()).eval(); }

inline bool all_finite(const Vector& v) { return v.allFinite(); }

constexpr double kDegToRad = 0.017453292519943295;
constexpr double kVarianceFloor = 1e-14;

}  // namespace rrrekf
