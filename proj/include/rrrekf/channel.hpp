#pragma once

#include <string>
#include <vector>

#include "rrrekf/types.hpp"

namespace rrrekf {

/**
 * @brief Time-indexed exogenous signal (measured input or control deflection).
 *
 * Times are strictly increasing; values are stored in internal units
 * (angles in radians). Evaluation between samples is piecewise linear.
 */
struct ChannelSeries {
    std::string name;
    Vector times;   ///< seconds, strictly increasing, length >= 2
    Vector values;  ///< same length as times

    void validate() const;
};

/// Linear interpolation of a channel; exact at sample times.
/// Throws std::out_of_range (naming the channel) when t is outside the span.
double interpolate_channel(const ChannelSeries& series, double t);

/// Constant-valued channel over [t0, t1].
ChannelSeries constant_channel(const std::string& name, double value, double t0, double t1);

}  // namespace rrrekf
