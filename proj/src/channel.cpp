#include "rrrekf/channel.hpp"

#include <cmath>

namespace rrrekf {

void ChannelSeries::validate() const {
    if (times.size() < 2)
        throw DataError("channel '" + name + "': needs at least 2 samples");
    if (times.size() != values.size())
        throw DataError("channel '" + name + "': times/values length mismatch");
    for (Eigen::Index i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            throw DataError("channel '" + name + "': times not strictly increasing at index " +
                            std::to_string(i));
    }
    if (!values.allFinite())
        throw DataError("channel '" + name + "': non-finite value");
}

double interpolate_channel(const ChannelSeries& series, double t) {
    const Vector& ts = series.times;
    const Vector& vs = series.values;
    const Eigen::Index n = ts.size();
    const double lo = ts[0];
    const double hi = ts[n - 1];
    // Slack for roundoff when integrators evaluate exactly at the span ends.
    const double tol = 1e-9 * std::max(1.0, hi - lo);
    if (t < lo - tol || t > hi + tol)
        throw std::out_of_range("channel '" + series.name + "': t=" + std::to_string(t) +
                                " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (t <= lo) return vs[0];
    if (t >= hi) return vs[n - 1];

    // Bisect for the bracketing interval [ts[k], ts[k+1]).
    Eigen::Index a = 0, b = n - 1;
    while (b - a > 1) {
        const Eigen::Index mid = (a + b) / 2;
        if (ts[mid] <= t)
            a = mid;
        else
            b = mid;
    }
    const double w = (t - ts[a]) / (ts[b] - ts[a]);
    return vs[a] + w * (vs[b] - vs[a]);
}

ChannelSeries constant_channel(const std::string& name, double value, double t0, double t1) {
    ChannelSeries s;
    s.name = name;
    s.times = Vector::LinSpaced(2, t0, t1);
    s.values = Vector::Constant(2, value);
    return s;
}

}  // namespace rrrekf
