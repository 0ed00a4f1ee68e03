#include "numeric.hpp"

#include <algorithm>
#include <stdexcept>

namespace subdiff::harness {

double simpson_uniform(std::span<const double> values, double dx) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    if (n == 2) return 0.5 * dx * (values[0] + values[1]);
    double s = 0.0;
    std::size_t i = 0;
    // Simpson pairs; trapezoid for a trailing odd interval.
    for (; i + 2 < n; i += 2) s += dx / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    if (i + 1 < n) s += 0.5 * dx * (values[i] + values[i + 1]);
    return s;
}

double trapezoid(std::span<const double> xs, std::span<const double> ys) {
    double s = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        s += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return s;
}

std::vector<double> cumulative_trapezoid(std::span<const double> xs, std::span<const double> ys) {
    std::vector<double> out(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i)
        out[i] = out[i - 1] + 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return out;
}

double lerp_at(std::span<const double> xs, std::span<const double> ys, double x) {
    if (xs.empty()) throw std::invalid_argument("lerp_at: empty table");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

}  // namespace subdiff::harness
