#include "pathlab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subdiff::pathlab {

double SamplePath::at(double t) const {
    if (times.empty()) throw std::invalid_argument("empty path");
    if (t <= times.front()) return values.front();
    if (t > times.back()) throw levy::horizon_error("path evaluated beyond its horizon");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

SamplePath simulate_bm(double x0, double alpha, double sigma, std::span<const double> grid,
                       harness::RngStream& rng) {
    if (!(sigma > 0.0)) throw std::domain_error("simulate_bm needs sigma > 0");
    if (grid.empty() || grid[0] != 0.0) throw std::domain_error("grid must start at 0");
    SamplePath p;
    p.start = x0;
    p.drift_alpha = alpha;
    p.sigma = sigma;
    p.times.assign(grid.begin(), grid.end());
    p.values.resize(grid.size());
    p.values[0] = x0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dt = grid[i] - grid[i - 1];
        if (!(dt > 0.0)) throw std::domain_error("grid must be strictly increasing");
        p.values[i] = p.values[i - 1] - alpha * dt + sigma * std::sqrt(dt) * rng.normal();
    }
    return p;
}

ReflectedPath reflect_at_running_min(const SamplePath& path) {
    ReflectedPath out;
    out.reflected.times = path.times;
    out.reflected.start = 0.0;
    out.reflected.drift_alpha = path.drift_alpha;
    out.reflected.sigma = path.sigma;
    out.reflected.values.resize(path.values.size());
    out.neg_running_min.resize(path.values.size());
    double run_min = path.values.empty() ? 0.0 : path.values[0];
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        run_min = std::min(run_min, path.values[i]);
        out.reflected.values[i] = path.values[i] - run_min;
        out.neg_running_min[i] = -run_min;
    }
    return out;
}

TimeChangedPath time_change(std::shared_ptr<const SamplePath> inner,
                            std::shared_ptr<const levy::SubordinatorPath> sub,
                            std::span<const double> outer_grid) {
    if (outer_grid.empty()) throw std::domain_error("outer grid must be nonempty");
    TimeChangedPath tc;
    tc.source = inner;
    tc.subordinator = sub;
    tc.outer_times.assign(outer_grid.begin(), outer_grid.end());
    tc.values.resize(outer_grid.size());
    tc.inner_times.resize(outer_grid.size());
    for (std::size_t i = 0; i < outer_grid.size(); ++i) {
        const double u = levy::invert_subordinator(*sub, outer_grid[i]);
        if (u > inner->horizon())
            throw levy::horizon_error("inner path shorter than E(outer horizon)");
        tc.inner_times[i] = u;
        tc.values[i] = inner->at(u);
    }
    return tc;
}

TimeChangedPath gbm_under_P(double x, double sigma, const TimeChangedPath& tc) {
    if (!(x > 0.0)) throw std::domain_error("initial stock price must be positive");
    TimeChangedPath out = tc;
    for (auto& v : out.values) v = x * std::exp(sigma * v);
    return out;
}

}  // namespace subdiff::pathlab
