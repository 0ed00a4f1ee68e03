#pragma once

#include <memory>
#include <span>
#include <vector>

#include "levy.hpp"
#include "rng.hpp"

namespace subdiff::pathlab {

struct SamplePath {
    std::vector<double> times;   // strictly increasing from 0
    std::vector<double> values;  // values[0] == start
    double start = 0.0;
    double drift_alpha = 0.0;
    double sigma = 1.0;

    double horizon() const { return times.back(); }
    // linear interpolation between samples
    double at(double t) const;
    double grid_step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct TimeChangedPath {
    std::vector<double> outer_times;
    std::vector<double> values;       // source evaluated at inner_times
    std::vector<double> inner_times;  // E(t) per outer time
    std::shared_ptr<const SamplePath> source;
    std::shared_ptr<const levy::SubordinatorPath> subordinator;
};

// X(t) = x0 + sigma B(t) - alpha t on the given grid.
SamplePath simulate_bm(double x0, double alpha, double sigma, std::span<const double> grid,
                       harness::RngStream& rng);

struct ReflectedPath {
    SamplePath reflected;                 // R(t) = B(t) - min_{s<=t} B(s)
    std::vector<double> neg_running_min;  // -I(t), the local-time proxy
};

ReflectedPath reflect_at_running_min(const SamplePath& path);

TimeChangedPath time_change(std::shared_ptr<const SamplePath> inner,
                            std::shared_ptr<const levy::SubordinatorPath> sub,
                            std::span<const double> outer_grid);

// stock path x * exp(sigma * B*(t)) from a driftless time-changed BM
TimeChangedPath gbm_under_P(double x, double sigma, const TimeChangedPath& tc);

}  // namespace subdiff::pathlab
