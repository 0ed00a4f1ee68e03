#pragma once

#include <span>
#include <vector>

#include "levy.hpp"
#include "pathlab.hpp"
#include "stats.hpp"

namespace subdiff::occupation {

struct OccupationCDF {
    std::vector<double> levels;
    std::vector<double> mass;  // A(v), nondecreasing in v
    double horizon = 0.0;
};

// A(v) = Leb{t <= horizon : path(t) <= v}, exact for the piecewise-linear path.
OccupationCDF occupation_cdf(const pathlab::SamplePath& path, double horizon,
                             std::span<const double> level_grid);

struct ProcessSpec {
    double x0 = 0.0;
    double alpha = 0.0;
    double sigma = 1.0;
    double inner_step = 1e-3;
};

struct IdentityReport {
    std::vector<harness::TestReport> per_level;      // KS per level, Bonferroni-corrected
    std::vector<harness::TestReport> increment_checks;  // two-level increment KS
    bool rejected = false;
    bool drift_exact_mode = false;
    double max_pathwise_diff = 0.0;  // drift case: max |A* - kappa A| with shared paths
};

// Distributional check of A*(v) against S(A(v)) with independent draws on the
// two sides; the pure-drift case is compared pathwise with shared seeds.
IdentityReport verify_time_change_identity(const ProcessSpec& process,
                                           const levy::LaplaceExponent& exponent, double tau,
                                           std::span<const double> levels, std::size_t n_paths,
                                           double ks_level, std::uint64_t seed,
                                           unsigned workers = 1);

}  // namespace subdiff::occupation
