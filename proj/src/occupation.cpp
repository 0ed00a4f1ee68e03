#include "occupation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "parallel.hpp"

namespace subdiff::occupation {

OccupationCDF occupation_cdf(const pathlab::SamplePath& path, double horizon,
                             std::span<const double> level_grid) {
    if (horizon > path.horizon() + 1e-12)
        throw levy::horizon_error("occupation horizon beyond path horizon");
    OccupationCDF out;
    out.levels.assign(level_grid.begin(), level_grid.end());
    out.mass.assign(level_grid.size(), 0.0);
    out.horizon = horizon;
    const auto& ts = path.times;
    const auto& vs = path.values;
    for (std::size_t i = 1; i < ts.size() && ts[i - 1] < horizon; ++i) {
        double t1 = ts[i];
        double v1 = vs[i];
        if (t1 > horizon) {
            const double w = (horizon - ts[i - 1]) / (t1 - ts[i - 1]);
            v1 = vs[i - 1] + w * (v1 - vs[i - 1]);
            t1 = horizon;
        }
        const double dt = t1 - ts[i - 1];
        const double lo = std::min(vs[i - 1], v1);
        const double hi = std::max(vs[i - 1], v1);
        for (std::size_t j = 0; j < out.levels.size(); ++j) {
            const double v = out.levels[j];
            if (v >= hi)
                out.mass[j] += dt;
            else if (v > lo)
                out.mass[j] += dt * (v - lo) / (hi - lo);
        }
    }
    return out;
}

namespace {

levy::SubordinatorPath sample_sub(const levy::LaplaceExponent& e, std::span<const double> grid,
                                  harness::RngStream& rng) {
    switch (e.kind()) {
        case levy::LaplaceExponent::Kind::Stable:
            return levy::sample_stable_subordinator(e.c(), e.beta(), grid, rng);
        case levy::LaplaceExponent::Kind::Drift: {
            levy::SubordinatorPath p;
            p.kappa_effective = e.kappa();
            p.grid_times.assign(grid.begin(), grid.end());
            p.values.resize(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) p.values[i] = e.kappa() * grid[i];
            return p;
        }
        case levy::LaplaceExponent::Kind::DriftPlusJumps:
            return levy::sample_general_subordinator(e.kappa(), e.tail(),
                                                     levy::choose_delta(e.tail()), grid, rng);
    }
    throw std::logic_error("unknown exponent kind");
}

}  // namespace

IdentityReport verify_time_change_identity(const ProcessSpec& process,
                                           const levy::LaplaceExponent& exponent, double tau,
                                           std::span<const double> levels, std::size_t n_paths,
                                           double ks_level, std::uint64_t seed,
                                           unsigned workers) {
    if (!(tau > 0.0)) throw std::domain_error("tau must be positive");
    if (levels.empty()) throw std::domain_error("need at least one level");
    const std::size_t nl = levels.size();
    const bool drift_mode = exponent.kind() == levy::LaplaceExponent::Kind::Drift;

    const auto inner_grid = levy::uniform_grid(tau, process.inner_step);
    std::vector<std::vector<double>> side_a(nl), side_b(nl);
    for (auto& v : side_a) v.resize(n_paths);
    for (auto& v : side_b) v.resize(n_paths);
    std::vector<double> drift_diff(n_paths, 0.0);

    harness::parallel_for(n_paths, workers, [&](std::size_t i) {
        // side A: occupation of the time-changed path over [0, S(tau)]
        harness::RngStream rng_a(seed, 3 * i);
        auto x = std::make_shared<pathlab::SamplePath>(
            pathlab::simulate_bm(process.x0, process.alpha, process.sigma, inner_grid, rng_a));
        auto sub = std::make_shared<levy::SubordinatorPath>(sample_sub(exponent, inner_grid, rng_a));
        const double tau_star = sub->value_at(tau);
        std::vector<double> outer_grid;
        if (drift_mode) {
            // commensurate grid: outer nodes are kappa times the inner nodes
            outer_grid.resize(inner_grid.size());
            for (std::size_t k = 0; k < inner_grid.size(); ++k)
                outer_grid[k] = exponent.kappa() * inner_grid[k];
        } else {
            const std::size_t n_out = 4096;
            outer_grid.resize(n_out + 1);
            for (std::size_t k = 0; k <= n_out; ++k)
                outer_grid[k] = tau_star * static_cast<double>(k) / static_cast<double>(n_out);
        }
        const auto tc = pathlab::time_change(x, sub, outer_grid);
        pathlab::SamplePath outer;
        outer.times = tc.outer_times;
        outer.values = tc.values;
        outer.start = tc.values.front();
        const auto occ_star = occupation_cdf(outer, tau_star, levels);
        for (std::size_t j = 0; j < nl; ++j) side_a[j][i] = occ_star.mass[j];

        if (drift_mode) {
            const auto occ = occupation_cdf(*x, tau, levels);
            double md = 0.0;
            for (std::size_t j = 0; j < nl; ++j)
                md = std::max(md, std::fabs(occ_star.mass[j] - exponent.kappa() * occ.mass[j]));
            drift_diff[i] = md;
        }

        // side B: independent plain occupation composed with an independent copy of S
        harness::RngStream rng_b(seed, 3 * i + 1);
        const auto xb = pathlab::simulate_bm(process.x0, process.alpha, process.sigma, inner_grid,
                                             rng_b);
        const auto occ_b = occupation_cdf(xb, tau, levels);
        harness::RngStream rng_s(seed, 3 * i + 2);
        const auto sub_b = sample_sub(exponent, inner_grid, rng_s);
        for (std::size_t j = 0; j < nl; ++j) side_b[j][i] = sub_b.value_at(occ_b.mass[j]);
    });

    IdentityReport rep;
    rep.drift_exact_mode = drift_mode;
    for (double d : drift_diff) rep.max_pathwise_diff = std::max(rep.max_pathwise_diff, d);
    const double corrected = ks_level / static_cast<double>(nl);
    for (std::size_t j = 0; j < nl; ++j) {
        auto r = harness::ks_two_sample(side_a[j], side_b[j], corrected);
        r.name = "occupation_level_" + std::to_string(j);
        rep.rejected = rep.rejected || r.rejected;
        rep.per_level.push_back(std::move(r));
    }
    if (nl >= 2) {
        // joint check on two-level increments
        std::vector<double> inc_a(n_paths), inc_b(n_paths);
        for (std::size_t i = 0; i < n_paths; ++i) {
            inc_a[i] = side_a[nl - 1][i] - side_a[0][i];
            inc_b[i] = side_b[nl - 1][i] - side_b[0][i];
        }
        auto r = harness::ks_two_sample(inc_a, inc_b, ks_level);
        r.name = "occupation_increment";
        rep.rejected = rep.rejected || r.rejected;
        rep.increment_checks.push_back(std::move(r));
    }
    return rep;
}

}  // namespace subdiff::occupation
