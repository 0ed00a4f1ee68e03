#include "levy.hpp"

#include <algorithm>
#include <cmath>

#include "numeric.hpp"

namespace subdiff::levy {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::domain_error(what);
}

}  // namespace

LaplaceExponent LaplaceExponent::stable(double c, double beta) {
    require(c > 0.0, "stable exponent needs c > 0");
    require(beta > 0.0 && beta < 1.0, "stable exponent needs beta in (0,1)");
    LaplaceExponent e;
    e.kind_ = Kind::Stable;
    e.c_ = c;
    e.beta_ = beta;
    return e;
}

LaplaceExponent LaplaceExponent::drift(double kappa) {
    require(kappa >= 0.0, "drift exponent needs kappa >= 0");
    LaplaceExponent e;
    e.kind_ = Kind::Drift;
    e.kappa_ = kappa;
    return e;
}

LaplaceExponent LaplaceExponent::drift_plus_jumps(double kappa, LevyTail tail) {
    require(kappa >= 0.0, "kappa must be nonnegative");
    require(std::isfinite(tail.integral01) && tail.integral01 >= 0.0,
            "tail certificate must be a finite nonnegative integral");
    LaplaceExponent e;
    e.kind_ = Kind::DriftPlusJumps;
    e.kappa_ = kappa;
    e.tail_ = std::move(tail);
    return e;
}

bool LaplaceExponent::has_infinite_activity() const {
    switch (kind_) {
        case Kind::Stable:
            return true;
        case Kind::Drift:
            return false;
        case Kind::DriftPlusJumps:
            return tail_->w(1e-15) > 1e12;
    }
    return false;
}

double tail_integral(const LevyTail& tail, double a, double b) {
    if (!(b > a)) return 0.0;
    if (a > 0.0) return harness::gl15_geometric(tail.w, a, b, 8);
    // a == 0: the certificate pins the mass below any quadrature floor
    if (b <= 1.0) {
        const double above = (b < 1.0) ? harness::gl15_geometric(tail.w, b, 1.0, 8) : 0.0;
        return std::max(0.0, tail.integral01 - above);
    }
    return std::max(0.0, tail.integral01) + harness::gl15_geometric(tail.w, 1.0, b, 8);
}

double small_jump_mean(const LevyTail& tail, double delta) {
    require(delta > 0.0, "delta must be positive");
    // int_0^delta y nu(dy) = int_0^delta w(y) dy - delta * w(delta)
    return std::max(0.0, tail_integral(tail, 0.0, delta) - delta * tail.w(delta));
}

double choose_delta(const LevyTail& tail, double budget) {
    double delta = 1.0;
    while (delta > 1e-12 && small_jump_mean(tail, delta) > budget) delta *= 0.5;
    return delta;
}

double phi_eval(const LaplaceExponent& e, double lambda) {
    require(lambda >= 0.0, "phi_eval needs lambda >= 0");
    if (lambda == 0.0) return 0.0;
    switch (e.kind_) {
        case LaplaceExponent::Kind::Stable:
            return e.c_ * std::pow(lambda, e.beta_);
        case LaplaceExponent::Kind::Drift:
            return e.kappa_ * lambda;
        case LaplaceExponent::Kind::DriftPlusJumps: {
            // integration-by-parts form: kappa l + l * int_0^inf e^{-l r} w(r) dr
            const auto& tail = *e.tail_;
            const double r_lo = 1e-9 / (1.0 + lambda);
            // below r_lo, e^{-lambda r} ~ 1; the certificate pins the mass
            const double below = tail_integral(tail, 0.0, r_lo);
            double s = 0.5 * (1.0 + std::exp(-lambda * r_lo)) * below;
            double r_hi = std::max(1.0, 60.0 / lambda);
            const auto f = [&](double r) { return std::exp(-lambda * r) * tail.w(r); };
            s += harness::gl15_geometric(f, r_lo, r_hi, 8);
            // monotone tail bound beyond r_hi is below e^{-60}; ignored
            return e.kappa_ * lambda + lambda * s;
        }
    }
    return 0.0;
}

// generalized inverse of w on [delta, inf): inf{r >= delta : w(r) <= u*w(delta)}
double inverse_tail_sample(const LevyTail& tail, double delta, double u) {
    const double target = u * tail.w(delta);
    double lo = delta;
    double hi = delta;
    for (int i = 0; i < 200 && tail.w(hi) > target; ++i) hi *= 2.0;
    for (int i = 0; i < 90; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tail.w(mid) <= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double sample_marginal(const LaplaceExponent& e, double t, harness::RngStream& rng, double delta) {
    require(t >= 0.0, "time must be nonnegative");
    if (t == 0.0) return 0.0;
    switch (e.kind()) {
        case LaplaceExponent::Kind::Stable:
            return harness::stable_increment(rng, e.c(), e.beta(), t);
        case LaplaceExponent::Kind::Drift:
            return e.kappa() * t;
        case LaplaceExponent::Kind::DriftPlusJumps: {
            const auto& tail = e.tail();
            const double rate = tail.w(delta);
            double s = (e.kappa() + small_jump_mean(tail, delta)) * t;
            if (rate > 0.0) {
                double u = rng.exponential() / rate;
                while (u <= t) {
                    s += inverse_tail_sample(tail, delta, rng.u01_open());
                    u += rng.exponential() / rate;
                }
            }
            return s;
        }
    }
    return 0.0;
}

std::vector<double> uniform_grid(double horizon, double step) {
    require(horizon > 0.0 && step > 0.0, "grid needs positive horizon and step");
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step));
    std::vector<double> g(n + 1);
    for (std::size_t i = 0; i <= n; ++i) g[i] = std::min(horizon, static_cast<double>(i) * step);
    g.back() = horizon;
    return g;
}

namespace {

void check_grid(std::span<const double> grid) {
    require(grid.size() >= 1 && grid[0] == 0.0, "grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        require(grid[i] > grid[i - 1], "grid must be strictly increasing");
}

void finalize_values(SubordinatorPath& p, std::span<const double> grid) {
    p.grid_times.assign(grid.begin(), grid.end());
    p.jump_cum.resize(p.jump_sizes.size());
    double c = 0.0;
    for (std::size_t i = 0; i < p.jump_sizes.size(); ++i) {
        c += p.jump_sizes[i];
        p.jump_cum[i] = c;
    }
    p.values.resize(grid.size());
    std::size_t j = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        while (j < p.jump_times.size() && p.jump_times[j] <= grid[i]) cum = p.jump_cum[j++];
        p.values[i] = p.kappa_effective * grid[i] + cum;
    }
}

}  // namespace

SubordinatorPath sample_stable_subordinator(double c, double beta, std::span<const double> grid,
                                            harness::RngStream& rng) {
    require(c > 0.0, "stable sampler needs c > 0");
    require(beta > 0.0 && beta < 1.0, "stable sampler needs beta in (0,1)");
    check_grid(grid);
    SubordinatorPath p;
    p.kappa_effective = 0.0;
    p.jump_times.reserve(grid.size() - 1);
    p.jump_sizes.reserve(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        p.jump_times.push_back(grid[i]);
        p.jump_sizes.push_back(harness::stable_increment(rng, c, beta, grid[i] - grid[i - 1]));
    }
    finalize_values(p, grid);
    return p;
}

SubordinatorPath sample_general_subordinator(double kappa, const LevyTail& tail, double delta,
                                             std::span<const double> grid, harness::RngStream& rng,
                                             bool allow_finite_activity) {
    require(delta > 0.0, "jump truncation delta must be positive");
    check_grid(grid);
    const double horizon = grid.back();
    // integrability check against the certificate
    const double probe = harness::gl15_geometric(tail.w, 1e-12, 1.0, 8);
    require(probe <= tail.integral01 * 1.05 + 1e-12,
            "tail integral exceeds its certificate; nu may not be integrable near 0");
    const bool infinite_mass = tail.w(1e-15) > 1e12;
    if (!(kappa > 0.0) && !infinite_mass && !allow_finite_activity)
        throw std::domain_error("strict increase requires kappa > 0 or infinite jump activity");

    SubordinatorPath p;
    p.kappa_effective = kappa + small_jump_mean(tail, delta);
    const double rate = tail.w(delta);
    if (rate > 0.0) {
        double t = rng.exponential() / rate;
        while (t <= horizon) {
            p.jump_times.push_back(t);
            p.jump_sizes.push_back(inverse_tail_sample(tail, delta, rng.u01_open()));
            t += rng.exponential() / rate;
        }
    }
    finalize_values(p, grid);
    return p;
}

double SubordinatorPath::value_at(double u) const {
    const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), u);
    const std::size_t j = static_cast<std::size_t>(it - jump_times.begin());
    const double cum = (j == 0) ? 0.0 : jump_cum[j - 1];
    return kappa_effective * u + cum;
}

double invert_subordinator(const SubordinatorPath& path, double t) {
    if (t < 0.0) throw std::domain_error("invert_subordinator needs t >= 0");
    if (t >= path.max_value())
        throw horizon_error("time beyond simulated subordinator horizon");
    const double kappa = path.kappa_effective;
    // first jump index whose post-jump value exceeds t
    std::size_t lo = 0, hi = path.jump_times.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        const double v = kappa * path.jump_times[mid] + path.jump_cum[mid];
        if (v > t)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double cum_before = (lo == 0) ? 0.0 : path.jump_cum[lo - 1];
    if (kappa > 0.0) {
        const double u_lin = (t - cum_before) / kappa;
        if (lo == path.jump_times.size() || u_lin < path.jump_times[lo])
            return std::max(0.0, u_lin);
    }
    if (lo == path.jump_times.size())
        throw horizon_error("time beyond simulated subordinator horizon");
    return path.jump_times[lo];
}

}  // namespace subdiff::levy
