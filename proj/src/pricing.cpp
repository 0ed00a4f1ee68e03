#include "pricing.hpp"

#include <algorithm>
#include <cmath>

#include "fracpde.hpp"
#include "numeric.hpp"
#include "parallel.hpp"

namespace subdiff::pricing {

namespace {

constexpr std::size_t kFlushEvery = 8192;

double sub_increment(const levy::LaplaceExponent& e, double len, harness::RngStream& rng,
                     double delta, bool bypass) {
    if (len <= 0.0) return 0.0;
    if (bypass) return 1.0 * len;
    switch (e.kind()) {
        case levy::LaplaceExponent::Kind::Stable:
            return harness::stable_increment(rng, e.c(), e.beta(), len);
        case levy::LaplaceExponent::Kind::Drift:
            return e.kappa() * len;
        case levy::LaplaceExponent::Kind::DriftPlusJumps:
            return levy::sample_marginal(e, len, rng, delta);
    }
    return 0.0;
}

}  // namespace

std::function<double(double)> bump_payoff(double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("bump support must be a nonempty interval");
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    return [mid, half](double s) {
        const double y = (s - mid) / half;
        if (std::fabs(y) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - y * y));
    };
}

EventSample sample_first_long_excursion(const levy::LaplaceExponent& exponent, double D,
                                        double inner_step, double g_limit, double outer_horizon,
                                        double inner_cap_steps, harness::RngStream& rng) {
    if (!(D > 0.0)) throw std::domain_error("duration must be positive");
    const double h = inner_step;
    const double sqrt_h = std::sqrt(h);
    const double delta = exponent.kind() == levy::LaplaceExponent::Kind::DriftPlusJumps
                             ? levy::choose_delta(exponent.tail())
                             : 0.0;

    EventSample ev;
    double tau = 0.0;          // outer time at the start of the open stretch
    double dur = 0.0;          // outer duration of the open stretch so far
    double stretch_start = 0.0;  // inner time of the open stretch start
    double seg_start = 0.0;      // inner start of the unflushed segment
    int sign = 0;
    double b = 0.0;
    double t_inner = 0.0;
    std::size_t steps = 0;
    bool ring = false;

    auto flush = [&](double upto) {
        if (upto > seg_start)
            dur += sub_increment(exponent, upto - seg_start, rng, delta, false);
        seg_start = upto;
    };

    while (static_cast<double>(steps) < inner_cap_steps) {
        const double b_next = b + sqrt_h * rng.normal();
        const double t_next = t_inner + h;
        ++steps;
        const int s_next = b_next > 0.0 ? 1 : (b_next < 0.0 ? -1 : 0);
        if (sign == 0) {
            sign = s_next;
            stretch_start = t_inner;
            seg_start = t_inner;
            dur = 0.0;
        } else if (s_next != 0 && s_next != sign) {
            // crossing inside the cell closes the stretch
            const double tc = t_inner + b / (b - b_next) * h;
            flush(tc);
            if (!ring && sign < 0 && dur > D) {
                ring = true;
                ev.ring = true;
                ev.g_star = tau;
                ev.e_g = stretch_start;
            }
            if (ring) {
                ev.d_star = tau + dur;
                ev.e_d = tc;
                return ev;
            }
            tau += dur;
            if (tau > g_limit) return ev;  // later stretches cannot ring in time
            sign = s_next;
            stretch_start = tc;
            seg_start = tc;
            dur = 0.0;
        } else if (s_next == 0) {
            // touched the level exactly: close at the sample
            flush(t_next);
            if (!ring && sign < 0 && dur > D) {
                ring = true;
                ev.ring = true;
                ev.g_star = tau;
                ev.e_g = stretch_start;
            }
            if (ring) {
                ev.d_star = tau + dur;
                ev.e_d = t_next;
                return ev;
            }
            tau += dur;
            if (tau > g_limit) return ev;
            sign = 0;
            dur = 0.0;
        }
        b = b_next;
        t_inner = t_next;
        if (steps % kFlushEvery == 0 && sign != 0) {
            flush(t_inner);
            if (!ring && sign < 0 && dur > D) {
                ring = true;
                ev.ring = true;
                ev.g_star = tau;
                ev.e_g = stretch_start;
            }
            if (ring && tau + dur > outer_horizon) {
                ev.d_open = true;
                return ev;
            }
            if (!ring && tau > g_limit) return ev;
        }
    }
    // inner budget exhausted
    if (ring) ev.d_open = true;
    return ev;
}

PriceEstimate price_direct_mc(const MarketSpec& market, const ParisianContract& contract,
                              std::size_t n_paths, const McControls& controls) {
    if (!(contract.D > 0.0) || !(contract.T > 0.0))
        throw contract_error("need positive duration and maturity");
    if (!(market.x > 0.0) || !(market.sigma > 0.0))
        throw contract_error("market needs positive price and volatility");
    const double h = controls.inner_step;
    const double sqrt_h = std::sqrt(h);
    const double barrier = std::log(contract.L / market.x) / market.sigma;
    const double T = contract.T;
    const bool bypass = controls.bypass_time_change;
    const auto& e = market.exponent;
    const bool drift_like =
        bypass || e.kind() == levy::LaplaceExponent::Kind::Drift;
    const double kappa_like = bypass ? 1.0 : e.kappa();
    const double delta = e.kind() == levy::LaplaceExponent::Kind::DriftPlusJumps
                             ? levy::choose_delta(e.tail())
                             : 0.0;

    std::vector<double> vals(n_paths, 0.0);
    std::vector<char> censored(n_paths, 0);

    harness::parallel_for(n_paths, controls.workers, [&](std::size_t i) {
        harness::RngStream rng_b(controls.seed, 2 * i);
        harness::RngStream rng_s(controls.seed, 2 * i + 1);

        double cum = 0.0;     // S at the current inner grid point
        double b_val = 0.0;   // driving Brownian motion
        double t_inner = 0.0;
        int sign = b_val > barrier ? 1 : (b_val < barrier ? -1 : 0);
        double stretch_g = 0.0;  // outer start of the open stretch
        bool ring = false;
        bool resolved = false;
        double e_T = 0.0, z_T = 0.0;
        std::size_t steps = 0;

        while (!resolved && static_cast<double>(steps) < controls.inner_cap_steps) {
            const double b_next = b_val + sqrt_h * rng_b.normal();
            ++steps;
            double remaining = h;
            double seg_b0 = b_val, seg_t0 = t_inner;
            const int s_next = b_next > barrier ? 1 : (b_next < barrier ? -1 : 0);
            // split the cell at a barrier crossing so stretch durations are exact
            if (sign != 0 && s_next != 0 && s_next != sign) {
                const double frac = (b_val - barrier) / (b_val - b_next);
                const double len1 = frac * h;
                const double ds1 =
                    bypass ? len1 : sub_increment(e, len1, rng_s, delta, false);
                const double cum_mid = cum + (bypass ? len1 : ds1);
                const double tc = t_inner + len1;
                if (cum_mid > T) {
                    // maturity inside the first sub-cell
                    if (drift_like) {
                        e_T = t_inner + (T - cum) / kappa_like;
                    } else {
                        e_T = tc;
                    }
                    const double wfrac = (e_T - seg_t0) / h;
                    z_T = seg_b0 + wfrac * (b_next - seg_b0);
                    if (sign < 0 && !ring) ring = (T - stretch_g > contract.D);
                    resolved = true;
                    break;
                }
                if (sign < 0 && cum_mid - stretch_g > contract.D) ring = true;
                cum = cum_mid;
                sign = s_next;
                stretch_g = cum;
                t_inner = tc;
                remaining = h - len1;
            }
            const double ds = bypass ? remaining : sub_increment(e, remaining, rng_s, delta, false);
            const double cum_next = cum + (bypass ? remaining : ds);
            const double t_next = t_inner + remaining;
            if (cum_next > T) {
                if (drift_like) {
                    e_T = t_inner + (T - cum) / kappa_like;
                } else {
                    e_T = t_next;
                }
                const double wfrac = (e_T - seg_t0) / h;
                z_T = seg_b0 + wfrac * (b_next - seg_b0);
                if (sign < 0 && !ring) ring = (T - stretch_g > contract.D);
                resolved = true;
                break;
            }
            if (sign == 0) {
                sign = s_next;
                stretch_g = cum;
            } else if (s_next == 0) {
                if (sign < 0 && cum_next - stretch_g > contract.D) ring = true;
                sign = 0;
            } else if (sign < 0 && cum_next - stretch_g > contract.D) {
                ring = true;
            }
            cum = cum_next;
            b_val = b_next;
            t_inner = t_next;
        }
        if (!resolved) {
            censored[i] = 1;
            return;
        }
        if (!ring) return;
        const double stock = market.x * std::exp(market.sigma * z_T);
        const double payoff = contract.payoff ? contract.payoff(stock) : 0.0;
        if (payoff == 0.0) return;
        vals[i] = std::exp(0.5 * market.sigma * z_T -
                           market.sigma * market.sigma / 8.0 * e_T) *
                  payoff;
    });

    PriceEstimate out;
    out.method = bypass ? "direct_mc_bypass" : "direct_mc";
    out.n_paths = n_paths;
    double s = 0.0, s2 = 0.0, cen = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        s += vals[i];
        s2 += vals[i] * vals[i];
        cen += censored[i];
    }
    const double n = static_cast<double>(n_paths);
    out.value = s / n;
    out.stderr_ = std::sqrt(std::max(0.0, s2 / n - out.value * out.value) / n);
    out.censored_fraction = cen / n;
    return out;
}

namespace {

void check_decomposition_contract(const MarketSpec& market, const ParisianContract& contract) {
    if (contract.L != market.x)
        throw contract_error("the decomposition pricer requires barrier L = x");
    if (!market.exponent.has_infinite_activity())
        throw contract_error("the decomposition pricer needs infinite Levy mass");
    if (!(contract.support_hi > contract.support_lo))
        throw contract_error("payoff must declare its support interval");
    if (market.x >= contract.support_lo && market.x <= contract.support_hi)
        throw contract_error("payoff must vanish in a neighborhood of x");
    if (!(contract.D > 0.0) || !(contract.T > contract.D))
        throw contract_error("need 0 < D < T");
}

}  // namespace

PriceEstimate price_decomposition(const MarketSpec& market, const ParisianContract& contract,
                                  std::size_t n_paths, const McControls& controls) {
    check_decomposition_contract(market, contract);
    const double sigma = market.sigma;
    const double T = contract.T;
    const double q = sigma * sigma / 8.0;

    // solution curves u1(0,0;tau), u2(0,0;tau) on a maturity ladder
    const std::size_t m = controls.u_curve_nodes;
    std::vector<double> taus(m), u1(m), u2(m), se1(m), se2(m);
    for (std::size_t k = 0; k < m; ++k)
        taus[k] = T * static_cast<double>(k) / static_cast<double>(m - 1);
    fracpde::TimeFracProblem p1;
    p1.kind = fracpde::GeneratorKind::Bessel2PlusTransport;
    p1.exponent = market.exponent;
    p1.initial = [=](double z, double s) {
        return std::exp(-0.5 * sigma * z - q * s) *
               (contract.payoff ? contract.payoff(market.x * std::exp(-sigma * z)) : 0.0);
    };
    fracpde::TimeFracProblem p2;
    p2.kind = fracpde::GeneratorKind::HeatPlusTransport;
    p2.exponent = market.exponent;
    p2.initial = [=](double z, double s) {
        return std::exp(0.5 * sigma * z - q * s) *
               (contract.payoff ? contract.payoff(market.x * std::exp(sigma * z)) : 0.0);
    };
    const std::uint64_t curve_seed = controls.seed ^ 0xC2B2AE3D27D4EB4FULL;
    harness::parallel_for(m, controls.workers, [&](std::size_t k) {
        harness::RngStream r1(curve_seed, 2 * k);
        harness::RngStream r2(curve_seed, 2 * k + 1);
        const auto s1 = fracpde::solve_mc(p1, 0.0, 0.0, taus[k], controls.u_curve_samples, r1);
        const auto s2 = fracpde::solve_mc(p2, 0.0, 0.0, taus[k], controls.u_curve_samples, r2);
        u1[k] = s1.value;
        se1[k] = s1.stderr_;
        u2[k] = s2.value;
        se2[k] = s2.stderr_;
    });

    std::vector<double> vals(n_paths, 0.0);
    std::vector<char> censored(n_paths, 0);
    std::vector<char> case1(n_paths, 0), case2(n_paths, 0);
    harness::parallel_for(n_paths, controls.workers, [&](std::size_t i) {
        harness::RngStream rng(controls.seed, i);
        const auto ev = sample_first_long_excursion(market.exponent, contract.D,
                                                    controls.inner_step, T - contract.D, T,
                                                    controls.inner_cap_steps, rng);
        if (!ev.ring || ev.g_star > T - contract.D) return;
        if (ev.d_open || ev.d_star > T) {
            // case 1: the excursion straddles maturity
            case1[i] = 1;
            vals[i] = std::exp(-q * ev.e_g) * harness::lerp_at(taus, u1, T - ev.g_star);
        } else {
            case2[i] = 1;
            vals[i] = std::exp(-q * ev.e_d) * harness::lerp_at(taus, u2, T - ev.d_star);
        }
    });

    PriceEstimate out;
    out.method = "decomposition";
    out.n_paths = n_paths;
    double s = 0.0, s2 = 0.0, w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        s += vals[i];
        s2 += vals[i] * vals[i];
        w1 += case1[i] ? 1.0 : 0.0;
        w2 += case2[i] ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(n_paths);
    out.value = s / n;
    const double se_paths = std::sqrt(std::max(0.0, s2 / n - out.value * out.value) / n);
    const double max_se1 = *std::max_element(se1.begin(), se1.end());
    const double max_se2 = *std::max_element(se2.begin(), se2.end());
    const double se_curves = (w1 / n) * max_se1 + (w2 / n) * max_se2;
    out.stderr_ = std::sqrt(se_paths * se_paths + se_curves * se_curves);
    out.censored_fraction = 0.0;
    return out;
}

EventLawReport validate_event_laws(const MarketSpec& market, const ParisianContract& contract,
                                   std::size_t n_paths, std::span<const double> lambdas,
                                   std::span<const double> thetas, const McControls& controls,
                                   const transforms::QuadratureConfig& quad) {
    if (contract.L != market.x)
        throw contract_error("event laws are defined for barrier L = x");
    if (!(contract.D > 0.0)) throw contract_error("need positive duration");

    struct Marks {
        double g = 0.0, eg = 0.0, d = 0.0, ed = 0.0;
        char ring = 0, closed = 0;
    };
    std::vector<Marks> marks(n_paths);
    harness::parallel_for(n_paths, controls.workers, [&](std::size_t i) {
        harness::RngStream rng(controls.seed, i);
        const auto ev = sample_first_long_excursion(
            market.exponent, contract.D, controls.inner_step, controls.outer_horizon,
            controls.outer_horizon, controls.inner_cap_steps, rng);
        marks[i].ring = ev.ring ? 1 : 0;
        marks[i].closed = (ev.ring && !ev.d_open) ? 1 : 0;
        marks[i].g = ev.g_star;
        marks[i].eg = ev.e_g;
        marks[i].d = ev.d_star;
        marks[i].ed = ev.e_d;
    });

    transforms::PiCalculus calc(market.exponent, contract.D, quad, controls.seed ^ 0x5bd1e995u);
    EventLawReport rep;
    rep.n_paths = n_paths;
    std::size_t rings = 0;
    for (const auto& mk : marks) rings += mk.ring;
    rep.censored_fraction = 1.0 - static_cast<double>(rings) / static_cast<double>(n_paths);

    std::vector<double> sample(n_paths);
    for (double lam : lambdas) {
        for (double th : thetas) {
            EventLawPoint pt;
            pt.lambda = lam;
            pt.theta = th;
            for (std::size_t i = 0; i < n_paths; ++i)
                sample[i] = marks[i].ring ? std::exp(-lam * marks[i].g - th * marks[i].eg) : 0.0;
            pt.empirical_m1 = harness::mean_of(sample);
            double se1 = harness::stderr_of(sample);
            pt.closed_m1 = calc.m1_lt(lam, th);
            pt.z_m1 = (pt.empirical_m1 - pt.closed_m1) / std::max(se1, 1e-300);

            for (std::size_t i = 0; i < n_paths; ++i)
                sample[i] = marks[i].closed ? std::exp(-lam * marks[i].d - th * marks[i].ed) : 0.0;
            pt.empirical_m2 = harness::mean_of(sample);
            double se2 = harness::stderr_of(sample);
            pt.closed_m2 = calc.m2_lt(lam, th);
            pt.z_m2 = (pt.empirical_m2 - pt.closed_m2) / std::max(se2, 1e-300);

            rep.max_abs_z = std::max({rep.max_abs_z, std::fabs(pt.z_m1), std::fabs(pt.z_m2)});
            rep.points.push_back(pt);
        }
    }
    return rep;
}

}  // namespace subdiff::pricing
