#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "levy.hpp"
#include "rng.hpp"
#include "transforms.hpp"

namespace subdiff::pricing {

struct contract_error : std::domain_error {
    explicit contract_error(const std::string& what) : std::domain_error(what) {}
};

struct MarketSpec {
    double x = 1.0;      // initial stock price
    double sigma = 0.2;  // volatility; interest rate is fixed at zero
    levy::LaplaceExponent exponent = levy::LaplaceExponent::stable(1.0, 0.7);
};

struct ParisianContract {
    double L = 1.0;  // barrier
    double D = 0.1;  // duration
    double T = 1.0;  // maturity
    std::function<double(double)> payoff;
    double support_lo = 0.0;  // payoff vanishes outside [support_lo, support_hi]
    double support_hi = 0.0;
};

// smooth bump supported on [lo, hi], peak height one
std::function<double(double)> bump_payoff(double lo, double hi);

struct PriceEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    std::string method;
    double censored_fraction = 0.0;
};

struct McControls {
    double inner_step = 1e-3;
    double outer_horizon = 30.0;     // event-law sampling horizon
    double inner_cap_steps = 4e6;    // per-path inner step budget
    unsigned workers = 1;
    std::uint64_t seed = 1;
    std::size_t u_curve_nodes = 97;
    std::size_t u_curve_samples = 400000;
    bool bypass_time_change = false;  // run the clock on the plain Brownian path
};

// Monte Carlo of eqn-form E[1{ring <= T} f_{x,sigma}(B(E(T)), E(T)) Phi(...)]
// under the Brownian representation; works for any barrier.
PriceEstimate price_direct_mc(const MarketSpec& market, const ParisianContract& contract,
                              std::size_t n_paths, const McControls& controls);

// Excursion decomposition for barrier L = x: case terms driven by samples of
// (g*, E(g*)) and (d*, E(d*)) with the two time-fractional solution curves.
PriceEstimate price_decomposition(const MarketSpec& market, const ParisianContract& contract,
                                  std::size_t n_paths, const McControls& controls);

struct EventLawPoint {
    double lambda = 0.0, theta = 0.0;
    double empirical_m1 = 0.0, closed_m1 = 0.0, z_m1 = 0.0;
    double empirical_m2 = 0.0, closed_m2 = 0.0, z_m2 = 0.0;
};

struct EventLawReport {
    std::vector<EventLawPoint> points;
    double max_abs_z = 0.0;
    double censored_fraction = 0.0;  // paths with no ring by the horizon
    std::size_t n_paths = 0;
};

// Empirical joint Laplace transforms of the first-long-excursion marks
// against the closed forms m1/m2.
EventLawReport validate_event_laws(const MarketSpec& market, const ParisianContract& contract,
                                   std::size_t n_paths, std::span<const double> lambdas,
                                   std::span<const double> thetas, const McControls& controls,
                                   const transforms::QuadratureConfig& quad = {});

// One draw of the first long negative excursion of B* about zero.
struct EventSample {
    bool ring = false;
    bool d_open = false;  // ring, but the excursion outlives the horizon
    double g_star = 0.0, d_star = 0.0;
    double e_g = 0.0, e_d = 0.0;
};
EventSample sample_first_long_excursion(const levy::LaplaceExponent& exponent, double D,
                                        double inner_step, double g_limit, double outer_horizon,
                                        double inner_cap_steps, harness::RngStream& rng);

}  // namespace subdiff::pricing
