#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"

namespace subdiff::levy {

struct horizon_error : std::runtime_error {
    explicit horizon_error(const std::string& what) : std::runtime_error(what) {}
};

// Integrated upper tail of the Levy measure, w(x) = nu(x, infinity), with a
// caller-certified value of the integral of w over (0,1].
struct LevyTail {
    std::function<double(double)> w;
    double integral01 = 0.0;
};

// Laplace exponent phi(lambda) = kappa*lambda + int (1 - e^{-lambda r}) nu(dr).
class LaplaceExponent {
public:
    enum class Kind { Stable, Drift, DriftPlusJumps };

    static LaplaceExponent stable(double c, double beta);
    static LaplaceExponent drift(double kappa);
    static LaplaceExponent drift_plus_jumps(double kappa, LevyTail tail);

    Kind kind() const { return kind_; }
    double c() const { return c_; }
    double beta() const { return beta_; }
    double kappa() const { return kappa_; }
    const LevyTail& tail() const { return *tail_; }
    bool has_infinite_activity() const;

    double operator()(double lambda) const { return phi_eval(*this, lambda); }

    friend double phi_eval(const LaplaceExponent& exponent, double lambda);

private:
    LaplaceExponent() = default;
    Kind kind_ = Kind::Drift;
    double c_ = 0.0;
    double beta_ = 0.0;
    double kappa_ = 0.0;
    std::optional<LevyTail> tail_;
};

double phi_eval(const LaplaceExponent& exponent, double lambda);

// One draw of S(t) for a given exponent. Stable and pure-drift kinds are
// exact; the jump kind simulates the truncated PRM with mean compensation.
double sample_marginal(const LaplaceExponent& exponent, double t, harness::RngStream& rng,
                       double delta = 1e-6);

// tail integral of w over [a, b], 0 <= a < b, using the certificate to pin
// the mass hiding below the quadrature floor.
double tail_integral(const LevyTail& tail, double a, double b);

// mean of jumps below delta, i.e. int_0^delta y nu(dy).
double small_jump_mean(const LevyTail& tail, double delta);

// largest delta with small_jump_mean(delta) below the budget (per unit time).
double choose_delta(const LevyTail& tail, double budget = 1e-4);

// generalized inverse sampling of a jump size >= delta: inf{r : w(r) <= u w(delta)}.
double inverse_tail_sample(const LevyTail& tail, double delta, double u);

struct SubordinatorPath {
    // Represented path: S(u) = kappa_effective * u + sum of jumps at times <= u.
    std::vector<double> grid_times;  // inner time grid, increasing from 0
    std::vector<double> values;      // S at the grid nodes
    std::vector<double> jump_times;  // sorted
    std::vector<double> jump_sizes;
    std::vector<double> jump_cum;  // cumulative jump mass including this jump
    double kappa_effective = 0.0;

    double horizon() const { return grid_times.back(); }
    double max_value() const { return values.back(); }
    double value_at(double u) const;
    bool strictly_increasing() const { return kappa_effective > 0.0; }
};

// Stable subordinator on an arbitrary increasing grid starting at 0: the
// increment over each cell is one stable variate, recorded as a jump at the
// cell's right endpoint.
SubordinatorPath sample_stable_subordinator(double c, double beta, std::span<const double> grid,
                                            harness::RngStream& rng);

// Drift plus PRM jumps of size >= delta; smaller jumps are compensated by
// their mean rate, recorded in kappa_effective.
SubordinatorPath sample_general_subordinator(double kappa, const LevyTail& tail, double delta,
                                             std::span<const double> grid, harness::RngStream& rng,
                                             bool allow_finite_activity = false);

// E(t) = inf{u : S(u) > t} for the represented path. Exact at jumps.
double invert_subordinator(const SubordinatorPath& path, double t);

std::vector<double> uniform_grid(double horizon, double step);

}  // namespace subdiff::levy
