#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "levy.hpp"

namespace subdiff::transforms {

struct QuadratureConfig {
    std::size_t pool_size = 4'000'000;  // stable marginal pool
    int nodes_per_decade = 24;          // log-spaced t nodes
    std::size_t node_samples = 20'000;  // per-node samples for jump exponents
    double t_small = 1.5e-3;            // below: one-jump expansion, no MC
    double rel_tolerance = 1e-3;
};

// The measure pi(ds,dt) = P(S(t) in ds) (2 pi t^3)^{-1/2} dt and its
// restrictions pi+ (s > D) and pi- (s <= D).
class PiCalculus {
public:
    PiCalculus(levy::LaplaceExponent exponent, double D, QuadratureConfig cfg = {},
               std::uint64_t seed = 20240901);

    const levy::LaplaceExponent& exponent() const { return exponent_; }
    double duration() const { return D_; }

    double pi_plus_mass() const;
    double mu() const { return 0.5 * pi_plus_mass(); }

    struct Integrals {
        double i_minus = 0.0;  // int (1 - e^{-lambda s - theta t}) pi-(ds,dt)
        double j_plus = 0.0;   // int e^{-lambda s - theta t} pi+(ds,dt)
        bool warning = false;
    };
    Integrals pi_exp_integrals(double lambda, double theta) const;

    double m1_lt(double lambda, double theta) const;
    double m2_lt(double lambda, double theta) const;

    // |(Iminus + pi+ mass - Jplus) - sqrt(2(phi+theta))| / sqrt(2(phi+theta))
    double full_measure_residual(double lambda, double theta) const;

private:
    struct NodeStats {
        double below_frac = 0.0;  // P(S(t) <= D)
        double q_sum = 0.0;       // mean e^{-lambda S} 1_{S<=D}
        double p_sum = 0.0;       // mean e^{-lambda S} 1_{S>D}
    };

    void ensure_nodes() const;
    double pi_plus_mass_unlocked() const;
    const std::vector<NodeStats>& lambda_stats(double lambda) const;
    double nu_tail_exp(double lambda) const;   // int_D^inf e^{-lambda r} nu(dr)
    double nu_tail_one_minus(double lambda) const;  // int_D^inf (1-e^{-lambda r}) nu(dr)

    levy::LaplaceExponent exponent_;
    double D_;
    QuadratureConfig cfg_;
    std::uint64_t seed_;

    mutable std::mutex mutex_;
    mutable bool nodes_ready_ = false;
    mutable std::vector<double> pool_;                       // sorted stable marginals at t=1
    mutable std::vector<double> nodes_;                      // t ladder
    mutable std::vector<std::vector<double>> node_samples_;  // sorted S(t_j) draws (jump kind)
    mutable std::map<double, std::vector<NodeStats>> stats_cache_;
    mutable std::map<std::pair<double, double>, Integrals> integral_cache_;
    mutable double mass_cache_ = -1.0;
};

// Joint transform of (S(tau_x), tau_x): exp(-x sqrt(2 (phi(lambda)+theta))).
double hitting_pair_lt(const levy::LaplaceExponent& exponent, double x, double lambda,
                       double theta);

// Real-axis Laplace inversion; order must be even and within [8, 18].
// The optional error estimate is the discrepancy against half the order.
double gaver_stehfest(const std::function<double(double)>& transform, double t, int order,
                      double* error_estimate = nullptr);

}  // namespace subdiff::transforms
