#pragma once

#include <functional>
#include <vector>

#include "levy.hpp"
#include "pathlab.hpp"
#include "rng.hpp"

namespace subdiff::rayknight {

struct RiccatiProblem {
    double a = 1.0;      // support bound of g
    double alpha = 0.0;  // downward drift of the diffusion
    levy::LaplaceExponent exponent = levy::LaplaceExponent::drift(1.0);
    std::function<double(double)> g;  // bounded, nonnegative, zero outside [0,a]
};

struct RiccatiSolution {
    std::vector<double> r;  // grid on [0, a]
    std::vector<double> u;
    double residual = 0.0;  // max defect of the integral equation
    bool clipped = false;   // u pushed back up from slightly negative values
};

// Backward RK4 for u' = 2u^2 + 2 alpha u - phi(g(r)), u(a) = 0.
// The step must satisfy step <= 1e-3 * a; the residual of the integral
// form is checked against the tolerance.
RiccatiSolution solve_u(const RiccatiProblem& problem, double step, double residual_tol = 1e-6);

// exp(-2 int_0^x u), with u extended by zero above a.
double lt_occupation_functional(const RiccatiProblem& problem, double x, double step = 1e-4);

struct CBISpec {
    double quad_coeff = 2.0;  // psi(l) = quad l^2 + lin l
    double lin_coeff = 0.0;   // 2 alpha
    bool immigration = true;  // phi_hat(l) = 2 l when true, else 0
    double x0 = 0.0;
    double r0 = 0.0;
};

// Full-truncation Euler for dZ = (imm - lin Z) dv + sqrt(2 quad Z) dW.
pathlab::SamplePath cbi_simulate(const CBISpec& spec, double horizon, double step,
                                 harness::RngStream& rng);

// E[exp(-int_0^K g(v) Z(v) dv)] (optionally with g replaced by phi o g for
// time-changed integrands): exp(-x u(0) - int_0^K phi_hat(u)).
double cbi_integral_lt(const CBISpec& spec, const std::function<double(double)>& g, double K,
                       double x, const levy::LaplaceExponent* compose = nullptr,
                       double step = 1e-4);

// Warren's two-piece route to the Theorem-5 functional: immigration on
// [0, x], none beyond; matches lt_occupation_functional arithmetic for
// commensurate steps.
double warren_concatenation_lt(const RiccatiProblem& problem, double x, double step = 1e-4);

struct OccupationMcResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double censored_fraction = 0.0;
};

// Direct Monte Carlo of E[exp(-int_0^{tau*} g(X*(t)) dt)] by accumulating
// subordinator increments along the killed inner diffusion; interior
// crossings are resolved by Brownian-bridge killing.
OccupationMcResult occupation_functional_mc(const RiccatiProblem& problem, double x,
                                            std::size_t n_paths, double inner_step,
                                            double inner_cap, std::uint64_t seed,
                                            unsigned workers);

}  // namespace subdiff::rayknight
