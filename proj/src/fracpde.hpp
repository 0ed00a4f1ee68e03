#pragma once

#include <functional>
#include <span>
#include <vector>

#include "levy.hpp"
#include "rng.hpp"

namespace subdiff::fracpde {

enum class GeneratorKind { Bessel2PlusTransport, HeatPlusTransport };

struct TimeFracProblem {
    GeneratorKind kind = GeneratorKind::HeatPlusTransport;
    std::function<double(double, double)> initial;  // f(z, s)
    levy::LaplaceExponent exponent = levy::LaplaceExponent::drift(1.0);
    double z_max = 8.0;
    double s_max = 8.0;
    double vanish_radius = 0.0;  // bessel kind: f(z,.) == 0 for z < radius
};

struct SolutionSample {
    double value = 0.0;
    double stderr_ = 0.0;  // MC standard error, or scheme-error estimate
};

// u(z,s;t) = E[f(xi(E(t)))]; the inner-time marginal E(t) is drawn exactly
// for stable exponents and from a simulated path otherwise. The Bessel
// coordinate is the modulus of a planar Brownian motion, exact in law.
SolutionSample solve_mc(const TimeFracProblem& problem, double z, double s, double t,
                        std::size_t n_paths, harness::RngStream& rng);

// one exact-in-law draw of E(t)
double sample_inverse_subordinator(const levy::LaplaceExponent& exponent, double t,
                                   harness::RngStream& rng, double path_step = 1e-3);

struct FdGrids {
    int nz = 160;
    int ns = 120;
    int nt = 192;
};

// Implicit L1 scheme for c * D_t^beta u = L u, central in z, upwind in s.
// The solve marches each time level by an s-sweep of tridiagonal z-solves.
SolutionSample solve_caputo_l1(const TimeFracProblem& problem, double z, double s, double t,
                               const FdGrids& grids);

// Integrated-kernel table Wbar[j] = int_0^{t_j} w(u) du on a uniform grid;
// the convolution weights of the generalized derivative are its differences.
std::vector<double> generalized_kernel_weights(const levy::LevyTail& tail,
                                               std::span<const double> time_grid);

// d/dt [kappa f + int w(t-x)(f(x)-f(0))dx] at grid index n from the table.
double apply_generalized_derivative(std::span<const double> wbar, double kappa,
                                    std::span<const double> f, double dt, std::size_t n);

}  // namespace subdiff::fracpde
