#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "levy.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "transforms.hpp"

using namespace subdiff;
using transforms::PiCalculus;
using transforms::QuadratureConfig;

namespace {

QuadratureConfig test_quad() {
    QuadratureConfig q;
    q.pool_size = 400000;  // unit-test scale
    return q;
}

}  // namespace

TEST_CASE("stable pi+ mass closed form") {
    // sqrt(2c) D^{-beta/2} / Gamma(1 - beta/2)
    PiCalculus calc(levy::LaplaceExponent::stable(1.0, 0.5), 1.0, test_quad(), 1);
    CHECK(calc.pi_plus_mass() ==
          doctest::Approx(std::sqrt(2.0) / std::tgamma(0.75)).epsilon(1e-12));
    CHECK(calc.pi_plus_mass() == doctest::Approx(1.15407).epsilon(1e-4));
    CHECK(calc.mu() == doctest::Approx(0.57703).epsilon(1e-4));

    // scaling in D: mass(D=4)/mass(D=1) = 4^{-beta/4}... for beta = 0.5
    PiCalculus calc4(levy::LaplaceExponent::stable(1.0, 0.5), 4.0, test_quad(), 1);
    CHECK(calc4.pi_plus_mass() / calc.pi_plus_mass() ==
          doctest::Approx(std::pow(4.0, -0.25)).epsilon(1e-12));

    // monotone decreasing in D
    double prev = 1e300;
    for (double d : {1.0, 10.0, 100.0}) {
        PiCalculus c(levy::LaplaceExponent::stable(1.0, 0.7), d, test_quad(), 1);
        CHECK(c.pi_plus_mass() < prev);
        prev = c.pi_plus_mass();
    }
}

TEST_CASE("exp integrals at the origin") {
    PiCalculus calc(levy::LaplaceExponent::stable(1.0, 0.7), 0.1, test_quad(), 2);
    const auto ints = calc.pi_exp_integrals(0.0, 0.0);
    CHECK(ints.i_minus == 0.0);
    CHECK(ints.j_plus == doctest::Approx(calc.pi_plus_mass()));
    CHECK(calc.m1_lt(0.0, 0.0) == 1.0);
    CHECK(calc.m2_lt(0.0, 0.0) == 1.0);
}

TEST_CASE("j_plus decreases in theta") {
    PiCalculus calc(levy::LaplaceExponent::stable(1.0, 0.7), 0.1, test_quad(), 3);
    double prev = calc.pi_exp_integrals(1.0, 1.0).j_plus;
    for (double th : {10.0, 100.0}) {
        const double cur = calc.pi_exp_integrals(1.0, th).j_plus;
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("complete monotonicity of the m transforms on a grid") {
    PiCalculus calc(levy::LaplaceExponent::stable(1.0, 0.7), 0.1, test_quad(), 4);
    const std::vector<double> grid = {0.0, 0.5, 1.0, 2.0};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double m1 = calc.m1_lt(grid[i], grid[j]);
            const double m2 = calc.m2_lt(grid[i], grid[j]);
            CHECK(m1 > 0.0);
            CHECK(m1 <= 1.0);
            CHECK(m2 > 0.0);
            CHECK(m2 <= 1.0);
            if (i) {
                CHECK(m1 <= calc.m1_lt(grid[i - 1], grid[j]) + 1e-9);
                CHECK(m2 <= calc.m2_lt(grid[i - 1], grid[j]) + 1e-9);
            }
            if (j) {
                CHECK(m1 <= calc.m1_lt(grid[i], grid[j - 1]) + 1e-9);
                CHECK(m2 <= calc.m2_lt(grid[i], grid[j - 1]) + 1e-9);
            }
        }
    }
}

TEST_CASE("full-measure identity for every exponent kind") {
    levy::LevyTail tail;
    tail.w = [](double x) { return x < 2.0 ? 0.7 * std::pow(x, -0.5) : 0.7 * std::pow(2.0, -0.5) *
                                                      std::exp(2.0 - x); };
    tail.integral01 = 1.4;  // int_0^1 0.7 x^{-1/2} dx
    const std::vector<levy::LaplaceExponent> kinds = {
        levy::LaplaceExponent::stable(1.0, 0.7),
        levy::LaplaceExponent::drift(1.5),
        levy::LaplaceExponent::drift_plus_jumps(0.3, tail),
    };
    const std::vector<double> tol = {2e-3, 1e-6, 2e-2};
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        PiCalculus calc(kinds[k], 0.25, test_quad(), 5);
        for (double lam : {0.5, 2.0})
            for (double th : {0.5, 2.0})
                CHECK(calc.full_measure_residual(lam, th) < tol[k]);
    }
}

// the s-marginal of pi is the Levy measure of S(tau_x): for stable kinds the
// theta = 0 integrals have a second, closed-form route
TEST_CASE("stable j_plus at theta zero against the explicit Levy density") {
    const double c = 1.0, beta = 0.7, D = 0.1;
    PiCalculus calc(levy::LaplaceExponent::stable(c, beta), D, test_quad(), 6);
    const double coef = std::sqrt(2.0 * c) / std::tgamma(1.0 - 0.5 * beta) * 0.5 * beta;
    for (double lam : {0.5, 1.0, 2.0}) {
        // int_D^inf e^{-lam s} nu*(ds), nu*(ds) = coef s^{-beta/2 - 1} ds
        double expected = 0.0;
        const int n = 400000;
        const double hi = D + 60.0 / lam;
        const double dh = (hi - D) / n;
        for (int i = 0; i < n; ++i) {
            const double s = D + (i + 0.5) * dh;
            expected += std::exp(-lam * s) * coef * std::pow(s, -0.5 * beta - 1.0) * dh;
        }
        const double got = calc.pi_exp_integrals(lam, 0.0).j_plus;
        CHECK(got == doctest::Approx(expected).epsilon(5e-3));
    }
}

TEST_CASE("hitting pair transform") {
    const auto identity = levy::LaplaceExponent::drift(1.0);
    CHECK(transforms::hitting_pair_lt(identity, 0.0, 3.0, 1.0) == 1.0);
    CHECK(transforms::hitting_pair_lt(identity, 1.0, 2.0, 0.0) ==
          doctest::Approx(std::exp(-2.0)));
    // MC oracle: first passage of BM to -x plus an independent subordinator
    const double x = 0.7, lam = 0.8, beta = 0.6;
    const auto stable = levy::LaplaceExponent::stable(1.0, beta);
    const std::size_t n = 30000;
    std::vector<double> vals(n);
    std::size_t used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        harness::RngStream rng(31415, i);
        // exact first passage: tau_x = x^2 / G^2 in law
        double g = rng.normal();
        while (g == 0.0) g = rng.normal();
        const double tau = x * x / (g * g);
        if (tau > 1e8) {  // truncate the far tail; e^{-lam S(tau)} is zero there
            vals[used++] = 0.0;
            continue;
        }
        const double s_tau = harness::stable_increment(rng, 1.0, beta, tau);
        vals[used++] = std::exp(-lam * s_tau);
    }
    const double mean = harness::mean_of(vals);
    const double se = harness::stderr_of(vals);
    const double expected = transforms::hitting_pair_lt(stable, x, lam, 0.0);
    CHECK(std::fabs(mean - expected) < 3.0 * se + 1e-4);
}

TEST_CASE("gaver-stehfest standards") {
    const auto one_over_s = [](double s) { return 1.0 / s; };
    const auto exp_decay = [](double s) { return 1.0 / (s + 1.0); };
    const auto ramp = [](double s) { return 1.0 / (s * s); };
    for (double t : {0.5, 1.0, 2.0}) {
        CHECK(transforms::gaver_stehfest(one_over_s, t, 12) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(transforms::gaver_stehfest(ramp, t, 12) == doctest::Approx(t).epsilon(1e-6));
        CHECK(transforms::gaver_stehfest(exp_decay, t, 12) ==
              doctest::Approx(std::exp(-t)).epsilon(1e-6));
    }
    double err = 0.0;
    const double v = transforms::gaver_stehfest(exp_decay, 1.0, 14, &err);
    CHECK(std::fabs(v - std::exp(-1.0)) < 1e-7);
    CHECK(err < 1e-4);
    CHECK_THROWS(transforms::gaver_stehfest(one_over_s, 1.0, 7));
    CHECK_THROWS(transforms::gaver_stehfest(one_over_s, 1.0, 20));
    CHECK_THROWS(transforms::gaver_stehfest(one_over_s, 0.0, 12));
}
