#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "levy.hpp"
#include "pathlab.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace subdiff;

namespace {

std::shared_ptr<levy::SubordinatorPath> drift_path(double kappa, double horizon) {
    auto p = std::make_shared<levy::SubordinatorPath>();
    p->kappa_effective = kappa;
    p->grid_times = {0.0, horizon};
    p->values = {0.0, kappa * horizon};
    return p;
}

}  // namespace

TEST_CASE("bm moments") {
    const auto grid = levy::uniform_grid(1.0, 1.0 / 64.0);
    const std::size_t n = 100000;
    std::vector<double> ends(n), drifted(n);
    for (std::size_t i = 0; i < n; ++i) {
        harness::RngStream rng(11, i);
        ends[i] = pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng).values.back();
        harness::RngStream rng2(12, i);
        drifted[i] = pathlab::simulate_bm(0.0, 1.0, 1.0, grid, rng2).values.back();
    }
    // Var[B(1)] = 1
    double s2 = 0.0;
    for (double v : ends) s2 += v * v;
    const double var = s2 / n;
    CHECK(std::fabs(var - 1.0) < 3.0 * std::sqrt(2.0 / n));
    // drift alpha = 1: mean of X(1) - x0 is -1
    const double md = harness::mean_of(drifted);
    CHECK(std::fabs(md + 1.0) < 3.0 * harness::stderr_of(drifted));
}

TEST_CASE("degenerate grid keeps the start value") {
    harness::RngStream rng(1, 1);
    const std::vector<double> grid = {0.0};
    const auto p = pathlab::simulate_bm(1.5, 0.3, 2.0, grid, rng);
    CHECK(p.values == std::vector<double>{1.5});
    CHECK_THROWS(pathlab::simulate_bm(0.0, 0.0, 0.0, grid, rng));
}

TEST_CASE("reflection by hand") {
    pathlab::SamplePath p;
    p.times = {0.0, 1.0, 2.0};
    p.start = 0.0;

    p.values = {0.0, -1.0, -2.0};
    auto r = pathlab::reflect_at_running_min(p);
    CHECK(r.reflected.values == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(r.neg_running_min == std::vector<double>{0.0, 1.0, 2.0});

    p.values = {0.0, 1.0, 0.5};
    r = pathlab::reflect_at_running_min(p);
    CHECK(r.reflected.values == std::vector<double>{0.0, 1.0, 0.5});

    p.values = {0.0, -1.0, 1.0};
    r = pathlab::reflect_at_running_min(p);
    CHECK(r.reflected.values == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("reflection nonnegativity and local time monotonicity") {
    const auto grid = levy::uniform_grid(1.0, 1e-3);
    harness::RngStream rng(21, 4);
    const auto b = pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng);
    const auto r = pathlab::reflect_at_running_min(b);
    for (std::size_t i = 0; i < r.reflected.values.size(); ++i) {
        CHECK(r.reflected.values[i] >= 0.0);
        if (i) {
            CHECK(r.neg_running_min[i] >= r.neg_running_min[i - 1]);
            if (r.neg_running_min[i] > r.neg_running_min[i - 1])
                CHECK(r.reflected.values[i] == 0.0);  // increases only at zeros
        }
    }
}

TEST_CASE("identity and scaled drift time changes") {
    const auto grid = levy::uniform_grid(1.0, 0.01);
    harness::RngStream rng(31, 0);
    auto inner = std::make_shared<pathlab::SamplePath>(
        pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng));

    const auto outer = levy::uniform_grid(1.0, 0.01);
    const auto tc1 = pathlab::time_change(inner, drift_path(1.0, 1.2), outer);
    for (std::size_t i = 0; i < outer.size(); ++i)
        CHECK(tc1.values[i] == doctest::Approx(inner->at(outer[i])).epsilon(1e-12));

    const auto tc2 = pathlab::time_change(inner, drift_path(2.0, 1.2), outer);
    for (std::size_t i = 0; i < outer.size(); ++i)
        CHECK(tc2.values[i] == doctest::Approx(inner->at(outer[i] / 2.0)).epsilon(1e-12));
}

TEST_CASE("a jump produces an exactly constant trap") {
    // S(u) = u for u < 0.5, then a jump of size 3
    auto sub = std::make_shared<levy::SubordinatorPath>();
    sub->kappa_effective = 1.0;
    sub->grid_times = {0.0, 0.5, 1.0};
    sub->jump_times = {0.5};
    sub->jump_sizes = {3.0};
    sub->jump_cum = {3.0};
    sub->values = {0.0, 3.5, 4.0};

    auto inner = std::make_shared<pathlab::SamplePath>();
    inner->times = levy::uniform_grid(1.0, 0.01);
    inner->values = inner->times;  // X(u) = u
    inner->start = 0.0;

    const auto outer = levy::uniform_grid(3.2, 0.05);
    const auto tc = pathlab::time_change(inner, sub, outer);
    int trap_hits = 0;
    for (std::size_t i = 0; i < outer.size(); ++i) {
        if (outer[i] > 0.5 && outer[i] < 3.5) {
            CHECK(tc.values[i] == 0.5);  // bitwise constant on the trap
            ++trap_hits;
        }
    }
    CHECK(trap_hits > 10);
    CHECK_THROWS_AS((void)pathlab::time_change(inner, sub, levy::uniform_grid(5.0, 0.5)),
                    levy::horizon_error);
}

TEST_CASE("gbm mapping is a pointwise exponential") {
    const auto grid = levy::uniform_grid(0.5, 0.01);
    harness::RngStream rng(41, 3);
    auto inner = std::make_shared<pathlab::SamplePath>(
        pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng));
    auto sub = drift_path(1.0, 0.6);
    const auto tc = pathlab::time_change(inner, sub, levy::uniform_grid(0.5, 0.01));
    const double sigma = 0.2, x = 1.3, level = 1.1;
    const auto stock = pathlab::gbm_under_P(x, sigma, tc);
    const double b = std::log(level / x) / sigma;
    for (std::size_t i = 0; i < stock.values.size(); ++i) {
        CHECK(stock.values[i] == doctest::Approx(x * std::exp(sigma * tc.values[i])));
        CHECK((stock.values[i] < level) == (tc.values[i] < b));  // log monotonicity
    }
    CHECK_THROWS(pathlab::gbm_under_P(-1.0, sigma, tc));
}

// quadratic variation of the time-changed driftless path approximates E(t)
TEST_CASE("quadratic variation proxy") {
    const double beta = 0.7;
    const std::size_t n_paths = 200;
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n_paths; ++i) {
        harness::RngStream rng(51, i);
        const auto inner_grid = levy::uniform_grid(4.0, 1e-4);
        auto inner = std::make_shared<pathlab::SamplePath>(
            pathlab::simulate_bm(0.0, 0.0, 1.0, inner_grid, rng));
        auto sub = std::make_shared<levy::SubordinatorPath>(
            levy::sample_stable_subordinator(1.0, beta, inner_grid, rng));
        if (sub->max_value() < 1.0) continue;
        const auto outer = levy::uniform_grid(1.0, 1e-3);
        const auto tc = pathlab::time_change(inner, sub, outer);
        double qv = 0.0;
        for (std::size_t k = 1; k < tc.values.size(); ++k) {
            const double d = tc.values[k] - tc.values[k - 1];
            qv += d * d;
        }
        const double e_t = tc.inner_times.back();
        if (e_t > 0.05) ratios.push_back(qv / e_t);
    }
    REQUIRE(ratios.size() > 100);
    const double m = harness::mean_of(ratios);
    CHECK(std::fabs(m - 1.0) < 0.1);
}
