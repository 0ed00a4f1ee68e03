#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "excursions.hpp"
#include "levy.hpp"
#include "pathlab.hpp"
#include "rng.hpp"
#include "stats.hpp"

using namespace subdiff;

namespace {

pathlab::SamplePath make_path(std::vector<double> times, std::vector<double> values) {
    pathlab::SamplePath p;
    p.times = std::move(times);
    p.values = std::move(values);
    p.start = p.values.front();
    return p;
}

std::shared_ptr<levy::SubordinatorPath> drift_sub(double kappa, double horizon) {
    auto p = std::make_shared<levy::SubordinatorPath>();
    p->kappa_effective = kappa;
    p->grid_times = {0.0, horizon};
    p->values = {0.0, kappa * horizon};
    return p;
}

pathlab::TimeChangedPath wrap_tc(std::shared_ptr<const pathlab::SamplePath> src,
                                 std::shared_ptr<const levy::SubordinatorPath> sub) {
    pathlab::TimeChangedPath tc;
    tc.source = std::move(src);
    tc.subordinator = std::move(sub);
    tc.outer_times = {0.0};
    tc.inner_times = {levy::invert_subordinator(*tc.subordinator, 0.0)};
    tc.values = {tc.source->at(tc.inner_times[0])};
    return tc;
}

}  // namespace

TEST_CASE("interval extraction by hand") {
    const auto p = make_path({0, 1, 2, 3, 4, 5, 6}, {0, 1, 2, 0, -1, 0, 3});
    const auto ex = excursions::extract_excursions(p, 0.0, 6.0);
    REQUIRE(ex.size() == 3);
    CHECK(ex[0].start == doctest::Approx(0.0));
    CHECK(ex[0].end == doctest::Approx(3.0));
    CHECK(ex[0].sign == 1);
    CHECK(ex[0].finished);
    CHECK(ex[1].start == doctest::Approx(3.0));
    CHECK(ex[1].end == doctest::Approx(5.0));
    CHECK(ex[1].sign == -1);
    CHECK(ex[1].finished);
    CHECK(ex[2].start == doctest::Approx(5.0));
    CHECK(ex[2].end == doctest::Approx(6.0));
    CHECK(ex[2].sign == 1);
    CHECK_FALSE(ex[2].finished);
}

TEST_CASE("flat and one-sided paths") {
    const auto flat = make_path({0, 1, 2}, {0.5, 0.5, 0.5});
    CHECK(excursions::extract_excursions(flat, 0.5, 2.0).empty());
    const auto above = make_path({0, 1, 2}, {1.0, 2.0, 1.5});
    const auto ex = excursions::extract_excursions(above, 0.0, 2.0);
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].start == 0.0);
    CHECK(ex[0].end == 2.0);
    CHECK_FALSE(ex[0].finished);
    CHECK(ex[0].sup_abs == doctest::Approx(2.0));
}

TEST_CASE("interpolated crossings split at the level") {
    const auto p = make_path({0, 1, 2}, {-1.0, 1.0, -1.0});
    const auto ex = excursions::extract_excursions(p, 0.0, 2.0);
    REQUIRE(ex.size() == 3);
    CHECK(ex[0].end == doctest::Approx(0.5));
    CHECK(ex[1].start == doctest::Approx(0.5));
    CHECK(ex[1].end == doctest::Approx(1.5));
    CHECK(ex[1].sign == 1);
}

TEST_CASE("parisian clock by hand") {
    // below L = 0 on (2, 5)
    const auto p = make_path({0, 1, 2, 3, 4, 5, 6}, {1, 1, 0, -1, -1, 0, 1});
    CHECK(excursions::parisian_clock(p, 0.0, 1.0) == doctest::Approx(3.0));
    CHECK(std::isinf(excursions::parisian_clock(p, 0.0, 4.0)));
    const auto up = make_path({0, 1}, {1.0, 2.0});
    CHECK(std::isinf(excursions::parisian_clock(up, 0.5, 0.5)));
    // monotone in D on a rough random path
    harness::RngStream rng(3, 3);
    const auto grid = levy::uniform_grid(1.0, 1e-3);
    const auto b = pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng);
    double prev = 0.0;
    for (double d : {0.01, 0.05, 0.1, 0.2}) {
        const double h = excursions::parisian_clock(b, 0.0, d);
        CHECK(h >= prev);
        prev = h;
    }
}

TEST_CASE("first long negative excursion on a constructed path") {
    // negative excursions of lengths 0.5 and 2.0
    const auto p = make_path({0.0, 0.25, 0.5, 1.0, 2.0, 3.0, 3.5},
                             {0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0});
    // durations: first negative (0,0.5) length 0.5; second (2.0, 3.5) length 1.5
    auto tc = wrap_tc(std::make_shared<pathlab::SamplePath>(p), drift_sub(1.0, 4.0));
    const auto ev1 = excursions::first_long_negative_excursion(tc, 1.0);
    CHECK(ev1.found);
    CHECK(ev1.g_star == doctest::Approx(2.0));
    CHECK(ev1.d_star == doctest::Approx(3.5));
    CHECK(ev1.e_g_star == doctest::Approx(2.0));  // identity: E(g*) = g*
    CHECK(ev1.e_d_star == doctest::Approx(3.5));
    CHECK(ev1.H == doctest::Approx(3.0));
    const auto ev2 = excursions::first_long_negative_excursion(tc, 0.25);
    CHECK(ev2.g_star == doctest::Approx(0.0));  // the very first negative one
    CHECK(ev2.d_star == doctest::Approx(0.5));
    const auto ev3 = excursions::first_long_negative_excursion(tc, 10.0);
    CHECK_FALSE(ev3.found);
    CHECK(ev3.censored);
}

TEST_CASE("ranked lengths by hand") {
    // reflected-style path with positive components 0.5, 0.3, 0.2 on [0,1]
    const auto p = make_path({0.0, 0.25, 0.5, 0.65, 0.8, 0.9, 1.0},
                             {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
    auto tc = wrap_tc(std::make_shared<pathlab::SamplePath>(p), drift_sub(1.0, 1.5));
    const auto r = excursions::ranked_relative_lengths(tc, 1.0);
    REQUIRE(r.lengths.size() == 3);
    CHECK(r.lengths[0] == doctest::Approx(0.5));
    CHECK(r.lengths[1] == doctest::Approx(0.3));
    CHECK(r.lengths[2] == doctest::Approx(0.2));
    double sum = 0.0;
    for (double v : r.lengths) sum += v;
    CHECK(sum <= 1.0 + 1e-12);

    // single excursion covering everything
    const auto one = make_path({0.0, 0.5, 1.0, 1.5}, {0.0, 1.0, 2.0, 1.0});
    auto tc1 = wrap_tc(std::make_shared<pathlab::SamplePath>(one), drift_sub(1.0, 2.0));
    const auto r1 = excursions::ranked_relative_lengths(tc1, 1.0);
    REQUIRE(r1.lengths.size() == 1);
    CHECK(r1.lengths[0] == doctest::Approx(1.0));
}

TEST_CASE("count long excursions by hand") {
    const auto p = make_path({0.0, 0.25, 0.5, 0.65, 0.8, 0.9, 1.0},
                             {0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
    auto tc = wrap_tc(std::make_shared<pathlab::SamplePath>(p), drift_sub(1.0, 1.5));
    CHECK(excursions::count_long_excursions(tc, 1.0, 0.25) == 2);
    CHECK_THROWS(excursions::count_long_excursions(tc, 1.0, 2.0));
}

TEST_CASE("stick breaking basics") {
    harness::RngStream rng(7, 7);
    const auto degenerate = excursions::sample_pd(0.0, 10, rng);
    CHECK(degenerate.lengths.front() == doctest::Approx(1.0));
    for (int rep = 0; rep < 50; ++rep) {
        const auto pd = excursions::sample_pd(0.4, 5000, rng);
        double sum = 0.0;
        for (std::size_t i = 0; i < pd.lengths.size(); ++i) {
            sum += pd.lengths[i];
            if (i) CHECK(pd.lengths[i] <= pd.lengths[i - 1] + 1e-15);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK_THROWS(excursions::sample_pd(1.2, 10, rng));
}

// dual oracle: stick-breaking vs ranked normalized jumps of a stable
// subordinator on [0,1]
TEST_CASE("stick breaking agrees with ranked stable jumps") {
    const double alpha = 0.4;
    const std::size_t n = 2000;
    std::vector<double> v1_sticks(n), v1_jumps(n);
    for (std::size_t i = 0; i < n; ++i) {
        harness::RngStream rng(1001, i);
        v1_sticks[i] = excursions::sample_pd(alpha, 20000, rng).lengths.front();
    }
    for (std::size_t i = 0; i < n; ++i) {
        harness::RngStream rng(2002, i);
        // jumps above delta of a unit-rate alpha-stable subordinator on [0,1]:
        // Poisson(nu(delta,inf)) many, sizes delta * U^{-1/alpha}
        const double delta = 1e-9;
        const double rate = std::pow(delta, -alpha);  // up to a constant, cancels
        double t = rng.exponential() / rate;
        double total = 0.0, biggest = 0.0;
        while (t <= 1.0) {
            const double y = delta * std::pow(rng.u01_open(), -1.0 / alpha);
            total += y;
            biggest = std::max(biggest, y);
            t += rng.exponential() / rate;
        }
        v1_jumps[i] = biggest / total;
    }
    const auto ks = harness::ks_two_sample(v1_sticks, v1_jumps, 0.01);
    CHECK_FALSE(ks.rejected);
}

TEST_CASE("xi coupling: drift cases are exact") {
    // w: tent excursion on [0, 1]
    pathlab::SamplePath w;
    w.times = levy::uniform_grid(1.0, 0.05);
    w.values.resize(w.times.size());
    for (std::size_t i = 0; i < w.times.size(); ++i)
        w.values[i] = std::min(w.times[i], 1.0 - w.times[i]);
    w.values.front() = 0.0;
    w.values.back() = 0.0;

    levy::SubordinatorPath identity;
    identity.kappa_effective = 1.0;
    identity.grid_times = {0.0, 2.0};
    identity.values = {0.0, 2.0};
    const auto same = excursions::xi_time_change_excursion(w, identity, 1.0);
    CHECK(same.times.back() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < w.times.size(); ++i)
        CHECK(same.at(w.times[i]) == doctest::Approx(w.values[i]).epsilon(1e-12));

    levy::SubordinatorPath twice = identity;
    twice.kappa_effective = 2.0;
    twice.values = {0.0, 4.0};
    const auto stretched = excursions::xi_time_change_excursion(w, twice, 2.0);
    CHECK(stretched.times.back() == doctest::Approx(2.0));
    CHECK(stretched.at(1.0) == doctest::Approx(w.at(0.5)).epsilon(1e-12));
}

TEST_CASE("xi preserves the supremum exactly") {
    harness::RngStream rng(55, 1);
    // random positive excursion shape
    pathlab::SamplePath w;
    w.times = levy::uniform_grid(1.0, 0.01);
    w.values.assign(w.times.size(), 0.0);
    for (std::size_t i = 1; i + 1 < w.times.size(); ++i)
        w.values[i] = std::fabs(std::sin(7.0 * w.times[i])) + 0.2 * rng.u01();
    double sup_w = 0.0;
    for (double v : w.values) sup_w = std::max(sup_w, v);

    // lumped stable subordinator sampled on the excursion's own knots
    const auto sub = levy::sample_stable_subordinator(1.0, 0.6, w.times, rng);
    const auto mapped = excursions::xi_time_change_excursion(w, sub, 0.0);
    double sup_m = 0.0;
    for (double v : mapped.values) sup_m = std::max(sup_m, v);
    CHECK(sup_m == doctest::Approx(sup_w).epsilon(1e-12));
    CHECK(mapped.times.back() == doctest::Approx(sub.value_at(1.0)));
}

TEST_CASE("xi duration matches S(zeta) in law") {
    const double beta = 0.6, zeta = 0.7;
    const std::size_t n = 30000;
    std::vector<double> durations(n), reference(n);
    pathlab::SamplePath w;
    w.times = levy::uniform_grid(zeta, 0.35);
    w.values = {0.0, 1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        harness::RngStream rng(3003, i);
        const auto sub = levy::sample_stable_subordinator(1.0, beta, w.times, rng);
        durations[i] = excursions::xi_time_change_excursion(w, sub, 0.0).times.back();
        harness::RngStream rng2(4004, i);
        reference[i] = harness::stable_increment(rng2, 1.0, beta, zeta);
    }
    std::vector<double> lt_a(n), lt_b(n);
    for (std::size_t i = 0; i < n; ++i) {
        lt_a[i] = std::exp(-durations[i]);
        lt_b[i] = std::exp(-reference[i]);
    }
    const double ma = harness::mean_of(lt_a), mb = harness::mean_of(lt_b);
    const double se = std::sqrt(std::pow(harness::stderr_of(lt_a), 2) +
                                std::pow(harness::stderr_of(lt_b), 2));
    CHECK(std::fabs(ma - mb) < 3.0 * se);
}

TEST_CASE("excursion boundaries form a valid grid") {
    harness::RngStream rng(66, 2);
    const auto grid = levy::uniform_grid(1.0, 1e-3);
    const auto b = pathlab::simulate_bm(0.0, 0.0, 1.0, grid, rng);
    const auto r = pathlab::reflect_at_running_min(b);
    const auto bounds = excursions::excursion_boundaries(r.reflected, 0.0);
    REQUIRE(bounds.size() >= 2);
    CHECK(bounds.front() == 0.0);
    CHECK(bounds.back() == doctest::Approx(1.0));
    for (std::size_t i = 1; i < bounds.size(); ++i) CHECK(bounds[i] > bounds[i - 1]);
}
