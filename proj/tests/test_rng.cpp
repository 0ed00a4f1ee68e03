#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rng.hpp"

using subdiff::harness::RngStream;

TEST_CASE("streams reproduce bit-identically") {
    RngStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct streams differ") {
    RngStream a(42, 7), b(42, 8), c(43, 7);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 64; ++i) {
        const auto x = a.next_u64();
        if (x == b.next_u64()) ++same_ab;
        if (x == c.next_u64()) ++same_ac;
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
}

TEST_CASE("uniform moments") {
    RngStream rng(1, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.u01();
        s += u;
        s2 += u * u;
    }
    CHECK(std::fabs(s / n - 0.5) < 0.005);
    CHECK(std::fabs(s2 / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("normal moments") {
    RngStream rng(2, 0);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.normal();
        s += g;
        s2 += g * g;
        s4 += g * g * g * g;
    }
    CHECK(std::fabs(s / n) < 0.01);
    CHECK(std::fabs(s2 / n - 1.0) < 0.02);
    CHECK(std::fabs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("exponential and gamma means") {
    RngStream rng(3, 0);
    const int n = 100000;
    double se = 0.0, sg = 0.0;
    for (int i = 0; i < n; ++i) {
        se += rng.exponential();
        sg += rng.gamma(2.5);
    }
    CHECK(std::fabs(se / n - 1.0) < 0.02);
    CHECK(std::fabs(sg / n - 2.5) < 0.03);
}

TEST_CASE("beta mean") {
    RngStream rng(4, 0);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rng.beta(0.6, 2.0);
    CHECK(std::fabs(s / n - 0.6 / 2.6) < 0.005);
}

// The stable sampler is pinned through its Laplace transform: for the
// normalized variate, E[exp(-lambda V)] = exp(-lambda^beta).
TEST_CASE("stable positive Laplace transform") {
    for (double beta : {0.3, 0.5, 0.7, 0.9}) {
        RngStream rng(5, static_cast<std::uint64_t>(beta * 100));
        const int n = 200000;
        double s1 = 0.0, s2 = 0.0, sq1 = 0.0, sq2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = rng.stable_positive(beta);
            const double e1 = std::exp(-v);
            const double e2 = std::exp(-2.0 * v);
            s1 += e1;
            sq1 += e1 * e1;
            s2 += e2;
            sq2 += e2 * e2;
        }
        const double m1 = s1 / n, m2 = s2 / n;
        const double se1 = std::sqrt((sq1 / n - m1 * m1) / n);
        const double se2 = std::sqrt((sq2 / n - m2 * m2) / n);
        CHECK(std::fabs(m1 - std::exp(-1.0)) < 3.5 * se1);
        CHECK(std::fabs(m2 - std::exp(-std::pow(2.0, beta))) < 3.5 * se2);
    }
}

TEST_CASE("stable positivity and domain errors") {
    RngStream rng(6, 0);
    for (int i = 0; i < 1000; ++i) CHECK(rng.stable_positive(0.5) > 0.0);
    CHECK_THROWS(rng.stable_positive(0.0));
    CHECK_THROWS(rng.stable_positive(1.0));
    CHECK_THROWS(rng.gamma(-1.0));
}
