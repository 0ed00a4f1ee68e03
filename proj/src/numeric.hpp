#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace subdiff::harness {

// 15-point Gauss-Legendre on [a,b].
template <typename F>
double gl15(F&& f, double a, double b) {
    static const double xs[8] = {0.0,
                                 0.2011940939974345,
                                 0.3941513470775634,
                                 0.5709721726085388,
                                 0.7244177313601700,
                                 0.8482065834104272,
                                 0.9372733924007059,
                                 0.9879925180204854};
    static const double ws[8] = {0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
                                 0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
                                 0.0703660474881081, 0.0307532419961173};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = ws[0] * f(mid);
    for (int i = 1; i < 8; ++i) {
        const double dx = half * xs[i];
        s += ws[i] * (f(mid - dx) + f(mid + dx));
    }
    return s * half;
}

// Panel integration over geometric panels [a*r^k, a*r^(k+1)] covering [a,b].
template <typename F>
double gl15_geometric(F&& f, double a, double b, int panels_per_decade = 4) {
    if (!(b > a) || a <= 0.0) return 0.0;
    const double decades = std::log10(b / a);
    const int n = std::max(1, static_cast<int>(std::ceil(decades * panels_per_decade)));
    const double step = std::pow(b / a, 1.0 / n);
    double s = 0.0;
    double lo = a;
    for (int k = 0; k < n; ++k) {
        const double hi = (k + 1 == n) ? b : lo * step;
        s += gl15(f, lo, hi);
        lo = hi;
    }
    return s;
}

// Composite Simpson over tabulated values on a uniform grid (n odd count).
double simpson_uniform(std::span<const double> values, double dx);

// Simpson integral of tabulated (possibly non-uniform via trapezoid fallback).
double trapezoid(std::span<const double> xs, std::span<const double> ys);

// Cumulative trapezoid: out[i] = integral up to xs[i].
std::vector<double> cumulative_trapezoid(std::span<const double> xs, std::span<const double> ys);

double lerp_at(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace subdiff::harness
