#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subdiff::harness {

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t ia = 0, ib = 0;
    double d = 0.0;
    while (ia < sa.size() && ib < sb.size()) {
        const double x = std::min(sa[ia], sb[ib]);
        while (ia < sa.size() && sa[ia] <= x) ++ia;
        while (ib < sb.size() && sb[ib] <= x) ++ib;
        d = std::max(d, std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    const double c = std::sqrt(-0.5 * std::log(level / 2.0));
    TestReport r;
    r.name = "ks_two_sample";
    r.statistic = d;
    r.threshold = c * std::sqrt((na + nb) / (na * nb));
    r.rejected = d > r.threshold;
    r.n_a = sa.size();
    r.n_b = sb.size();
    return r;
}

double mean_of(std::span<const double> samples) {
    double s = 0.0;
    for (double x : samples) s += x;
    return s / static_cast<double>(samples.size());
}

double stderr_of(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    const double m = mean_of(samples);
    double ss = 0.0;
    for (double x : samples) ss += (x - m) * (x - m);
    return std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
}

MeanCi mc_mean_ci(std::span<const double> samples, double level) {
    if (samples.size() < 2) throw std::invalid_argument("mc_mean_ci: need n >= 2");
    MeanCi ci;
    ci.n = samples.size();
    ci.mean = mean_of(samples);
    ci.stderr_ = stderr_of(samples);
    const double z = normal_quantile(0.5 + level / 2.0);
    ci.half_width = z * ci.stderr_;
    return ci;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley refinement against erfc
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * 3.14159265358979323846) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

}  // namespace subdiff::harness
