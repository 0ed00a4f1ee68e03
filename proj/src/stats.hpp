#pragma once

#include <span>
#include <string>
#include <vector>

namespace subdiff::harness {

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool rejected = false;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

// Two-sample Kolmogorov-Smirnov with the asymptotic critical value
// c(level) * sqrt((n+m)/(n*m)), c(level) = sqrt(-log(level/2)/2).
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level);

struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Normal-approximation confidence interval for the mean.
MeanCi mc_mean_ci(std::span<const double> samples, double level);

double mean_of(std::span<const double> samples);
double stderr_of(std::span<const double> samples);

// Inverse standard normal CDF (Acklam's rational approximation, refined
// with one Halley step; |error| < 1e-13 on (0,1)).
double normal_quantile(double p);

}  // namespace subdiff::harness
