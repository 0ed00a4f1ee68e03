#include "transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numeric.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace subdiff::transforms {

namespace {

constexpr double kPi = 3.14159265358979323846;

// weight of the excursion-length measure, (2 pi t^3)^{-1/2}
inline double root_weight(double t) { return 1.0 / std::sqrt(2.0 * kPi * t * t * t); }

// int_0^a e^{-theta t} t^{-1/2} dt
double half_power_exp_integral(double a, double theta) {
    if (theta <= 0.0) return 2.0 * std::sqrt(a);
    return std::sqrt(kPi / theta) * std::erf(std::sqrt(theta * a));
}

}  // namespace

PiCalculus::PiCalculus(levy::LaplaceExponent exponent, double D, QuadratureConfig cfg,
                       std::uint64_t seed)
    : exponent_(std::move(exponent)), D_(D), cfg_(cfg), seed_(seed) {
    if (!(D > 0.0)) throw std::domain_error("duration D must be positive");
}

double PiCalculus::nu_tail_exp(double lambda) const {
    // int_D^inf e^{-lambda r} nu(dr)
    switch (exponent_.kind()) {
        case levy::LaplaceExponent::Kind::Stable: {
            const double c = exponent_.c(), beta = exponent_.beta();
            const double coef = c * beta / std::tgamma(1.0 - beta);
            const auto f = [&](double r) { return std::exp(-lambda * r) * std::pow(r, -1.0 - beta); };
            double hi = (lambda > 0.0) ? std::max(2.0 * D_, 60.0 / lambda) : 0.0;
            if (lambda == 0.0) return coef * std::pow(D_, -beta) / beta;
            return coef * harness::gl15_geometric(f, D_, hi, 10);
        }
        case levy::LaplaceExponent::Kind::Drift:
            return 0.0;
        case levy::LaplaceExponent::Kind::DriftPlusJumps: {
            // IBP: e^{-lambda D} w(D) - lambda int_D^inf e^{-lambda r} w(r) dr
            const auto& tail = exponent_.tail();
            if (lambda == 0.0) return tail.w(D_);
            const auto f = [&](double r) { return std::exp(-lambda * r) * tail.w(r); };
            const double hi = std::max(2.0 * D_, 60.0 / lambda);
            return std::exp(-lambda * D_) * tail.w(D_) -
                   lambda * harness::gl15_geometric(f, D_, hi, 10);
        }
    }
    return 0.0;
}

double PiCalculus::nu_tail_one_minus(double lambda) const {
    return nu_tail_exp(0.0) - nu_tail_exp(lambda);
}

void PiCalculus::ensure_nodes() const {
    if (nodes_ready_) return;
    const auto kind = exponent_.kind();
    if (kind == levy::LaplaceExponent::Kind::Drift) {
        nodes_ready_ = true;
        return;
    }
    harness::RngStream rng(seed_, 0x9e3779b9);
    double t_hi = 0.0;
    if (kind == levy::LaplaceExponent::Kind::Stable) {
        pool_.resize(cfg_.pool_size);
        for (auto& v : pool_) v = rng.stable_positive(exponent_.beta());
        std::sort(pool_.begin(), pool_.end());
        t_hi = std::pow(D_ / pool_.front(), exponent_.beta()) / exponent_.c();
    }
    const double ts = cfg_.t_small;
    if (kind == levy::LaplaceExponent::Kind::Stable) {
        t_hi = std::max(t_hi, ts * 1.05);
        const int n = std::max(
            3, static_cast<int>(std::ceil(std::log10(t_hi / ts) * cfg_.nodes_per_decade)) | 1);
        nodes_.resize(static_cast<std::size_t>(n));
        const double step = std::log(t_hi / ts) / (n - 1);
        for (int j = 0; j < n; ++j) nodes_[j] = ts * std::exp(step * j);
    } else {
        // ladder upward until all samples clear the threshold D
        nodes_.clear();
        node_samples_.clear();
        const double step = std::exp(std::log(10.0) / cfg_.nodes_per_decade);
        double t = ts;
        const double delta = levy::choose_delta(exponent_.tail());
        for (int j = 0; j < 60 * cfg_.nodes_per_decade; ++j) {
            std::vector<double> draws(cfg_.node_samples);
            harness::RngStream node_rng(seed_, 100 + static_cast<std::uint64_t>(j));
            for (auto& d : draws)
                d = levy::sample_marginal(exponent_, t, node_rng, delta);
            std::sort(draws.begin(), draws.end());
            const bool all_above = draws.front() > D_;
            nodes_.push_back(t);
            node_samples_.push_back(std::move(draws));
            t *= step;
            if (all_above) break;
        }
    }
    nodes_ready_ = true;
}

const std::vector<PiCalculus::NodeStats>& PiCalculus::lambda_stats(double lambda) const {
    auto it = stats_cache_.find(lambda);
    if (it != stats_cache_.end()) return it->second;
    ensure_nodes();
    std::vector<NodeStats> stats(nodes_.size());
    if (exponent_.kind() == levy::LaplaceExponent::Kind::Stable) {
        const double c = exponent_.c(), beta = exponent_.beta();
        const double n_inv = 1.0 / static_cast<double>(pool_.size());
        harness::parallel_for(nodes_.size(), 2, [&](std::size_t j) {
            const double t = nodes_[j];
            const double scale = std::pow(c * t, 1.0 / beta);
            const double threshold = D_ / scale;
            const auto split = std::upper_bound(pool_.begin(), pool_.end(), threshold);
            const std::size_t idx = static_cast<std::size_t>(split - pool_.begin());
            double q = 0.0, p = 0.0;
            const double a = lambda * scale;
            for (std::size_t i = 0; i < idx; ++i) q += std::exp(-a * pool_[i]);
            for (std::size_t i = idx; i < pool_.size(); ++i) p += std::exp(-a * pool_[i]);
            stats[j].below_frac = static_cast<double>(idx) * n_inv;
            stats[j].q_sum = q * n_inv;
            stats[j].p_sum = p * n_inv;
        });
    } else {
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            const auto& draws = node_samples_[j];
            const double n_inv = 1.0 / static_cast<double>(draws.size());
            const auto split = std::upper_bound(draws.begin(), draws.end(), D_);
            const std::size_t idx = static_cast<std::size_t>(split - draws.begin());
            double q = 0.0, p = 0.0;
            for (std::size_t i = 0; i < idx; ++i) q += std::exp(-lambda * draws[i]);
            for (std::size_t i = idx; i < draws.size(); ++i) p += std::exp(-lambda * draws[i]);
            stats[j].below_frac = static_cast<double>(idx) * n_inv;
            stats[j].q_sum = q * n_inv;
            stats[j].p_sum = p * n_inv;
        }
    }
    return stats_cache_.emplace(lambda, std::move(stats)).first->second;
}

double PiCalculus::pi_plus_mass() const {
    std::lock_guard lock(mutex_);
    return pi_plus_mass_unlocked();
}

double PiCalculus::pi_plus_mass_unlocked() const {
    if (mass_cache_ >= 0.0) return mass_cache_;
    double mass = 0.0;
    switch (exponent_.kind()) {
        case levy::LaplaceExponent::Kind::Stable: {
            const double c = exponent_.c(), beta = exponent_.beta();
            mass = std::sqrt(2.0 * c) / std::tgamma(1.0 - 0.5 * beta) * std::pow(D_, -0.5 * beta);
            break;
        }
        case levy::LaplaceExponent::Kind::Drift: {
            if (exponent_.kappa() <= 0.0) {
                mass = 0.0;
            } else {
                mass = std::sqrt(2.0 * exponent_.kappa() / (kPi * D_));
            }
            break;
        }
        case levy::LaplaceExponent::Kind::DriftPlusJumps: {
            ensure_nodes();
            const auto& stats = lambda_stats(0.0);
            // zone below t_small: one-jump expansion P(S(t)>D) ~ t nu(D,inf)
            mass = nu_tail_exp(0.0) * std::sqrt(2.0 * cfg_.t_small / kPi);
            std::vector<double> g(nodes_.size());
            for (std::size_t j = 0; j < nodes_.size(); ++j)
                g[j] = (1.0 - stats[j].below_frac) * root_weight(nodes_[j]) * nodes_[j];
            const double dx = std::log(nodes_[1] / nodes_[0]);
            mass += harness::simpson_uniform(g, dx);
            mass += std::sqrt(2.0 / (kPi * nodes_.back()));  // P(S>D) ~ 1 tail
            break;
        }
    }
    if (!std::isfinite(mass)) throw std::runtime_error("pi+ mass quadrature diverged");
    mass_cache_ = mass;
    return mass;
}

PiCalculus::Integrals PiCalculus::pi_exp_integrals(double lambda, double theta) const {
    if (lambda < 0.0 || theta < 0.0) throw std::domain_error("lambda, theta must be >= 0");
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(lambda, theta);
    if (auto it = integral_cache_.find(key); it != integral_cache_.end()) return it->second;

    Integrals out;
    if (lambda == 0.0 && theta == 0.0) {
        out.i_minus = 0.0;
        out.j_plus = pi_plus_mass_unlocked();
        integral_cache_.emplace(key, out);
        return out;
    }
    const double phi = levy::phi_eval(exponent_, lambda);

    if (exponent_.kind() == levy::LaplaceExponent::Kind::Drift) {
        // S(t) = kappa t: pi is supported on the line s = kappa t
        const double kappa = exponent_.kappa();
        const double rate = kappa * lambda + theta;
        if (kappa <= 0.0) {
            out.i_minus = (theta > 0.0) ? std::sqrt(2.0 * theta) : 0.0;
            out.j_plus = 0.0;
        } else {
            const double tD = D_ / kappa;
            const auto f_lower = [&](double t) {
                return (1.0 - std::exp(-rate * t)) * root_weight(t);
            };
            out.i_minus = rate * std::sqrt(2.0 * 1e-14 / kPi) +
                          harness::gl15_geometric(f_lower, 1e-14, tD, 10);
            const auto f_upper = [&](double t) { return std::exp(-rate * t) * root_weight(t); };
            const double hi = std::max(2.0 * tD, 80.0 / std::max(rate, 1e-300));
            out.j_plus = harness::gl15_geometric(f_upper, tD, hi, 10);
        }
        integral_cache_.emplace(key, out);
        return out;
    }

    ensure_nodes();
    const auto& stats = lambda_stats(lambda);
    const double ts = nodes_.front();
    const double dx = std::log(nodes_[1] / nodes_[0]);

    // zone (0, t_small]: one-jump expansion, no sampling noise
    const double nu_D = nu_tail_exp(0.0);
    const double K = nu_tail_exp(lambda);
    const double L = nu_D - K;
    const double tf = 1e-14;
    const auto f_small_i = [&](double t) {
        const double above = t * (nu_D - std::exp(-theta * t) * K);
        return ((1.0 - std::exp(-(phi + theta) * t)) - above) * root_weight(t);
    };
    double i_minus = (phi + theta - L) * std::sqrt(2.0 * tf / kPi) +
                     harness::gl15_geometric(f_small_i, tf, ts, 10);
    double j_plus = K / std::sqrt(2.0 * kPi) * half_power_exp_integral(ts, theta);

    // sampled zone
    std::vector<double> gi(nodes_.size()), gj(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
        const double t = nodes_[j];
        const double damp = std::exp(-theta * t);
        gi[j] = (stats[j].below_frac - damp * stats[j].q_sum) * root_weight(t) * t;
        gj[j] = damp * stats[j].p_sum * root_weight(t) * t;
    }
    i_minus += harness::simpson_uniform(gi, dx);
    j_plus += harness::simpson_uniform(gj, dx);

    // beyond the ladder: S(t) > D almost surely, restricted mean ~ full mean
    const double t_hi = nodes_.back();
    const auto f_tail = [&](double t) { return std::exp(-(theta + phi) * t) * root_weight(t); };
    const double rate = std::max(phi + theta, 1e-12);
    j_plus += harness::gl15_geometric(f_tail, t_hi, t_hi + 120.0 / rate, 8);

    out.i_minus = i_minus;
    out.j_plus = j_plus;
    out.warning = !std::isfinite(i_minus) || !std::isfinite(j_plus);
    if (out.warning) throw std::runtime_error("pi integral quadrature diverged");
    integral_cache_.emplace(key, out);
    return out;
}

double PiCalculus::m1_lt(double lambda, double theta) const {
    const double m = mu();
    if (lambda == 0.0 && theta == 0.0) return 1.0;
    const auto ints = pi_exp_integrals(lambda, theta);
    const double phi = levy::phi_eval(exponent_, lambda);
    const double den = m + std::sqrt(0.5 * (phi + theta)) + 0.5 * ints.i_minus;
    return m / den;
}

double PiCalculus::m2_lt(double lambda, double theta) const {
    if (lambda == 0.0 && theta == 0.0) return 1.0;
    const double m = mu();
    const auto ints = pi_exp_integrals(lambda, theta);
    const double phi = levy::phi_eval(exponent_, lambda);
    const double den = m + std::sqrt(0.5 * (phi + theta)) + 0.5 * ints.i_minus;
    return 0.5 * ints.j_plus / den;
}

double PiCalculus::full_measure_residual(double lambda, double theta) const {
    const double phi = levy::phi_eval(exponent_, lambda);
    const double target = std::sqrt(2.0 * (phi + theta));
    if (target == 0.0) return 0.0;
    const auto ints = pi_exp_integrals(lambda, theta);
    const double total = ints.i_minus + pi_plus_mass() - ints.j_plus;
    return std::fabs(total - target) / target;
}

double hitting_pair_lt(const levy::LaplaceExponent& exponent, double x, double lambda,
                       double theta) {
    if (x < 0.0) throw std::domain_error("local time level x must be >= 0");
    if (lambda < 0.0 || theta < 0.0) throw std::domain_error("lambda, theta must be >= 0");
    return std::exp(-x * std::sqrt(2.0 * (levy::phi_eval(exponent, lambda) + theta)));
}

namespace {

double gaver_stehfest_raw(const std::function<double(double)>& transform, double t, int order) {
    const int half = order / 2;
    static const long double kLn2 = 0.6931471805599453094172321214581766L;
    std::vector<long double> fact(static_cast<std::size_t>(2 * half + 1), 1.0L);
    for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * static_cast<long double>(i);
    long double sum = 0.0L;
    for (int k = 1; k <= order; ++k) {
        long double vk = 0.0L;
        const int j_lo = (k + 1) / 2;
        const int j_hi = std::min(k, half);
        for (int j = j_lo; j <= j_hi; ++j) {
            long double term = std::pow(static_cast<long double>(j), half) * fact[2 * j];
            term /= fact[half - j] * fact[j] * fact[j - 1] * fact[k - j] * fact[2 * j - k];
            vk += term;
        }
        if ((half + k) % 2 != 0) vk = -vk;
        const double s = static_cast<double>(kLn2 * k / t);
        sum += vk * static_cast<long double>(transform(s));
    }
    const double result = static_cast<double>(sum * kLn2 / t);
    if (!std::isfinite(result)) throw std::runtime_error("Gaver-Stehfest sum overflowed");
    return result;
}

}  // namespace

double gaver_stehfest(const std::function<double(double)>& transform, double t, int order,
                      double* error_estimate) {
    if (order < 8 || order > 18 || order % 2 != 0)
        throw std::domain_error("Gaver-Stehfest order must be even and within [8, 18]");
    if (!(t > 0.0)) throw std::domain_error("Gaver-Stehfest needs t > 0");
    const double value = gaver_stehfest_raw(transform, t, order);
    if (error_estimate) {
        int half_order = order / 2;
        if (half_order % 2 != 0) ++half_order;
        *error_estimate = std::fabs(value - gaver_stehfest_raw(transform, t, half_order));
    }
    return value;
}

}  // namespace subdiff::transforms
