#include "rayknight.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "parallel.hpp"

namespace subdiff::rayknight {

namespace {

// phi(g(r)) with memoization on the g-value (g is typically piecewise constant)
class PhiOfG {
public:
    PhiOfG(const levy::LaplaceExponent& e, const std::function<double(double)>& g)
        : e_(e), g_(g) {}
    double operator()(double r) {
        const double gv = g_(r);
        auto it = cache_.find(gv);
        if (it != cache_.end()) return it->second;
        const double p = levy::phi_eval(e_, gv);
        cache_.emplace(gv, p);
        return p;
    }

private:
    const levy::LaplaceExponent& e_;
    const std::function<double(double)>& g_;
    std::map<double, double> cache_;
};

// backward RK4 for u' = psi(u) - h(r) on [lo, hi] with u(hi) = terminal
template <typename Psi, typename H>
std::pair<std::vector<double>, std::vector<double>> solve_backward(double lo, double hi,
                                                                   double terminal, double step,
                                                                   Psi&& psi, H&& h,
                                                                   bool* clipped) {
    const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / step - 1e-12));
    const double dr = (hi - lo) / static_cast<double>(n);
    std::vector<double> rs(n + 1), us(n + 1);
    for (std::size_t k = 0; k <= n; ++k) rs[k] = hi - static_cast<double>(k) * dr;
    rs[n] = lo;
    us[0] = terminal;
    const auto f = [&](double r, double u) { return psi(u) - h(r); };
    for (std::size_t k = 0; k < n; ++k) {
        const double r = rs[k];
        const double u = us[k];
        const double k1 = f(r, u);
        const double k2 = f(r - 0.5 * dr, u - 0.5 * dr * k1);
        const double k3 = f(r - 0.5 * dr, u - 0.5 * dr * k2);
        const double k4 = f(r - dr, u - dr * k3);
        double next = u - dr / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (next < 0.0) {
            if (next < -1e-12 && clipped) *clipped = true;
            next = 0.0;
        }
        us[k + 1] = next;
    }
    std::reverse(rs.begin(), rs.end());
    std::reverse(us.begin(), us.end());
    return {std::move(rs), std::move(us)};
}

// cumulative integral from the right on a uniform table: Simpson pairs on
// even offsets, a 3-point Newton-Cotes patch on odd ones
std::vector<double> cumulative_from_right(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t off = 1; off < n; ++off) {
        const std::size_t i = n - 1 - off;
        if (off == 1)
            c[i] = c[i + 1] + 0.5 * h * (f[i] + f[i + 1]);
        else if (off % 2 == 0)
            c[i] = c[i + 2] + h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
        else
            c[i] = c[i + 1] + h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2]);
    }
    return c;
}

}  // namespace

RiccatiSolution solve_u(const RiccatiProblem& problem, double step, double residual_tol) {
    if (!(problem.a > 0.0)) throw std::domain_error("support bound a must be positive");
    if (problem.alpha < 0.0) throw std::domain_error("alpha must be nonnegative");
    if (!(step > 0.0) || step > 1e-3 * problem.a)
        throw std::invalid_argument("step must satisfy step <= 1e-3 * a");
    PhiOfG phig(problem.exponent, problem.g);
    RiccatiSolution sol;
    const double alpha = problem.alpha;
    auto [rs, us] = solve_backward(
        0.0, problem.a, 0.0, step, [&](double u) { return 2.0 * u * u + 2.0 * alpha * u; },
        [&](double r) { return phig(r); }, &sol.clipped);
    sol.r = std::move(rs);
    sol.u = std::move(us);

    // residual of u(r) + 2 int_r^a (u^2 + alpha u) = int_r^a phi(g)
    const double h = sol.r[1] - sol.r[0];
    std::vector<double> quad(sol.u.size()), rhsv(sol.u.size());
    for (std::size_t i = 0; i < sol.u.size(); ++i) {
        quad[i] = 2.0 * (sol.u[i] * sol.u[i] + alpha * sol.u[i]);
        rhsv[i] = phig(sol.r[i]);
    }
    const auto cq = cumulative_from_right(quad, h);
    const auto cr = cumulative_from_right(rhsv, h);
    double res = 0.0;
    for (std::size_t i = 0; i < sol.u.size(); ++i)
        res = std::max(res, std::fabs(sol.u[i] + cq[i] - cr[i]));
    sol.residual = res;
    if (res > residual_tol)
        throw std::runtime_error("Riccati integral-equation residual above tolerance");
    return sol;
}

double lt_occupation_functional(const RiccatiProblem& problem, double x, double step) {
    if (x < 0.0) throw std::domain_error("x must be nonnegative");
    if (x == 0.0) return 1.0;
    const auto sol = solve_u(problem, step);
    const double h = sol.r[1] - sol.r[0];
    const double xe = std::min(x, problem.a);
    // Simpson pairs up to the last even node before xe, then fine trapezoid
    double acc = 0.0;
    std::size_t i = 0;
    while (i + 2 < sol.r.size() && sol.r[i + 2] <= xe + 1e-15) {
        acc += h / 3.0 * (sol.u[i] + 4.0 * sol.u[i + 1] + sol.u[i + 2]);
        i += 2;
    }
    while (i + 1 < sol.r.size() && sol.r[i + 1] <= xe + 1e-15) {
        acc += 0.5 * h * (sol.u[i] + sol.u[i + 1]);
        ++i;
    }
    if (i + 1 < sol.r.size() && sol.r[i] < xe) {
        const double frac = xe - sol.r[i];
        const double unext = sol.u[i] + (sol.u[i + 1] - sol.u[i]) * frac / h;
        acc += 0.5 * frac * (sol.u[i] + unext);
    }
    return std::exp(-2.0 * acc);
}

pathlab::SamplePath cbi_simulate(const CBISpec& spec, double horizon, double step,
                                 harness::RngStream& rng) {
    if (!(step > 0.0 && horizon > 0.0)) throw std::invalid_argument("need positive step, horizon");
    if (step * spec.lin_coeff >= 1.0)
        throw std::invalid_argument("step too large for the linear drift");
    const std::size_t n = static_cast<std::size_t>(std::ceil(horizon / step));
    const double dv = horizon / static_cast<double>(n);
    pathlab::SamplePath p;
    p.start = spec.x0;
    p.times.resize(n + 1);
    p.values.resize(n + 1);
    p.values[0] = spec.x0;
    const double imm = spec.immigration ? 2.0 : 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p.times[k] = static_cast<double>(k) * dv;
        const double zp = std::max(0.0, p.values[k]);
        const double drift = (imm - spec.lin_coeff * zp) * dv;
        const double diff = std::sqrt(2.0 * spec.quad_coeff * zp * dv) * rng.normal();
        p.values[k + 1] = std::max(0.0, p.values[k] + drift + diff);
    }
    p.times[n] = horizon;
    return p;
}

double cbi_integral_lt(const CBISpec& spec, const std::function<double(double)>& g, double K,
                       double x, const levy::LaplaceExponent* compose, double step) {
    if (!(K > spec.r0)) throw std::domain_error("support bound must exceed the start time");
    const auto psi = [&](double u) { return spec.quad_coeff * u * u + spec.lin_coeff * u; };
    const auto h = [&](double r) { return compose ? levy::phi_eval(*compose, g(r)) : g(r); };
    bool clipped = false;
    auto [rs, us] = solve_backward(spec.r0, K, 0.0, step, psi, h, &clipped);
    double integral_phihat = 0.0;
    if (spec.immigration) {
        const double dr = rs[1] - rs[0];
        std::vector<double> f(us.size());
        for (std::size_t i = 0; i < us.size(); ++i) f[i] = 2.0 * us[i];
        const auto c = cumulative_from_right(f, dr);
        integral_phihat = c.front();
    }
    return std::exp(-x * us.front() - integral_phihat);
}

double warren_concatenation_lt(const RiccatiProblem& problem, double x, double step) {
    if (!(x > 0.0 && x <= problem.a)) throw std::domain_error("need 0 < x <= a");
    PhiOfG phig(problem.exponent, problem.g);
    const double alpha = problem.alpha;
    const auto psi = [&](double u) { return 2.0 * u * u + 2.0 * alpha * u; };
    // piece on [x, a]: no immigration, terminal 0
    auto [rs2, us2] = solve_backward(x, problem.a, 0.0, step, psi,
                                     [&](double r) { return phig(r); }, nullptr);
    const double wx = us2.front();
    // piece on [0, x]: immigration 2 lambda, terminal w(x)
    auto [rs1, us1] = solve_backward(0.0, x, wx, step, psi, [&](double r) { return phig(r); },
                                     nullptr);
    const double dr = rs1[1] - rs1[0];
    std::vector<double> f(us1.size());
    for (std::size_t i = 0; i < us1.size(); ++i) f[i] = 2.0 * us1[i];
    const auto c = cumulative_from_right(f, dr);
    return std::exp(-c.front());
}

OccupationMcResult occupation_functional_mc(const RiccatiProblem& problem, double x,
                                            std::size_t n_paths, double inner_step,
                                            double inner_cap, std::uint64_t seed,
                                            unsigned workers) {
    if (!(x > 0.0)) throw std::domain_error("start level x must be positive");
    const auto& e = problem.exponent;
    const bool stable = e.kind() == levy::LaplaceExponent::Kind::Stable;
    const double delta = e.kind() == levy::LaplaceExponent::Kind::DriftPlusJumps
                             ? levy::choose_delta(e.tail())
                             : 0.0;
    std::vector<double> vals(n_paths);
    std::vector<char> censored(n_paths, 0);
    const double h = inner_step;
    const double sqrt_h = std::sqrt(h);
    const auto g_of = [&](double v) {
        return (v >= 0.0 && v <= problem.a) ? problem.g(v) : 0.0;
    };

    harness::parallel_for(n_paths, workers, [&](std::size_t i) {
        harness::RngStream rng(seed, i);
        double w_acc = 0.0;    // int g(X) dS so far
        double run_len = 0.0;  // current constant-g run length
        double run_g = g_of(x);
        double pos = x;
        double inner = 0.0;
        bool done = false;
        auto flush_run = [&](double len) {
            if (len <= 0.0 || run_g == 0.0) return;
            double ds;
            if (stable)
                ds = harness::stable_increment(rng, e.c(), e.beta(), len);
            else if (e.kind() == levy::LaplaceExponent::Kind::Drift)
                ds = e.kappa() * len;
            else
                ds = levy::sample_marginal(e, len, rng, delta);
            w_acc += run_g * ds;
        };
        while (!done && inner < inner_cap) {
            const double nxt = pos - problem.alpha * h + sqrt_h * rng.normal();
            if (nxt <= 0.0) {
                // crossing inside the cell: linear fraction
                const double frac = pos / (pos - nxt);
                flush_run(run_len + frac * h);
                run_len = 0.0;
                done = true;
                break;
            }
            // Brownian-bridge probability of an unseen dip to zero
            const double p_kill = std::exp(-2.0 * pos * nxt / h);
            if (rng.u01() < p_kill) {
                flush_run(run_len + 0.5 * h);
                run_len = 0.0;
                done = true;
                break;
            }
            const double g_here = g_of(nxt);
            if (g_here == run_g) {
                run_len += h;
            } else {
                flush_run(run_len + h);  // cell attributed to the previous run
                run_len = 0.0;
                run_g = g_here;
            }
            pos = nxt;
            inner += h;
        }
        if (!done) {
            flush_run(run_len);
            censored[i] = 1;
        }
        vals[i] = std::exp(-w_acc);
    });

    OccupationMcResult out;
    double s = 0.0, s2 = 0.0, cen = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        s += vals[i];
        s2 += vals[i] * vals[i];
        cen += censored[i];
    }
    const double n = static_cast<double>(n_paths);
    out.estimate = s / n;
    out.stderr_ = std::sqrt(std::max(0.0, s2 / n - out.estimate * out.estimate) / n);
    out.censored_fraction = cen / n;
    return out;
}

}  // namespace subdiff::rayknight
