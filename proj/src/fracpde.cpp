#include "fracpde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "numeric.hpp"

namespace subdiff::fracpde {

double sample_inverse_subordinator(const levy::LaplaceExponent& e, double t,
                                   harness::RngStream& rng, double path_step) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    if (t == 0.0) return 0.0;
    switch (e.kind()) {
        case levy::LaplaceExponent::Kind::Stable: {
            // E(t) =d (t/V)^beta / c with V the normalized stable marginal
            const double v = rng.stable_positive(e.beta());
            return std::pow(t / v, e.beta()) / e.c();
        }
        case levy::LaplaceExponent::Kind::Drift:
            if (!(e.kappa() > 0.0)) throw std::domain_error("zero subordinator has no inverse");
            return t / e.kappa();
        case levy::LaplaceExponent::Kind::DriftPlusJumps: {
            const double delta = levy::choose_delta(e.tail());
            double inner = 0.0, value = 0.0;
            for (long guard = 0; guard < 100000000L; ++guard) {
                const double dv = levy::sample_marginal(e, path_step, rng, delta);
                if (value + dv > t) return inner + path_step;
                value += dv;
                inner += path_step;
            }
            throw std::runtime_error("inverse subordinator sampling did not terminate");
        }
    }
    return 0.0;
}

SolutionSample solve_mc(const TimeFracProblem& problem, double z, double s, double t,
                        std::size_t n_paths, harness::RngStream& rng) {
    if (t < 0.0) throw std::domain_error("time must be nonnegative");
    if (problem.kind == GeneratorKind::Bessel2PlusTransport && z < 0.0)
        throw std::domain_error("Bessel coordinate must be nonnegative");
    SolutionSample out;
    if (t == 0.0) {
        out.value = problem.initial(z, s);
        return out;
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        const double e_t = sample_inverse_subordinator(problem.exponent, t, rng);
        double znew;
        if (problem.kind == GeneratorKind::Bessel2PlusTransport) {
            const double g1 = rng.normal(), g2 = rng.normal();
            const double se = std::sqrt(e_t);
            znew = std::sqrt((z + se * g1) * (z + se * g1) + e_t * g2 * g2);
        } else {
            znew = z + std::sqrt(e_t) * rng.normal();
        }
        const double v = problem.initial(znew, s + e_t);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(n_paths);
    out.value = sum / n;
    const double var = std::max(0.0, sum2 / n - out.value * out.value);
    out.stderr_ = std::sqrt(var / n);
    return out;
}

namespace {

// Thomas solve of a tridiagonal system (a: sub, b: diag, c: super).
void tridiag_solve(std::span<const double> a, std::span<const double> b,
                   std::span<const double> c, std::span<double> d) {
    const std::size_t n = d.size();
    static thread_local std::vector<double> cp, dp;
    cp.assign(n, 0.0);
    dp.assign(n, 0.0);
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    d[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = dp[i] - cp[i] * d[i + 1];
}

}  // namespace

SolutionSample solve_caputo_l1(const TimeFracProblem& problem, double z, double s, double t,
                               const FdGrids& grids) {
    if (problem.exponent.kind() != levy::LaplaceExponent::Kind::Stable)
        throw std::domain_error("the L1 scheme requires a stable exponent");
    if (!(t > 0.0)) throw std::domain_error("need t > 0");
    const double beta = problem.exponent.beta();
    const double c = problem.exponent.c();
    const bool bessel = problem.kind == GeneratorKind::Bessel2PlusTransport;

    int nz = grids.nz;
    const int ns = grids.ns, nt = grids.nt;
    if (nz < 8 || ns < 4 || nt < 4) throw std::invalid_argument("FD grids too coarse");
    if (!bessel && nz % 2 == 0) ++nz;  // keep z = 0 on the grid
    const double dz = bessel ? problem.z_max / nz : 2.0 * problem.z_max / (nz - 1);
    const double ds = problem.s_max / ns;
    const double dt = t / nt;
    // the s-transport moves one cell per step at speed one; a larger time
    // step would skip upwind cells
    if (dt > ds + 1e-12)
        throw std::invalid_argument("time step must not exceed the s-grid step");

    std::vector<double> zs(static_cast<std::size_t>(nz));
    for (int i = 0; i < nz; ++i)
        zs[static_cast<std::size_t>(i)] = bessel ? (i + 0.5) * dz : -problem.z_max + i * dz;

    const std::size_t cells = static_cast<std::size_t>(nz) * static_cast<std::size_t>(ns + 1);
    auto idx = [nz](int i, int j) {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nz) +
               static_cast<std::size_t>(i);
    };

    std::vector<std::vector<double>> history;
    history.reserve(static_cast<std::size_t>(nt) + 1);
    history.emplace_back(cells);
    for (int j = 0; j <= ns; ++j)
        for (int i = 0; i < nz; ++i)
            history[0][idx(i, j)] = problem.initial(zs[static_cast<std::size_t>(i)], j * ds);

    // L1 coefficients a_k = (k+1)^{1-beta} - k^{1-beta}
    std::vector<double> acoef(static_cast<std::size_t>(nt));
    for (int k = 0; k < nt; ++k)
        acoef[static_cast<std::size_t>(k)] =
            std::pow(k + 1.0, 1.0 - beta) - std::pow(static_cast<double>(k), 1.0 - beta);
    const double sigma = c / (std::tgamma(2.0 - beta) * std::pow(dt, beta));

    std::vector<double> lo(static_cast<std::size_t>(nz)), di(static_cast<std::size_t>(nz)),
        up(static_cast<std::size_t>(nz)), rhs(static_cast<std::size_t>(nz));
    const double inv_dz2 = 1.0 / (dz * dz);

    std::vector<double> conv(cells);
    for (int n = 1; n <= nt; ++n) {
        // history term: u^{n-1} - sum_{k=1}^{n-1} a_k (u^{n-k} - u^{n-k-1})
        conv = history[static_cast<std::size_t>(n - 1)];
        for (int k = 1; k < n; ++k) {
            const auto& unk = history[static_cast<std::size_t>(n - k)];
            const auto& unk1 = history[static_cast<std::size_t>(n - k - 1)];
            const double ak = acoef[static_cast<std::size_t>(k)];
            for (std::size_t q = 0; q < cells; ++q) conv[q] -= ak * (unk[q] - unk1[q]);
        }
        history.emplace_back(cells);
        auto& unew = history.back();
        // sweep s downward (upwind: the characteristic carries data toward 0)
        for (int j = ns; j >= 0; --j) {
            for (int i = 0; i < nz; ++i) {
                const double upwind = (j == ns) ? 0.0 : unew[idx(i, j + 1)] / ds;
                double diag = sigma + 1.0 / ds + inv_dz2;
                double sub = -0.5 * inv_dz2;
                double sup = -0.5 * inv_dz2;
                if (bessel) {
                    const double drift = 0.5 / zs[static_cast<std::size_t>(i)];
                    sub += drift / (2.0 * dz);
                    sup -= drift / (2.0 * dz);
                }
                if (i == 0) {
                    if (bessel) diag += sub;  // half-cell reflection ghost
                    sub = 0.0;
                }
                if (i == nz - 1) sup = 0.0;  // far-field Dirichlet
                lo[static_cast<std::size_t>(i)] = sub;
                di[static_cast<std::size_t>(i)] = diag;
                up[static_cast<std::size_t>(i)] = sup;
                rhs[static_cast<std::size_t>(i)] = sigma * conv[idx(i, j)] + upwind;
            }
            tridiag_solve(lo, di, up, rhs);
            for (int i = 0; i < nz; ++i) unew[idx(i, j)] = rhs[static_cast<std::size_t>(i)];
        }
    }

    // bilinear read-out; the Bessel kind extrapolates evenly below the first node
    auto value_at = [&](const std::vector<double>& field, double zq, double sq) {
        const double sj = std::clamp(sq / ds, 0.0, static_cast<double>(ns));
        const int j0 = std::min(static_cast<int>(sj), ns - 1);
        const double ws = sj - j0;
        auto slice = [&](int j) {
            if (bessel && zq < zs[0]) {
                const double u0 = field[idx(0, j)], u1 = field[idx(1, j)];
                const double a2 = (u1 - u0) / (zs[1] * zs[1] - zs[0] * zs[0]);
                return u0 + a2 * (zq * zq - zs[0] * zs[0]);
            }
            const double zi = std::clamp((zq - zs[0]) / dz, 0.0, static_cast<double>(nz - 1));
            const int i0 = std::min(static_cast<int>(zi), nz - 2);
            const double wz = zi - i0;
            return (1.0 - wz) * field[idx(i0, j)] + wz * field[idx(i0 + 1, j)];
        };
        return (1.0 - ws) * slice(j0) + ws * slice(std::min(j0 + 1, ns));
    };

    SolutionSample out;
    out.value = value_at(history.back(), z, s);
    out.stderr_ = std::fabs(out.value - value_at(history[static_cast<std::size_t>(nt - 1)], z, s));
    return out;
}

std::vector<double> generalized_kernel_weights(const levy::LevyTail& tail,
                                               std::span<const double> time_grid) {
    if (time_grid.size() < 2 || time_grid[0] != 0.0)
        throw std::invalid_argument("time grid must start at 0 with at least two nodes");
    const double dt = time_grid[1] - time_grid[0];
    for (std::size_t i = 1; i < time_grid.size(); ++i)
        if (std::fabs(time_grid[i] - time_grid[i - 1] - dt) > 1e-9 * dt)
            throw std::invalid_argument("kernel weights need a uniform grid");
    std::vector<double> wbar(time_grid.size());
    wbar[0] = 0.0;
    // the first cell leans on the certificate, which pins singular kernels
    for (std::size_t j = 1; j < time_grid.size(); ++j)
        wbar[j] = wbar[j - 1] + levy::tail_integral(tail, time_grid[j - 1], time_grid[j]);
    return wbar;
}

double apply_generalized_derivative(std::span<const double> wbar, double kappa,
                                    std::span<const double> f, double dt, std::size_t n) {
    if (n == 0 || n >= f.size() || n >= wbar.size())
        throw std::invalid_argument("derivative index out of range");
    double acc = kappa * (f[n] - f[n - 1]) / dt;
    for (std::size_t k = 0; k < n; ++k) {
        const double slope = (f[k + 1] - f[k]) / dt;
        acc += slope * (wbar[n - k] - wbar[n - k - 1]);
    }
    return acc;
}

}  // namespace subdiff::fracpde
