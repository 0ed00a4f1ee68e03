#include "excursions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subdiff::excursions {

namespace {

// Walks the piecewise-linear path about the level and reports each maximal
// one-sided interval. The visitor returns false to stop the scan.
template <typename Fn>
void scan_excursions(const pathlab::SamplePath& path, double level, double horizon, Fn&& fn) {
    const auto& ts = path.times;
    const auto& vs = path.values;
    if (ts.empty()) return;
    if (horizon > path.horizon() + 1e-12)
        throw levy::horizon_error("excursion horizon beyond path horizon");

    ExcursionScanner scanner(level);
    bool keep = scanner.feed(ts[0], vs[0], fn);
    for (std::size_t i = 1; i < ts.size() && keep && ts[i - 1] < horizon; ++i) {
        double t1 = ts[i];
        double v1 = vs[i];
        if (t1 > horizon) {
            // synthetic sample exactly at the horizon
            const double w = (horizon - ts[i - 1]) / (t1 - ts[i - 1]);
            v1 = vs[i - 1] + w * (v1 - vs[i - 1]);
            t1 = horizon;
        }
        keep = scanner.feed(t1, v1, fn);
    }
    if (keep) scanner.finish(horizon, fn);
}

}  // namespace

std::vector<ExcursionInterval> extract_excursions(const pathlab::SamplePath& path, double level,
                                                  double horizon) {
    std::vector<ExcursionInterval> out;
    scan_excursions(path, level, horizon, [&](const ExcursionInterval& e) {
        out.push_back(e);
        return true;
    });
    return out;
}

double parisian_clock(const pathlab::SamplePath& path, double L, double D) {
    if (!(D > 0.0)) throw std::domain_error("parisian_clock needs D > 0");
    double ring = std::numeric_limits<double>::infinity();
    scan_excursions(path, L, path.horizon(), [&](const ExcursionInterval& e) {
        if (e.sign < 0 && e.duration() > D) {
            ring = e.start + D;
            return false;
        }
        return true;
    });
    return ring;
}

ParisianEvent first_long_negative_excursion(const pathlab::TimeChangedPath& tc, double D) {
    if (!(D > 0.0)) throw std::domain_error("duration must be positive");
    if (!tc.source || !tc.subordinator)
        throw std::invalid_argument("time-changed path without source references");
    const auto& src = *tc.source;
    const auto& sub = *tc.subordinator;
    ParisianEvent ev;
    scan_excursions(src, 0.0, std::min(src.horizon(), sub.horizon()),
                    [&](const ExcursionInterval& e) {
                        if (e.sign >= 0) return true;
                        const double g = sub.value_at(e.start);
                        const double d = sub.value_at(e.end);
                        if (d - g > D) {
                            ev.found = true;
                            ev.g_star = g;
                            ev.e_g_star = e.start;
                            ev.H = g + D;
                            if (e.finished) {
                                ev.d_star = d;
                                ev.e_d_star = e.end;
                            } else {
                                ev.censored = true;  // ring seen, right end open
                            }
                            return false;
                        }
                        return true;
                    });
    if (!ev.found) ev.censored = true;
    return ev;
}

namespace {

// Components of {outer time <= t : source > 0} mapped through the
// subordinator; emits (outer start, outer length, is_straddler).
template <typename Fn>
void positive_components(const pathlab::TimeChangedPath& tc, double t, double min_inner_duration,
                         Fn&& fn) {
    if (!tc.source || !tc.subordinator)
        throw std::invalid_argument("time-changed path without source references");
    const auto& src = *tc.source;
    const auto& sub = *tc.subordinator;
    if (sub.max_value() < t)
        throw levy::horizon_error("subordinator horizon below requested outer time");
    scan_excursions(src, 0.0, src.horizon(), [&](const ExcursionInterval& e) {
        if (e.sign <= 0) return true;
        if (e.duration() < min_inner_duration) return true;
        const double g = sub.value_at(e.start);
        if (g >= t) return false;
        const double d = e.finished ? sub.value_at(e.end)
                                    : std::numeric_limits<double>::infinity();
        if (d <= t) {
            fn(g, d - g, false);
            return true;
        }
        fn(g, t - g, true);
        return false;
    });
}

}  // namespace

RankedLengths ranked_relative_lengths(const pathlab::TimeChangedPath& tc, double t) {
    if (!(t > 0.0)) throw std::domain_error("horizon must be positive");
    const double noise_floor = 2.0 * tc.source->grid_step();
    RankedLengths out;
    out.horizon = t;
    positive_components(tc, t, noise_floor, [&](double, double len, bool) {
        out.lengths.push_back(len / t);
    });
    std::sort(out.lengths.begin(), out.lengths.end(), std::greater<double>());
    return out;
}

long count_long_excursions(const pathlab::TimeChangedPath& tc, double t, double eps) {
    if (!(eps > 0.0 && eps < t)) throw std::domain_error("need 0 < eps < t");
    long count = 0;
    positive_components(tc, t, 0.0, [&](double, double len, bool straddler) {
        if (straddler ? (len > eps) : (len >= eps)) ++count;
    });
    return count;
}

RankedLengths sample_pd(double alpha, std::size_t n_sticks, harness::RngStream& rng) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::domain_error("PD index must lie in [0,1)");
    if (n_sticks == 0) throw std::domain_error("need at least one stick");
    RankedLengths out;
    out.horizon = 1.0;
    double remaining = 1.0;
    if (alpha == 0.0) {
        out.lengths = {1.0};
        return out;
    }
    out.lengths.reserve(n_sticks + 1);
    for (std::size_t i = 1; i <= n_sticks; ++i) {
        const double w = rng.beta(1.0 - alpha, static_cast<double>(i) * alpha);
        out.lengths.push_back(remaining * w);
        remaining *= (1.0 - w);
    }
    out.lengths.push_back(remaining);  // residual mass, documented bias
    std::sort(out.lengths.begin(), out.lengths.end(), std::greater<double>());
    return out;
}

pathlab::SamplePath xi_time_change_excursion(const pathlab::SamplePath& w,
                                             const levy::SubordinatorPath& sub, double kappa) {
    const double zeta = w.horizon();
    // jump times of sub inside (0, zeta]
    const auto& jt = sub.jump_times;
    const auto& js = sub.jump_sizes;
    std::vector<double> jtimes, jcum;
    double cum = 0.0;
    for (std::size_t i = 0; i < jt.size() && jt[i] <= zeta; ++i) {
        if (jt[i] <= 0.0) continue;
        cum += js[i];
        jtimes.push_back(jt[i]);
        jcum.push_back(cum);
    }
    const auto total_at = [&](double u) {
        const auto it = std::upper_bound(jtimes.begin(), jtimes.end(), u);
        const std::size_t j = static_cast<std::size_t>(it - jtimes.begin());
        return kappa * u + (j == 0 ? 0.0 : jcum[j - 1]);
    };
    const auto total_before = [&](double u) {
        const auto it = std::lower_bound(jtimes.begin(), jtimes.end(), u);
        const std::size_t j = static_cast<std::size_t>(it - jtimes.begin());
        return kappa * u + (j == 0 ? 0.0 : jcum[j - 1]);
    };
    const double duration = total_at(zeta);
    // inverse of the (kappa, jumps) clock at an outer knot
    const auto inverse_at = [&](double t) {
        std::size_t lo = 0, hi = jtimes.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (kappa * jtimes[mid] + jcum[mid] > t)
                hi = mid;
            else
                lo = mid + 1;
        }
        const double cum_before = (lo == 0) ? 0.0 : jcum[lo - 1];
        if (kappa > 0.0) {
            const double u_lin = (t - cum_before) / kappa;
            if (lo == jtimes.size() || u_lin < jtimes[lo]) return std::min(zeta, std::max(0.0, u_lin));
        }
        return lo == jtimes.size() ? zeta : jtimes[lo];
    };

    std::vector<double> knots;
    knots.reserve(2 * (w.times.size() + jtimes.size()) + 2);
    knots.push_back(0.0);
    for (double u : w.times) {
        if (u <= 0.0 || u > zeta) continue;
        knots.push_back(total_before(u));
        knots.push_back(total_at(u));
    }
    for (std::size_t i = 0; i < jtimes.size(); ++i) {
        knots.push_back(kappa * jtimes[i] + (i == 0 ? 0.0 : jcum[i - 1]));
        knots.push_back(kappa * jtimes[i] + jcum[i]);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    while (!knots.empty() && knots.back() >= duration) knots.pop_back();

    pathlab::SamplePath out;
    out.start = 0.0;
    out.sigma = w.sigma;
    out.times.reserve(knots.size() + 1);
    out.values.reserve(knots.size() + 1);
    for (double tau : knots) {
        out.times.push_back(tau);
        out.values.push_back(w.at(inverse_at(tau)));
    }
    out.times.push_back(duration);
    out.values.push_back(w.values.back());
    return out;
}

std::vector<double> excursion_boundaries(const pathlab::SamplePath& path, double level) {
    std::vector<double> b;
    b.push_back(0.0);
    scan_excursions(path, level, path.horizon(), [&](const ExcursionInterval& e) {
        b.push_back(e.start);
        b.push_back(e.end);
        return true;
    });
    b.push_back(path.horizon());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

}  // namespace subdiff::excursions
