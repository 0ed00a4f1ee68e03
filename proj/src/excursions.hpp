#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "pathlab.hpp"
#include "rng.hpp"

namespace subdiff::excursions {

struct ExcursionInterval {
    double start = 0.0;
    double end = 0.0;
    int sign = +1;
    bool finished = true;
    double sup_abs = 0.0;
    double duration() const { return end - start; }
};

struct ParisianEvent {
    bool found = false;     // a qualifying excursion was detected
    bool censored = false;  // horizon truncation (no event, or open right end)
    double H = std::numeric_limits<double>::infinity();
    double g_star = std::numeric_limits<double>::infinity();
    double d_star = std::numeric_limits<double>::infinity();
    double e_g_star = std::numeric_limits<double>::infinity();
    double e_d_star = std::numeric_limits<double>::infinity();
};

struct RankedLengths {
    std::vector<double> lengths;  // nonincreasing, relative to the horizon
    double horizon = 0.0;
};

// Maximal intervals where the path stays strictly on one side of the level,
// with interpolated crossing times; the straddling piece is finished=false.
std::vector<ExcursionInterval> extract_excursions(const pathlab::SamplePath& path, double level,
                                                  double horizon);

// First time the path has stayed strictly below L for duration D.
// Returns +infinity when the clock never rings before the path horizon.
double parisian_clock(const pathlab::SamplePath& path, double L, double D);

// First negative excursion of the time-changed source lasting longer than D
// in outer time. Reads the inner source path and the subordinator.
ParisianEvent first_long_negative_excursion(const pathlab::TimeChangedPath& tc, double D);

// Ranked lengths of the components of {outer u <= t : path > 0} relative to t,
// including the unfinished straddler. Excursions shorter than two inner grid
// steps are dropped (grid noise floor).
RankedLengths ranked_relative_lengths(const pathlab::TimeChangedPath& tc, double t);

// Number of excursion components of outer length >= eps before t; the
// straddler counts only when t - g*(t) > eps.
long count_long_excursions(const pathlab::TimeChangedPath& tc, double t, double eps);

// Stick-breaking PD(alpha, 0) sample (ranked GEM), residual mass appended.
// alpha == 0 is the degenerate limit [1, 0, ...].
RankedLengths sample_pd(double alpha, std::size_t n_sticks, harness::RngStream& rng);

// The excursion coupling: w*(t) = w(inf{u : kappa u + jumps(u) > t}).
// Exact on the piecewise representation; duration of w* is S(zeta(w)).
pathlab::SamplePath xi_time_change_excursion(const pathlab::SamplePath& w,
                                             const levy::SubordinatorPath& sub, double kappa);

// Crossing/touch times of the level, plus 0 and the horizon: a valid inner
// grid for subordinators sampled at excursion resolution.
std::vector<double> excursion_boundaries(const pathlab::SamplePath& path, double level);

// Streaming state machine behind the interval extraction: feed samples in
// time order; completed one-sided intervals are reported through the visitor.
class ExcursionScanner {
public:
    explicit ExcursionScanner(double level) : level_(level) {}

    // emit(ExcursionInterval) -> bool; returning false halts reporting
    template <typename Fn>
    bool feed(double t, double v, Fn&& emit) {
        const double d = v - level_;
        const int s = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (!primed_) {
            primed_ = true;
            if (s != 0) {
                sign_ = s;
                start_ = t;
                sup_ = std::fabs(d);
            }
            t_prev_ = t;
            d_prev_ = d;
            return true;
        }
        bool keep = true;
        if (sign_ == 0) {
            if (s != 0) {
                sign_ = s;
                start_ = t_prev_;
                sup_ = std::fabs(d);
            }
        } else if (s == 0) {
            keep = emit(ExcursionInterval{start_, t, sign_, true, sup_});
            sign_ = 0;
        } else if (s == sign_) {
            sup_ = std::max(sup_, std::fabs(d));
        } else {
            const double tc = t_prev_ + d_prev_ / (d_prev_ - d) * (t - t_prev_);
            keep = emit(ExcursionInterval{start_, tc, sign_, true, sup_});
            sign_ = s;
            start_ = tc;
            sup_ = std::fabs(d);
        }
        t_prev_ = t;
        d_prev_ = d;
        return keep;
    }

    // the open piece at the horizon, if any
    template <typename Fn>
    void finish(double horizon, Fn&& emit) {
        if (sign_ != 0 && start_ < horizon)
            emit(ExcursionInterval{start_, horizon, sign_, false, sup_});
    }

    bool open() const { return sign_ != 0; }
    int open_sign() const { return sign_; }
    double open_start() const { return start_; }

private:
    double level_;
    bool primed_ = false;
    int sign_ = 0;
    double start_ = 0.0;
    double sup_ = 0.0;
    double t_prev_ = 0.0;
    double d_prev_ = 0.0;
};

}  // namespace subdiff::excursions
