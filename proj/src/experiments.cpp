#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "excursions.hpp"
#include "fracpde.hpp"
#include "levy.hpp"
#include "numeric.hpp"
#include "occupation.hpp"
#include "parallel.hpp"
#include "pathlab.hpp"
#include "pricing.hpp"
#include "rayknight.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "transforms.hpp"

namespace subdiff::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

unsigned workers_of(const ExperimentConfig& cfg) {
    const long w = cfg.get_long("harness.workers", 0);
    if (w > 0) return static_cast<unsigned>(w);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

std::uint64_t seed_of(const ExperimentConfig& cfg) {
    return static_cast<std::uint64_t>(cfg.get_long("harness.seed", 20240901));
}

ReportTable check_table() {
    ReportTable t;
    t.columns = {"name", "statistic", "threshold", "decision", "n_a", "n_b"};
    return t;
}

void add_check(ReportTable& t, bool& all_pass, const std::string& name, double statistic,
               double threshold, bool pass, long n_a = 0, long n_b = 0) {
    t.add_row({name, statistic, threshold, std::string(pass ? "pass" : "FAIL"), n_a, n_b});
    all_pass = all_pass && pass;
}

}  // namespace

std::string ExperimentConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stod(it->second);
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return std::stol(it->second);
}

std::string ExperimentConfig::serialize() const {
    // group by section prefix
    std::map<std::string, std::map<std::string, std::string>> sections;
    for (const auto& [k, v] : kv_) {
        const auto dot = k.find('.');
        if (dot == std::string::npos)
            sections[""][k] = v;
        else
            sections[k.substr(0, dot)][k.substr(dot + 1)] = v;
    }
    std::string out;
    for (const auto& [sec, entries] : sections) {
        if (!sec.empty()) out += "[" + sec + "]\n";
        for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    }
    return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line without '=': " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

// ---------------------------------------------------------------------------
// verify laplace: Gaver-Stehfest standards
// ---------------------------------------------------------------------------

ExperimentResult verify_laplace(const ExperimentConfig& cfg) {
    const int order = static_cast<int>(cfg.get_long("transforms.gs_order", 12));
    const double tol = cfg.get_double("transforms.gs_tol", 1e-6);
    ExperimentResult res;
    res.table = check_table();
    struct Case {
        const char* name;
        std::function<double(double)> transform;
        std::function<double(double)> truth;
    };
    const std::vector<Case> cases = {
        {"gs_exp_decay", [](double s) { return 1.0 / (s + 1.0); },
         [](double t) { return std::exp(-t); }},
        {"gs_constant", [](double s) { return 1.0 / s; }, [](double) { return 1.0; }},
        {"gs_ramp", [](double s) { return 1.0 / (s * s); }, [](double t) { return t; }},
    };
    for (const auto& c : cases) {
        for (double t : {0.5, 1.0, 2.0}) {
            double est_err = 0.0;
            const double v = transforms::gaver_stehfest(c.transform, t, order, &est_err);
            const double err = std::fabs(v - c.truth(t));
            add_check(res.table, res.passed, std::string(c.name) + "_t" + format_double(t), err,
                      tol, err < tol);
        }
    }
    res.summary = res.passed ? "gaver-stehfest standards recovered" : "gaver-stehfest failure";
    return res;
}

// ---------------------------------------------------------------------------
// verify subordinator: empirical Laplace transform of S(t)
// ---------------------------------------------------------------------------

ExperimentResult verify_subordinator(const ExperimentConfig& cfg) {
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 100000));
    const double c = cfg.get_double("levy.c", 1.0);
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    ExperimentResult res;
    res.table = check_table();
    const std::vector<double> betas = {cfg.get_double("levy.beta", 0.5),
                                       cfg.get_double("levy.beta2", 0.8)};
    const std::vector<double> lambdas = {0.5, 1.0, 2.0};
    const std::vector<double> times = {0.5, 1.0};
    for (double beta : betas) {
        // one path sampling serves both horizons
        std::vector<double> s_half(n_paths), s_one(n_paths);
        const auto grid = levy::uniform_grid(1.0, 1.0 / 16.0);
        harness::parallel_for(n_paths, workers, [&](std::size_t i) {
            harness::RngStream rng(seed, i);
            const auto path = levy::sample_stable_subordinator(c, beta, grid, rng);
            s_half[i] = path.value_at(0.5);
            s_one[i] = path.value_at(1.0);
        });
        for (double t : times) {
            const auto& ss = (t == 0.5) ? s_half : s_one;
            for (double lam : lambdas) {
                std::vector<double> vals(n_paths);
                for (std::size_t i = 0; i < n_paths; ++i) vals[i] = std::exp(-lam * ss[i]);
                const double emp = harness::mean_of(vals);
                const double se = harness::stderr_of(vals);
                const double truth = std::exp(-t * c * std::pow(lam, beta));
                const double z = (emp - truth) / se;
                add_check(res.table, res.passed,
                          "subordinator_lt_beta" + format_double(beta) + "_t" + format_double(t) +
                              "_lam" + format_double(lam),
                          std::fabs(z), 3.0, std::fabs(z) < 3.0, static_cast<long>(n_paths));
            }
        }
    }
    res.summary = res.passed ? "subordinator transform matches" : "subordinator transform failed";
    return res;
}

// ---------------------------------------------------------------------------
// reflected-path statistics shared by verify_pd and verify_tail
// ---------------------------------------------------------------------------

namespace {

// One reflected-BM path time-changed at excursion resolution. Phase one
// walks the Brownian path, streaming per-excursion subordinator draws until
// the outer clock passes `outer_target`; phase two rebuilds the identical
// subordinator on the recorded boundary grid (streams are replayable).
struct ReflectedTimeChanged {
    std::shared_ptr<pathlab::SamplePath> reflected;
    std::shared_ptr<levy::SubordinatorPath> sub;
    pathlab::TimeChangedPath tc;
    bool complete = false;
};

ReflectedTimeChanged make_reflected_tc(double c, double beta, double inner_step,
                                       double outer_target, double inner_cap,
                                       std::uint64_t seed, std::uint64_t path_id) {
    harness::RngStream rng_b(seed, 3 * path_id);
    const std::uint64_t sub_stream = 3 * path_id + 1;
    ReflectedTimeChanged out;

    std::vector<double> bvals{0.0};
    std::vector<double> boundaries{0.0};
    double run_min = 0.0, b = 0.0, tau_hat = 0.0, last_boundary = 0.0;
    const double sqrt_h = std::sqrt(inner_step);
    std::size_t k = 0;
    {
        harness::RngStream rng_s(seed, sub_stream);
        const std::size_t cap = static_cast<std::size_t>(inner_cap / inner_step);
        bvals.reserve(1 << 14);
        while (k < cap) {
            b += sqrt_h * rng_b.normal();
            ++k;
            bvals.push_back(b);
            if (b <= run_min) {
                // new minimum: R returns to zero, closing an excursion
                run_min = b;
                const double t_here = static_cast<double>(k) * inner_step;
                tau_hat += harness::stable_increment(rng_s, c, beta, t_here - last_boundary);
                last_boundary = t_here;
                boundaries.push_back(t_here);
                if (tau_hat > outer_target) {
                    out.complete = true;
                    break;
                }
            }
        }
        if (!out.complete) {
            // force one final draw over the tail segment
            const double t_here = static_cast<double>(k) * inner_step;
            if (t_here > last_boundary) {
                tau_hat += harness::stable_increment(rng_s, c, beta, t_here - last_boundary);
                boundaries.push_back(t_here);
            }
            out.complete = tau_hat > outer_target;
        }
    }
    const double horizon = static_cast<double>(k) * inner_step;
    if (boundaries.back() < horizon) boundaries.push_back(horizon);

    auto raw = std::make_shared<pathlab::SamplePath>();
    raw->start = 0.0;
    raw->times.resize(bvals.size());
    for (std::size_t i = 0; i < bvals.size(); ++i)
        raw->times[i] = static_cast<double>(i) * inner_step;
    raw->values = std::move(bvals);
    const auto refl = pathlab::reflect_at_running_min(*raw);
    out.reflected = std::make_shared<pathlab::SamplePath>(refl.reflected);

    harness::RngStream rng_s2(seed, sub_stream);
    out.sub = std::make_shared<levy::SubordinatorPath>(
        levy::sample_stable_subordinator(c, beta, boundaries, rng_s2));

    out.tc.source = out.reflected;
    out.tc.subordinator = out.sub;
    out.tc.outer_times = {0.0};
    out.tc.inner_times = {levy::invert_subordinator(*out.sub, 0.0)};
    out.tc.values = {out.reflected->at(out.tc.inner_times[0])};
    return out;
}

}  // namespace

ExperimentResult verify_pd(const ExperimentConfig& cfg) {
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 2000));
    const double beta = cfg.get_double("levy.beta", 0.8);
    const double c = cfg.get_double("levy.c", 1.0);
    const double inner_step = cfg.get_double("mc.inner_step", 1e-4);
    const double t_end = cfg.get_double("mc.horizon", 1.0);
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    const std::vector<double> eps_list = {cfg.get_double("excursions.eps1", 0.1),
                                          cfg.get_double("excursions.eps2", 0.25)};

    std::vector<double> v1(n_paths, 0.0);
    std::vector<std::vector<double>> counts(eps_list.size());
    for (auto& v : counts) v.assign(n_paths, 0.0);
    harness::parallel_for(n_paths, workers, [&](std::size_t i) {
        const auto rtc = make_reflected_tc(c, beta, inner_step, t_end, 200.0, seed, i);
        const auto ranked = excursions::ranked_relative_lengths(rtc.tc, t_end);
        v1[i] = ranked.lengths.empty() ? 0.0 : ranked.lengths.front();
        for (std::size_t j = 0; j < eps_list.size(); ++j)
            counts[j][i] = static_cast<double>(
                excursions::count_long_excursions(rtc.tc, t_end, eps_list[j]));
    });

    // stick-breaking side
    std::vector<double> v1_pd(n_paths);
    harness::parallel_for(n_paths, workers, [&](std::size_t i) {
        harness::RngStream rng(seed ^ 0x7f4a7c15u, i);
        const auto pd = excursions::sample_pd(0.5 * beta, 20000, rng);
        v1_pd[i] = pd.lengths.front();
    });

    ExperimentResult res;
    res.table = check_table();
    const auto ks = harness::ks_two_sample(v1, v1_pd, 0.01);
    add_check(res.table, res.passed, "pd_v1_ks", ks.statistic, ks.threshold, !ks.rejected,
              static_cast<long>(ks.n_a), static_cast<long>(ks.n_b));

    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        const double eps = eps_list[j];
        const double mean = harness::mean_of(counts[j]);
        const double closed = 1.0 /
                              (std::tgamma(0.5 * beta) * std::tgamma(1.0 - 0.5 * beta)) *
                              (2.0 / beta) * std::pow(t_end / eps - 1.0, 0.5 * beta);
        const double rel = std::fabs(mean - closed) / closed;
        add_check(res.table, res.passed, "pd_count_eps" + format_double(eps), rel, 0.05,
                  rel < 0.05, static_cast<long>(n_paths));
    }
    res.summary = res.passed ? "PD law checks pass" : "PD law check failed";
    return res;
}

ExperimentResult verify_tail(const ExperimentConfig& cfg) {
    const double beta = cfg.get_double("levy.beta", 0.7);
    const double c = cfg.get_double("levy.c", 1.0);
    const double inner_step = cfg.get_double("mc.inner_step", 1e-4);
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 240));
    const double lt_target = cfg.get_double("excursions.local_time", 3.0);
    const double inner_cap = cfg.get_double("mc.inner_cap", 60.0);
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    const std::vector<double> eps_list = {cfg.get_double("excursions.eps1", 0.05),
                                          cfg.get_double("excursions.eps2", 0.1)};

    std::vector<std::vector<double>> counts(eps_list.size());
    for (auto& v : counts) v.assign(n_paths, 0.0);
    std::vector<double> local_time(n_paths, 0.0);
    harness::parallel_for(n_paths, workers, [&](std::size_t i) {
        harness::RngStream rng(seed, i);
        double b = 0.0, run_min = 0.0, last_boundary = 0.0;
        const double sqrt_h = std::sqrt(inner_step);
        const std::size_t cap = static_cast<std::size_t>(inner_cap / inner_step);
        for (std::size_t k = 1; k <= cap; ++k) {
            b += sqrt_h * rng.normal();
            if (b <= run_min) {
                run_min = b;
                const double t_here = static_cast<double>(k) * inner_step;
                const double dur =
                    harness::stable_increment(rng, c, beta, t_here - last_boundary);
                last_boundary = t_here;
                for (std::size_t j = 0; j < eps_list.size(); ++j)
                    if (dur > eps_list[j]) counts[j][i] += 1.0;
                if (-run_min >= lt_target) break;
            }
        }
        local_time[i] = -run_min;
    });

    ExperimentResult res;
    res.table = check_table();
    double lt_total = 0.0;
    for (double l : local_time) lt_total += l;
    for (std::size_t j = 0; j < eps_list.size(); ++j) {
        double count_total = 0.0;
        for (double v : counts[j]) count_total += v;
        const double est = count_total / lt_total;
        const double eps = eps_list[j];
        const double closed =
            std::sqrt(2.0 * c) / std::tgamma(1.0 - 0.5 * beta) * std::pow(eps, -0.5 * beta);
        const double rel = std::fabs(est - closed) / closed;
        add_check(res.table, res.passed, "excursion_tail_eps" + format_double(eps), rel, 0.10,
                  rel < 0.10, static_cast<long>(n_paths));
    }
    res.summary = res.passed ? "excursion tail matches" : "excursion tail failed";
    return res;
}

// ---------------------------------------------------------------------------
// verify mlt: joint transforms of the event marks
// ---------------------------------------------------------------------------

ExperimentResult verify_mlt(const ExperimentConfig& cfg) {
    const double beta = cfg.get_double("levy.beta", 0.7);
    const double c = cfg.get_double("levy.c", 1.0);
    const double D = cfg.get_double("pricing.D", 0.1);
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 100000));
    pricing::MarketSpec market;
    market.x = 1.0;
    market.sigma = 0.2;
    market.exponent = levy::LaplaceExponent::stable(c, beta);
    pricing::ParisianContract contract;
    contract.L = market.x;
    contract.D = D;
    contract.T = 1.0;
    pricing::McControls controls;
    controls.inner_step = cfg.get_double("mc.inner_step", 1e-4);
    controls.outer_horizon = cfg.get_double("mc.horizon", 30.0);
    controls.workers = workers_of(cfg);
    controls.seed = seed_of(cfg);
    transforms::QuadratureConfig quad;
    quad.pool_size = static_cast<std::size_t>(cfg.get_long("transforms.pool", 4000000));

    const std::vector<double> grid = {0.5, 1.0, 2.0};
    const auto rep = pricing::validate_event_laws(market, contract, n_paths, grid, grid,
                                                  controls, quad);

    ExperimentResult res;
    res.table = check_table();
    for (const auto& pt : rep.points) {
        const std::string tag = "_lam" + format_double(pt.lambda) + "_th" + format_double(pt.theta);
        add_check(res.table, res.passed, "m1_z" + tag, std::fabs(pt.z_m1), 3.0,
                  std::fabs(pt.z_m1) < 3.0, static_cast<long>(n_paths));
        add_check(res.table, res.passed, "m2_z" + tag, std::fabs(pt.z_m2), 3.0,
                  std::fabs(pt.z_m2) < 3.0, static_cast<long>(n_paths));
    }
    transforms::PiCalculus calc(market.exponent, D, quad, seed_of(cfg) ^ 0x5bd1e995u);
    add_check(res.table, res.passed, "m1_mass", std::fabs(calc.m1_lt(0.0, 0.0) - 1.0), 0.0,
              calc.m1_lt(0.0, 0.0) == 1.0);
    add_check(res.table, res.passed, "m2_mass", std::fabs(calc.m2_lt(0.0, 0.0) - 1.0), 0.0,
              calc.m2_lt(0.0, 0.0) == 1.0);
    for (double lam : grid)
        for (double th : grid) {
            const double r = calc.full_measure_residual(lam, th);
            add_check(res.table, res.passed,
                      "pi_identity_lam" + format_double(lam) + "_th" + format_double(th), r, 1e-3,
                      r < 1e-3);
        }
    res.summary = res.passed ? "transform laws match" : "transform law failure";
    return res;
}

// ---------------------------------------------------------------------------
// verify occupation
// ---------------------------------------------------------------------------

ExperimentResult verify_occupation(const ExperimentConfig& cfg) {
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    ExperimentResult res;
    res.table = check_table();

    occupation::ProcessSpec process;
    process.inner_step = cfg.get_double("mc.inner_step", 1e-3);
    const std::vector<double> levels = {-1.0, -0.4, 0.0, 0.4, 1.0};

    // drift case: pathwise equality with shared seeds
    {
        const auto drift = levy::LaplaceExponent::drift(2.0);
        const auto rep = occupation::verify_time_change_identity(
            process, drift, 1.0, levels, static_cast<std::size_t>(cfg.get_long("mc.paths_drift", 200)),
            0.01, seed, workers);
        add_check(res.table, res.passed, "occupation_drift_pathwise", rep.max_pathwise_diff, 1e-12,
                  rep.max_pathwise_diff < 1e-12);
    }
    // stable case: per-level KS with Bonferroni correction
    {
        const auto stable = levy::LaplaceExponent::stable(cfg.get_double("levy.c", 1.0),
                                                          cfg.get_double("levy.beta", 0.7));
        const auto rep = occupation::verify_time_change_identity(
            process, stable, 1.0, levels,
            static_cast<std::size_t>(cfg.get_long("mc.paths", 5000)), 0.01, seed, workers);
        for (const auto& r : rep.per_level)
            add_check(res.table, res.passed, r.name, r.statistic, r.threshold, !r.rejected,
                      static_cast<long>(r.n_a), static_cast<long>(r.n_b));
        for (const auto& r : rep.increment_checks)
            add_check(res.table, res.passed, r.name, r.statistic, r.threshold, !r.rejected,
                      static_cast<long>(r.n_a), static_cast<long>(r.n_b));
    }
    res.summary = res.passed ? "occupation identity holds" : "occupation identity failed";
    return res;
}

// ---------------------------------------------------------------------------
// verify rayknight
// ---------------------------------------------------------------------------

ExperimentResult verify_rayknight(const ExperimentConfig& cfg) {
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    ExperimentResult res;
    res.table = check_table();

    // closed-form check: identity exponent, g = 2 on [0,1]
    {
        rayknight::RiccatiProblem p;
        p.a = 1.0;
        p.alpha = 0.0;
        p.exponent = levy::LaplaceExponent::drift(1.0);
        p.g = [](double) { return 2.0; };
        const auto sol = rayknight::solve_u(p, 1e-4);
        const double lam = 2.0;
        const double truth = std::sqrt(lam / 2.0) * std::tanh(std::sqrt(2.0 * lam) * 1.0);
        const double err = std::fabs(sol.u.front() - truth);
        add_check(res.table, res.passed, "riccati_tanh", err, 1e-8, err < 1e-8);
        add_check(res.table, res.passed, "riccati_residual", sol.residual, 1e-8,
                  sol.residual < 1e-8);
    }
    // large-support limit reproduces the hitting transform
    {
        rayknight::RiccatiProblem p;
        p.a = 20.0;
        p.alpha = 0.0;
        p.exponent = levy::LaplaceExponent::stable(cfg.get_double("levy.c", 1.0),
                                                   cfg.get_double("levy.beta", 0.7));
        p.g = [](double) { return 1.0; };
        const double x = 0.5;
        const double lt = rayknight::lt_occupation_functional(p, x, 5e-3);
        const double truth = transforms::hitting_pair_lt(p.exponent, x, 1.0, 0.0);
        const double err = std::fabs(lt - truth);
        add_check(res.table, res.passed, "riccati_large_a_limit", err, 1e-6, err < 1e-6);
    }
    // Monte Carlo agreement
    {
        rayknight::RiccatiProblem p;
        p.a = 1.0;
        p.alpha = cfg.get_double("rayknight.alpha", 0.5);
        p.exponent = levy::LaplaceExponent::stable(cfg.get_double("levy.c", 1.0),
                                                   cfg.get_double("levy.beta", 0.7));
        p.g = [](double r) { return r <= 1.0 ? 1.0 : 0.0; };
        const double x = cfg.get_double("rayknight.x", 0.5);
        const double closed = rayknight::lt_occupation_functional(p, x, 1e-4);
        const auto mc = rayknight::occupation_functional_mc(
            p, x, static_cast<std::size_t>(cfg.get_long("mc.paths", 100000)),
            cfg.get_double("mc.inner_step", 1e-4), cfg.get_double("mc.inner_cap", 1000.0), seed,
            workers);
        const double z = (mc.estimate - closed) / mc.stderr_;
        add_check(res.table, res.passed, "rayknight_mc_z", std::fabs(z), 3.0, std::fabs(z) < 3.0,
                  static_cast<long>(cfg.get_long("mc.paths", 100000)));
        // concatenation route agrees with the single solve
        const double twopiece = rayknight::warren_concatenation_lt(p, x, 1e-4);
        const double err = std::fabs(twopiece - closed);
        add_check(res.table, res.passed, "warren_concatenation", err, 1e-10, err < 1e-10);
    }
    res.summary = res.passed ? "ray-knight checks pass" : "ray-knight failure";
    return res;
}

// ---------------------------------------------------------------------------
// verify fracpde
// ---------------------------------------------------------------------------

ExperimentResult verify_fracpde(const ExperimentConfig& cfg) {
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    const double beta = cfg.get_double("levy.beta", 0.6);
    const double c = cfg.get_double("levy.c", 1.0);
    ExperimentResult res;
    res.table = check_table();

    // MC vs L1 finite differences on the heat-plus-transport system
    {
        fracpde::TimeFracProblem prob;
        prob.kind = fracpde::GeneratorKind::HeatPlusTransport;
        prob.exponent = levy::LaplaceExponent::stable(c, beta);
        const double sigma = 0.2, x0 = 2.0, q = sigma * sigma / 8.0;
        const auto payoff = pricing::bump_payoff(1.3, 1.7);
        prob.initial = [=](double z, double s) {
            return std::exp(0.5 * sigma * z - q * s) * payoff(x0 * std::exp(sigma * z));
        };
        prob.z_max = 9.0;
        prob.s_max = 8.0;
        harness::RngStream rng(seed, 7);
        const auto mc = fracpde::solve_mc(prob, 0.0, 0.0, 1.0,
                                          static_cast<std::size_t>(cfg.get_long("mc.paths", 400000)),
                                          rng);
        fracpde::FdGrids grids;
        grids.nz = static_cast<int>(cfg.get_long("fracpde.nz", 180));
        grids.ns = static_cast<int>(cfg.get_long("fracpde.ns", 100));
        grids.nt = static_cast<int>(cfg.get_long("fracpde.nt", 128));
        const auto fd = fracpde::solve_caputo_l1(prob, 0.0, 0.0, 1.0, grids);
        const double tol = std::max(0.02 * std::fabs(mc.value), 3.0 * mc.stderr_);
        const double diff = std::fabs(mc.value - fd.value);
        add_check(res.table, res.passed, "fracpde_mc_vs_fd", diff, tol, diff < tol);
    }
    // triangulation of E[exp(-theta E(t))]
    {
        const double theta = 1.0, t = 1.0;
        const auto exponent = levy::LaplaceExponent::stable(c, beta);
        fracpde::TimeFracProblem prob;
        prob.kind = fracpde::GeneratorKind::HeatPlusTransport;
        prob.exponent = exponent;
        prob.initial = [=](double, double s) { return std::exp(-theta * s); };
        harness::RngStream rng(seed, 11);
        const std::size_t n = static_cast<std::size_t>(cfg.get_long("mc.paths", 400000));
        const auto mc = fracpde::solve_mc(prob, 0.0, 0.0, t, n, rng);
        const auto transform = [&](double s) {
            const double phi = levy::phi_eval(exponent, s);
            return phi / (s * (phi + theta));
        };
        const double inv = transforms::gaver_stehfest(transform, t, 14);
        // third route: inverse subordinator resolved on a simulated path
        std::vector<double> direct(n / 4);
        harness::parallel_for(direct.size(), workers, [&](std::size_t i) {
            harness::RngStream r2(seed ^ 0x2545F491u, i);
            double inner = 0.0, value = 0.0;
            const double h = 1e-3;
            while (true) {
                const double ds = harness::stable_increment(r2, c, beta, h);
                if (value + ds > t) break;
                value += ds;
                inner += h;
            }
            direct[i] = std::exp(-theta * (inner + h));
        });
        const double d_mean = harness::mean_of(direct);
        const double d_se = harness::stderr_of(direct);
        const double tol_ab = 3.0 * std::sqrt(mc.stderr_ * mc.stderr_ + d_se * d_se) + 1e-4;
        add_check(res.table, res.passed, "triangulation_mc_vs_gs",
                  std::fabs(mc.value - inv), 3.0 * mc.stderr_ + 1e-4,
                  std::fabs(mc.value - inv) < 3.0 * mc.stderr_ + 1e-4);
        add_check(res.table, res.passed, "triangulation_mc_vs_path",
                  std::fabs(mc.value - d_mean), tol_ab, std::fabs(mc.value - d_mean) < tol_ab);
        add_check(res.table, res.passed, "triangulation_gs_vs_path", std::fabs(inv - d_mean),
                  3.0 * d_se + 1e-4, std::fabs(inv - d_mean) < 3.0 * d_se + 1e-4);
    }
    res.summary = res.passed ? "fracpde routes agree" : "fracpde disagreement";
    return res;
}

// ---------------------------------------------------------------------------
// verify pricing
// ---------------------------------------------------------------------------

namespace {

pricing::MarketSpec market_from(const ExperimentConfig& cfg, double x, double beta) {
    pricing::MarketSpec m;
    m.x = x;
    m.sigma = cfg.get_double("pricing.sigma", 0.2);
    m.exponent = levy::LaplaceExponent::stable(cfg.get_double("levy.c", 1.0), beta);
    return m;
}

pricing::ParisianContract contract_from(const ExperimentConfig& cfg, double x, double D) {
    pricing::ParisianContract k;
    k.L = x;
    k.D = D;
    k.T = cfg.get_double("pricing.T", 1.0);
    k.support_lo = cfg.get_double("pricing.payoff_lo", 1.3);
    k.support_hi = cfg.get_double("pricing.payoff_hi", 1.7);
    k.payoff = pricing::bump_payoff(k.support_lo, k.support_hi);
    return k;
}

}  // namespace

ExperimentResult verify_pricing(const ExperimentConfig& cfg) {
    const unsigned workers = workers_of(cfg);
    const std::uint64_t seed = seed_of(cfg);
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 100000));
    ExperimentResult res;
    res.table = check_table();

    struct Set {
        double x, beta, D;
    };
    const std::vector<Set> sets = {{1.0, 0.7, 0.1}, {2.0, 0.7, 0.1}, {1.0, 0.8, 0.2}};
    for (const auto& s : sets) {
        const auto market = market_from(cfg, s.x, s.beta);
        const auto contract = contract_from(cfg, s.x, s.D);
        pricing::McControls controls;
        controls.inner_step = cfg.get_double("mc.inner_step", 1e-3);
        controls.workers = workers;
        controls.seed = seed;
        const auto direct = pricing::price_direct_mc(market, contract, n_paths, controls);
        pricing::McControls controls2 = controls;
        controls2.seed = seed ^ 0x94D049BB133111EBULL;
        const auto decomp = pricing::price_decomposition(market, contract, n_paths, controls2);
        const double gap = std::fabs(direct.value - decomp.value);
        const double allowed = 1.959963984540054 * (direct.stderr_ + decomp.stderr_);
        add_check(res.table, res.passed,
                  "price_ci_overlap_x" + format_double(s.x) + "_beta" + format_double(s.beta) +
                      "_D" + format_double(s.D),
                  gap, allowed, gap <= allowed, static_cast<long>(n_paths));
    }
    // identity-drift regression against the bypassed clock
    {
        pricing::MarketSpec market;
        market.x = 1.0;
        market.sigma = 0.2;
        market.exponent = levy::LaplaceExponent::drift(1.0);
        pricing::ParisianContract contract;
        contract.L = 0.9;
        contract.D = 0.05;
        contract.T = 1.0;
        contract.support_lo = 1.3;
        contract.support_hi = 1.7;
        contract.payoff = pricing::bump_payoff(1.3, 1.7);
        pricing::McControls controls;
        controls.inner_step = 1e-3;
        controls.workers = workers;
        controls.seed = seed;
        const auto a = pricing::price_direct_mc(market, contract, 20000, controls);
        pricing::McControls bypass = controls;
        bypass.bypass_time_change = true;
        const auto b = pricing::price_direct_mc(market, contract, 20000, bypass);
        const double diff = std::fabs(a.value - b.value);
        add_check(res.table, res.passed, "identity_drift_regression", diff, 1e-12, diff <= 1e-12);
    }
    res.summary = res.passed ? "pricing routes agree" : "pricing disagreement";
    return res;
}

// ---------------------------------------------------------------------------
// verify repro: worker-count invariance, in process
// ---------------------------------------------------------------------------

ExperimentResult verify_repro(const ExperimentConfig& cfg) {
    ExperimentResult res;
    res.table = check_table();
    ExperimentConfig small = cfg;
    small.set("mc.paths", "4000");
    small.set("harness.workers", "1");
    const auto p1 = price_run("direct", small);
    small.set("harness.workers", "4");
    const auto p4 = price_run("direct", small);
    const std::string s1 = to_csv(p1.table);
    const std::string s4 = to_csv(p4.table);
    add_check(res.table, res.passed, "price_workers_invariance", s1 == s4 ? 0.0 : 1.0, 0.5,
              s1 == s4);
    small.set("harness.workers", "1");
    const auto p1b = price_run("direct", small);
    add_check(res.table, res.passed, "price_rerun_identical",
              to_csv(p1b.table) == s1 ? 0.0 : 1.0, 0.5, to_csv(p1b.table) == s1);

    ExperimentConfig vs = cfg;
    vs.set("mc.paths", "20000");
    vs.set("harness.workers", "1");
    const auto v1 = verify_subordinator(vs);
    vs.set("harness.workers", "4");
    const auto v4 = verify_subordinator(vs);
    add_check(res.table, res.passed, "verify_workers_invariance",
              to_csv(v1.table) == to_csv(v4.table) ? 0.0 : 1.0, 0.5,
              to_csv(v1.table) == to_csv(v4.table));
    res.summary = res.passed ? "outputs reproducible" : "reproducibility broken";
    return res;
}

// ---------------------------------------------------------------------------
// price / simulate
// ---------------------------------------------------------------------------

ExperimentResult price_run(const std::string& method, const ExperimentConfig& cfg) {
    pricing::MarketSpec market;
    market.x = cfg.get_double("pricing.x", 1.0);
    market.sigma = cfg.get_double("pricing.sigma", 0.2);
    const double beta = cfg.get_double("levy.beta", 0.7);
    const double c = cfg.get_double("levy.c", 1.0);
    const double kappa = cfg.get_double("levy.kappa", 0.0);
    if (cfg.get_string("levy.kind", "stable") == "drift")
        market.exponent = levy::LaplaceExponent::drift(kappa > 0.0 ? kappa : 1.0);
    else
        market.exponent = levy::LaplaceExponent::stable(c, beta);
    pricing::ParisianContract contract;
    contract.L = cfg.get_double("pricing.L", market.x);
    contract.D = cfg.get_double("pricing.D", 0.1);
    contract.T = cfg.get_double("pricing.T", 1.0);
    contract.support_lo = cfg.get_double("pricing.payoff_lo", 1.3);
    contract.support_hi = cfg.get_double("pricing.payoff_hi", 1.7);
    contract.payoff = pricing::bump_payoff(contract.support_lo, contract.support_hi);
    pricing::McControls controls;
    controls.inner_step = cfg.get_double("mc.inner_step", 1e-3);
    controls.workers = workers_of(cfg);
    controls.seed = seed_of(cfg);
    const std::size_t n_paths = static_cast<std::size_t>(cfg.get_long("mc.paths", 100000));

    pricing::PriceEstimate est;
    if (method == "direct")
        est = pricing::price_direct_mc(market, contract, n_paths, controls);
    else if (method == "decomposition")
        est = pricing::price_decomposition(market, contract, n_paths, controls);
    else
        throw std::invalid_argument("unknown pricing method: " + method);

    ExperimentResult res;
    res.table.columns = {"value", "stderr", "n_paths", "method", "censored_fraction"};
    res.table.add_row({est.value, est.stderr_, static_cast<long>(est.n_paths), est.method,
                       est.censored_fraction});
    res.summary = "price " + format_double(est.value) + " +/- " + format_double(est.stderr_);
    return res;
}

ExperimentResult simulate_run(const std::string& kind, const ExperimentConfig& cfg) {
    const std::uint64_t seed = seed_of(cfg);
    const double horizon = cfg.get_double("mc.horizon", 1.0);
    const double step = cfg.get_double("mc.inner_step", 1e-3);
    harness::RngStream rng(seed, 0);
    ExperimentResult res;
    res.table.columns = {"time", "value"};
    const auto grid = levy::uniform_grid(horizon, step);
    if (kind == "subordinator") {
        const auto p = levy::sample_stable_subordinator(cfg.get_double("levy.c", 1.0),
                                                        cfg.get_double("levy.beta", 0.7), grid,
                                                        rng);
        for (std::size_t i = 0; i < p.grid_times.size(); ++i)
            res.table.add_row({p.grid_times[i], p.values[i]});
    } else if (kind == "bm") {
        const auto p = pathlab::simulate_bm(cfg.get_double("pathlab.x0", 0.0),
                                            cfg.get_double("pathlab.alpha", 0.0),
                                            cfg.get_double("pathlab.sigma", 1.0), grid, rng);
        for (std::size_t i = 0; i < p.times.size(); ++i)
            res.table.add_row({p.times[i], p.values[i]});
    } else if (kind == "timechange") {
        auto inner = std::make_shared<pathlab::SamplePath>(pathlab::simulate_bm(
            cfg.get_double("pathlab.x0", 0.0), cfg.get_double("pathlab.alpha", 0.0),
            cfg.get_double("pathlab.sigma", 1.0), grid, rng));
        auto sub = std::make_shared<levy::SubordinatorPath>(levy::sample_stable_subordinator(
            cfg.get_double("levy.c", 1.0), cfg.get_double("levy.beta", 0.7), grid, rng));
        const double outer_max = sub->value_at(horizon) * 0.99;
        const auto outer = levy::uniform_grid(outer_max, outer_max / 512.0);
        const auto tc = pathlab::time_change(inner, sub, outer);
        for (std::size_t i = 0; i < tc.outer_times.size(); ++i)
            res.table.add_row({tc.outer_times[i], tc.values[i]});
    } else {
        throw std::invalid_argument("unknown simulate kind: " + kind);
    }
    res.summary = "emitted " + std::to_string(res.table.rows.size()) + " samples";
    return res;
}

ExperimentResult run_verify(const std::string& what, const ExperimentConfig& cfg) {
    if (what == "laplace") return verify_laplace(cfg);
    if (what == "subordinator") return verify_subordinator(cfg);
    if (what == "pd") return verify_pd(cfg);
    if (what == "tail") return verify_tail(cfg);
    if (what == "mlt") return verify_mlt(cfg);
    if (what == "occupation") return verify_occupation(cfg);
    if (what == "rayknight") return verify_rayknight(cfg);
    if (what == "fracpde") return verify_fracpde(cfg);
    if (what == "pricing") return verify_pricing(cfg);
    if (what == "repro") return verify_repro(cfg);
    throw std::invalid_argument("unknown verify target: " + what);
}

}  // namespace subdiff::cli
