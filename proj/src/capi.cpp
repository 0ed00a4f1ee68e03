#include "subdiff.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <utility>

#include "experiments.hpp"
#include "levy.hpp"
#include "pricing.hpp"
#include "rayknight.hpp"
#include "transforms.hpp"

namespace {

thread_local std::string g_last_error;

sd_status set_error(sd_status code, const char* what) {
    g_last_error = what ? what : "";
    return code;
}

template <typename Fn>
sd_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const subdiff::levy::horizon_error& e) {
        return set_error(SD_ERR_HORIZON, e.what());
    } catch (const subdiff::pricing::contract_error& e) {
        return set_error(SD_ERR_CONTRACT, e.what());
    } catch (const std::domain_error& e) {
        return set_error(SD_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(SD_ERR_INVALID_ARG, e.what());
    } catch (const std::bad_alloc& e) {
        return set_error(SD_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return set_error(SD_ERR_NUMERIC, e.what());
    } catch (...) {
        return set_error(SD_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

struct sd_exponent {
    subdiff::levy::LaplaceExponent value;
};

struct sd_pi_calculus {
    template <typename... A>
    explicit sd_pi_calculus(A&&... a) : value(std::forward<A>(a)...) {}
    subdiff::transforms::PiCalculus value;
};

struct sd_experiment {
    subdiff::cli::ExperimentConfig config;
};

extern "C" {

const char* sd_last_error(void) { return g_last_error.c_str(); }

void sd_string_free(char* text) { std::free(text); }

sd_status sd_exponent_stable(double c, double beta, sd_exponent** out) {
    if (!out) return set_error(SD_ERR_INVALID_ARG, "null output pointer");
    return guarded([&] {
        *out = new sd_exponent{subdiff::levy::LaplaceExponent::stable(c, beta)};
        return SD_OK;
    });
}

sd_status sd_exponent_drift(double kappa, sd_exponent** out) {
    if (!out) return set_error(SD_ERR_INVALID_ARG, "null output pointer");
    return guarded([&] {
        *out = new sd_exponent{subdiff::levy::LaplaceExponent::drift(kappa)};
        return SD_OK;
    });
}

sd_status sd_exponent_drift_jumps(double kappa, sd_tail_fn w, void* ctx, double integral01,
                                  sd_exponent** out) {
    if (!out || !w) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        subdiff::levy::LevyTail tail;
        tail.w = [w, ctx](double x) { return w(x, ctx); };
        tail.integral01 = integral01;
        *out = new sd_exponent{
            subdiff::levy::LaplaceExponent::drift_plus_jumps(kappa, std::move(tail))};
        return SD_OK;
    });
}

void sd_exponent_free(sd_exponent* e) { delete e; }

sd_status sd_phi_eval(const sd_exponent* e, double lambda, double* out) {
    if (!e || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = subdiff::levy::phi_eval(e->value, lambda);
        return SD_OK;
    });
}

sd_status sd_hitting_pair_lt(const sd_exponent* e, double x, double lambda, double theta,
                             double* out) {
    if (!e || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = subdiff::transforms::hitting_pair_lt(e->value, x, lambda, theta);
        return SD_OK;
    });
}

sd_status sd_gaver_stehfest(sd_transform_fn transform, void* ctx, double t, int order, double* out,
                            double* error_estimate) {
    if (!transform || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = subdiff::transforms::gaver_stehfest(
            [transform, ctx](double s) { return transform(s, ctx); }, t, order, error_estimate);
        return SD_OK;
    });
}

sd_status sd_lt_occupation_functional(const sd_exponent* e, double alpha, sd_profile_fn g,
                                      void* ctx, double support_bound, double x, double step,
                                      double* out) {
    if (!e || !g || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        subdiff::rayknight::RiccatiProblem p;
        p.a = support_bound;
        p.alpha = alpha;
        p.exponent = e->value;
        p.g = [g, ctx](double r) { return g(r, ctx); };
        *out = subdiff::rayknight::lt_occupation_functional(p, x, step);
        return SD_OK;
    });
}

sd_status sd_pi_calculus_new(const sd_exponent* e, double duration, uint64_t seed,
                             sd_pi_calculus** out) {
    if (!e || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = new sd_pi_calculus(e->value, duration, subdiff::transforms::QuadratureConfig{},
                                  seed);
        return SD_OK;
    });
}

void sd_pi_calculus_free(sd_pi_calculus* calc) { delete calc; }

sd_status sd_pi_plus_mass(const sd_pi_calculus* calc, double* out) {
    if (!calc || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = calc->value.pi_plus_mass();
        return SD_OK;
    });
}

sd_status sd_m1_lt(const sd_pi_calculus* calc, double lambda, double theta, double* out) {
    if (!calc || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = calc->value.m1_lt(lambda, theta);
        return SD_OK;
    });
}

sd_status sd_m2_lt(const sd_pi_calculus* calc, double lambda, double theta, double* out) {
    if (!calc || !out) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out = calc->value.m2_lt(lambda, theta);
        return SD_OK;
    });
}

sd_status sd_experiment_new(sd_experiment** out) {
    if (!out) return set_error(SD_ERR_INVALID_ARG, "null output pointer");
    return guarded([&] {
        *out = new sd_experiment{};
        return SD_OK;
    });
}

void sd_experiment_free(sd_experiment* exp) { delete exp; }

sd_status sd_experiment_set(sd_experiment* exp, const char* key, const char* value) {
    if (!exp || !key || !value) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        exp->config.set(key, value);
        return SD_OK;
    });
}

sd_status sd_experiment_load_config(sd_experiment* exp, const char* path) {
    if (!exp || !path) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        const auto loaded = subdiff::cli::ExperimentConfig::load_file(path);
        for (const auto& [k, v] : loaded.entries()) exp->config.set(k, v);
        return SD_OK;
    });
}

sd_status sd_experiment_serialize(const sd_experiment* exp, char** out_text) {
    if (!exp || !out_text) return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&] {
        *out_text = dup_string(exp->config.serialize());
        return *out_text ? SD_OK : set_error(SD_ERR_INTERNAL, "allocation failed");
    });
}

sd_status sd_experiment_run(const sd_experiment* exp, const char* task, const char* format,
                            char** out_report, int* passed) {
    if (!exp || !task || !format || !out_report)
        return set_error(SD_ERR_INVALID_ARG, "null pointer argument");
    return guarded([&]() -> sd_status {
        const std::string t = task;
        subdiff::cli::ExperimentResult result;
        const auto colon = t.find(':');
        const std::string head = colon == std::string::npos ? t : t.substr(0, colon);
        const std::string rest = colon == std::string::npos ? "" : t.substr(colon + 1);
        if (head == "verify")
            result = subdiff::cli::run_verify(rest, exp->config);
        else if (head == "price")
            result = subdiff::cli::price_run(rest, exp->config);
        else if (head == "simulate")
            result = subdiff::cli::simulate_run(rest, exp->config);
        else
            return set_error(SD_ERR_INVALID_ARG, "unknown task");
        *out_report = dup_string(subdiff::cli::render(result.table, format));
        if (!*out_report) return set_error(SD_ERR_INTERNAL, "allocation failed");
        if (passed) *passed = result.passed ? 1 : 0;
        return SD_OK;
    });
}

}  // extern "C"
