/* subdiff: simulation and transform toolkit for processes time-changed by
 * inverse subordinators, with Parisian option pricing.
 *
 * C interface over the C++ core. All functions return sd_status; outputs go
 * through pointers. Handles are opaque and must be released with their
 * matching _free call. The last error message (per thread) is available via
 * sd_last_error().
 */
#ifndef SUBDIFF_H
#define SUBDIFF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SD_API __declspec(dllexport)
#else
#define SD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sd_status {
    SD_OK = 0,
    SD_ERR_INVALID_ARG = 1,
    SD_ERR_DOMAIN = 2,
    SD_ERR_HORIZON = 3,
    SD_ERR_NUMERIC = 4,
    SD_ERR_CONTRACT = 5,
    SD_ERR_IO = 6,
    SD_ERR_INTERNAL = 7
} sd_status;

SD_API const char* sd_last_error(void);
SD_API void sd_string_free(char* text);

/* ---- Laplace exponents ------------------------------------------------- */

typedef struct sd_exponent sd_exponent;

/* phi(lambda) = c lambda^beta, 0 < beta < 1 */
SD_API sd_status sd_exponent_stable(double c, double beta, sd_exponent** out);
/* phi(lambda) = kappa lambda */
SD_API sd_status sd_exponent_drift(double kappa, sd_exponent** out);
/* kappa lambda + int (1-e^{-lambda r}) nu(dr), with w(x) = nu(x,inf) given as
 * a callback plus the certified value of the integral of w over (0,1]. */
typedef double (*sd_tail_fn)(double x, void* ctx);
SD_API sd_status sd_exponent_drift_jumps(double kappa, sd_tail_fn w, void* ctx,
                                         double integral01, sd_exponent** out);
SD_API void sd_exponent_free(sd_exponent* e);

SD_API sd_status sd_phi_eval(const sd_exponent* e, double lambda, double* out);

/* joint transform of (S(tau_x), tau_x): exp(-x sqrt(2 (phi(lambda)+theta))) */
SD_API sd_status sd_hitting_pair_lt(const sd_exponent* e, double x, double lambda, double theta,
                                    double* out);

/* ---- numerical Laplace inversion ---------------------------------------- */

typedef double (*sd_transform_fn)(double s, void* ctx);
SD_API sd_status sd_gaver_stehfest(sd_transform_fn transform, void* ctx, double t, int order,
                                   double* out, double* error_estimate);

/* ---- occupation functionals (Ray-Knight machinery) ---------------------- */

typedef double (*sd_profile_fn)(double r, void* ctx);
/* E[exp(-int_0^{tau*} g(X*(t)) dt)] for X = x + B - alpha t killed at zero */
SD_API sd_status sd_lt_occupation_functional(const sd_exponent* e, double alpha, sd_profile_fn g,
                                             void* ctx, double support_bound, double x,
                                             double step, double* out);

/* ---- first-long-excursion transforms ------------------------------------ */

typedef struct sd_pi_calculus sd_pi_calculus;
SD_API sd_status sd_pi_calculus_new(const sd_exponent* e, double duration, uint64_t seed,
                                    sd_pi_calculus** out);
SD_API void sd_pi_calculus_free(sd_pi_calculus* calc);
SD_API sd_status sd_pi_plus_mass(const sd_pi_calculus* calc, double* out);
SD_API sd_status sd_m1_lt(const sd_pi_calculus* calc, double lambda, double theta, double* out);
SD_API sd_status sd_m2_lt(const sd_pi_calculus* calc, double lambda, double theta, double* out);

/* ---- experiments (the CLI surface) -------------------------------------- */

typedef struct sd_experiment sd_experiment;

SD_API sd_status sd_experiment_new(sd_experiment** out);
SD_API void sd_experiment_free(sd_experiment* exp);
/* dotted keys, e.g. "levy.beta" = "0.7"; sections mirror the library modules */
SD_API sd_status sd_experiment_set(sd_experiment* exp, const char* key, const char* value);
SD_API sd_status sd_experiment_load_config(sd_experiment* exp, const char* path);
SD_API sd_status sd_experiment_serialize(const sd_experiment* exp, char** out_text);

/* task: "verify:<target>" (pd, occupation, mlt, rayknight, fracpde, laplace,
 * subordinator, tail, pricing, repro), "price:direct", "price:decomposition",
 * or "simulate:<kind>". format: "csv" or "json". On success *out_report holds
 * the rendered table (free with sd_string_free) and *passed is 1/0. */
SD_API sd_status sd_experiment_run(const sd_experiment* exp, const char* task, const char* format,
                                   char** out_report, int* passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SUBDIFF_H */
