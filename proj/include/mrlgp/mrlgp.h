/* mrlgp -- piecewise-stationary Gaussian-process priors (Markov region link
 * kernel), dual-process fault removal and additive signal separation for 1-D
 * time series.
 *
 * C interface of the shared library.  All objects are opaque handles created
 * by mrlgp_*_new-style constructors and released with the matching _free;
 * every fallible call returns an mrlgp_status, with a thread-local message
 * available from mrlgp_last_error().  Output buffers are caller-allocated;
 * sizes are exposed through the corresponding _size call or are implied by
 * the input length.
 */
#ifndef MRLGP_H
#define MRLGP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MRLGP_API __declspec(dllexport)
#else
#define MRLGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mrlgp_status {
    MRLGP_OK = 0,
    MRLGP_ERR_PARAM = 1,       /* invalid parameter or model configuration */
    MRLGP_ERR_NUMERIC = 2,     /* factorization / numerical failure */
    MRLGP_ERR_UNSUPPORTED = 3, /* operation not available for this family */
    MRLGP_ERR_INFERENCE = 4,   /* inference produced no usable result */
    MRLGP_ERR_INTERNAL = 5
} mrlgp_status;

MRLGP_API const char* mrlgp_version(void);
/* message for the most recent failing call on this thread */
MRLGP_API const char* mrlgp_last_error(void);

/* ------------------------------------------------------------------ */
/* kernels                                                             */

typedef struct mrlgp_kernel mrlgp_kernel;

MRLGP_API mrlgp_status mrlgp_kernel_se(double mu, double len, mrlgp_kernel** out);
MRLGP_API mrlgp_status mrlgp_kernel_constant(double mu, mrlgp_kernel** out);
MRLGP_API mrlgp_status mrlgp_kernel_zero(mrlgp_kernel** out);
MRLGP_API mrlgp_status mrlgp_kernel_white_noise(double sigma2, mrlgp_kernel** out);
/* piecewise-constant length scale: values[i] applies to x <= cuts[i],
 * values[n_cuts] beyond the last cut */
MRLGP_API mrlgp_status mrlgp_kernel_gibbs(const double* cuts, size_t n_cuts, const double* values,
                                          double mu, mrlgp_kernel** out);
MRLGP_API void mrlgp_kernel_free(mrlgp_kernel* k);

MRLGP_API mrlgp_status mrlgp_kernel_eval(const mrlgp_kernel* k, double x1, double x2, double* out);
MRLGP_API mrlgp_status mrlgp_kernel_eval_d1(const mrlgp_kernel* k, double x1, double x2,
                                            double* out);
MRLGP_API mrlgp_status mrlgp_kernel_eval_d12(const mrlgp_kernel* k, double x1, double x2,
                                             double* out);

/* ------------------------------------------------------------------ */
/* covariance sources (kernels, region models, fault kernels)          */

typedef struct mrlgp_cov mrlgp_cov;

MRLGP_API mrlgp_status mrlgp_cov_from_kernel(const mrlgp_kernel* k, mrlgp_cov** out);
MRLGP_API mrlgp_status mrlgp_cov_bias(double t0, double t1, double mu, mrlgp_cov** out);
MRLGP_API mrlgp_status mrlgp_cov_drift(double t0, double t1, double mu, double len,
                                       mrlgp_cov** out);
MRLGP_API mrlgp_status mrlgp_cov_drift_then_bias(double t0, double t_m, double t1, double mu,
                                                 double len, double k_b_link, mrlgp_cov** out);
MRLGP_API void mrlgp_cov_free(mrlgp_cov* c);

MRLGP_API mrlgp_status mrlgp_cov_eval(const mrlgp_cov* c, double x1, double x2, double* out);
/* row-major nx-by-ny matrix into out */
MRLGP_API mrlgp_status mrlgp_cov_gram(const mrlgp_cov* c, const double* x, size_t nx,
                                      const double* y, size_t ny, double* out);

/* ------------------------------------------------------------------ */
/* region models (piecewise-stationary priors)                         */

typedef struct mrlgp_region_model mrlgp_region_model;

/* builder: add regions left to right, with a boundary between consecutive
 * regions.  A model with R regions needs R-1 boundaries. */
MRLGP_API mrlgp_status mrlgp_region_model_new(mrlgp_region_model** out);
MRLGP_API mrlgp_status mrlgp_region_add(mrlgp_region_model* m, const mrlgp_kernel* k);
/* value-continuous boundary with variance v */
MRLGP_API mrlgp_status mrlgp_region_boundary(mrlgp_region_model* m, double loc, double v);
/* value- and slope-continuous boundary (variances v, w) */
MRLGP_API mrlgp_status mrlgp_region_boundary_c1(mrlgp_region_model* m, double loc, double v,
                                                double w);
/* independence splice: the two sides stay decorrelated */
MRLGP_API mrlgp_status mrlgp_region_break(mrlgp_region_model* m, double loc);
MRLGP_API void mrlgp_region_model_free(mrlgp_region_model* m);

MRLGP_API mrlgp_status mrlgp_region_eval(const mrlgp_region_model* m, double x1, double x2,
                                         double* out);
MRLGP_API mrlgp_status mrlgp_cov_from_region(const mrlgp_region_model* m, mrlgp_cov** out);

/* ------------------------------------------------------------------ */
/* GP regression                                                       */

MRLGP_API mrlgp_status mrlgp_posterior(const double* t, const double* y, size_t n,
                                       const double* xs, size_t m, const mrlgp_cov* k,
                                       double sigma2, double* mean, double* variance);
MRLGP_API mrlgp_status mrlgp_dual_posterior(const double* t, const double* y, size_t n,
                                            const double* xs, size_t m, const mrlgp_cov* k_f,
                                            const mrlgp_cov* k_e, double sigma2, double* f_mean,
                                            double* f_variance, double* e_mean,
                                            double* e_variance);
MRLGP_API mrlgp_status mrlgp_log_evidence(const double* t, const double* y, size_t n,
                                          const mrlgp_cov* k, double sigma2, double* out);
MRLGP_API mrlgp_status mrlgp_sample_prior(const mrlgp_cov* k, const double* x, size_t n,
                                          uint64_t seed, double* out);

/* ------------------------------------------------------------------ */
/* priors for the Monte-Carlo marginalization                          */

typedef struct mrlgp_prior {
    int kind; /* 0 uniform, 1 log_uniform, 2 fixed (lo holds the value) */
    double lo;
    double hi;
} mrlgp_prior;

MRLGP_API mrlgp_prior mrlgp_prior_uniform(double lo, double hi);
MRLGP_API mrlgp_prior mrlgp_prior_log_uniform(double lo, double hi);
MRLGP_API mrlgp_prior mrlgp_prior_fixed(double v);

/* ------------------------------------------------------------------ */
/* scenario generators                                                 */

typedef struct mrlgp_scenario mrlgp_scenario;

/* fault kinds: 0 bias, 1 drift, 2 drift_then_bias */
typedef struct mrlgp_tracking_config {
    double t_start, t_end, dt;
    double real_scale, real_len;
    double fault_t0, fault_t1, fault_mu;
    double drift_len, fault_tm, k_b_link;
    double noise_var;
} mrlgp_tracking_config;

MRLGP_API mrlgp_tracking_config mrlgp_tracking_defaults(void);
MRLGP_API mrlgp_status mrlgp_simulate_tracking(int fault_kind, uint64_t seed,
                                               const mrlgp_tracking_config* cfg,
                                               mrlgp_scenario** out);
MRLGP_API mrlgp_status mrlgp_simulate_gibbs(uint64_t seed, mrlgp_scenario** out);
MRLGP_API mrlgp_status mrlgp_simulate_wedge(int high_snr, uint64_t seed, mrlgp_scenario** out);

MRLGP_API size_t mrlgp_scenario_size(const mrlgp_scenario* s);
MRLGP_API const double* mrlgp_scenario_t(const mrlgp_scenario* s);
MRLGP_API const double* mrlgp_scenario_truth(const mrlgp_scenario* s);
MRLGP_API const double* mrlgp_scenario_fault(const mrlgp_scenario* s);
MRLGP_API const double* mrlgp_scenario_observed(const mrlgp_scenario* s);
MRLGP_API const char* mrlgp_scenario_config(const mrlgp_scenario* s);
MRLGP_API void mrlgp_scenario_free(mrlgp_scenario* s);

/* ------------------------------------------------------------------ */
/* fault removal                                                       */

typedef struct mrlgp_remove_options {
    double real_scale, real_len; /* kernel of the real process */
    mrlgp_prior onset, end_, magnitude, length, link_var, noise_var;
    int n_samples;
    uint64_t seed;
} mrlgp_remove_options;

/* defaults need the data span for the window priors */
MRLGP_API mrlgp_status mrlgp_remove_defaults(double t_lo, double t_hi,
                                             mrlgp_remove_options* out);

typedef struct mrlgp_removal mrlgp_removal;

MRLGP_API mrlgp_status mrlgp_remove_fault(const double* t, const double* y, size_t n,
                                          int fault_kind, const mrlgp_remove_options* opt,
                                          mrlgp_removal** out);
MRLGP_API size_t mrlgp_removal_size(const mrlgp_removal* r);
MRLGP_API const double* mrlgp_removal_clean_mean(const mrlgp_removal* r);
MRLGP_API const double* mrlgp_removal_clean_var(const mrlgp_removal* r);
MRLGP_API const double* mrlgp_removal_fault_mean(const mrlgp_removal* r);
MRLGP_API const double* mrlgp_removal_fault_var(const mrlgp_removal* r);
MRLGP_API const double* mrlgp_removal_combined_mean(const mrlgp_removal* r);
MRLGP_API void mrlgp_removal_free(mrlgp_removal* r);

/* ------------------------------------------------------------------ */
/* signal separation                                                   */

typedef struct mrlgp_separate_options {
    mrlgp_prior sig_scale, sig_len, art_scale, art_len, t_start, t_end, r_sig, r_art;
    int n_samples;
    uint64_t seed;
} mrlgp_separate_options;

MRLGP_API mrlgp_status mrlgp_separate_defaults(double t_lo, double t_hi,
                                               mrlgp_separate_options* out);

typedef struct mrlgp_separation mrlgp_separation;

MRLGP_API mrlgp_status mrlgp_separate(const double* t, const double* y, size_t n,
                                      const mrlgp_separate_options* opt, mrlgp_separation** out);
MRLGP_API size_t mrlgp_separation_size(const mrlgp_separation* s);
MRLGP_API const double* mrlgp_separation_sig(const mrlgp_separation* s);
MRLGP_API const double* mrlgp_separation_art(const mrlgp_separation* s);
MRLGP_API const double* mrlgp_separation_var(const mrlgp_separation* s);
MRLGP_API double mrlgp_separation_t_start(const mrlgp_separation* s);
MRLGP_API double mrlgp_separation_t_end(const mrlgp_separation* s);
MRLGP_API void mrlgp_separation_free(mrlgp_separation* s);

/* ------------------------------------------------------------------ */
/* hyperparameter fitting (importance sampling)                        */

typedef struct mrlgp_fit mrlgp_fit;

/* single squared-exponential kernel: parameters (mu, L), noise sigma2 */
MRLGP_API mrlgp_status mrlgp_fit_se(const double* t, const double* y, size_t n,
                                    mrlgp_prior scale, mrlgp_prior len, mrlgp_prior noise_var,
                                    int n_samples, uint64_t seed, mrlgp_fit** out);
/* two SE regions joined at a value-continuous boundary; per-side lengths
 * marginalized, scales and boundary variance given */
MRLGP_API mrlgp_status mrlgp_fit_mrl2(const double* t, const double* y, size_t n, double boundary,
                                      double scale1, double scale2, double boundary_var,
                                      mrlgp_prior len1, mrlgp_prior len2, mrlgp_prior noise_var,
                                      int n_samples, uint64_t seed, mrlgp_fit** out);

MRLGP_API size_t mrlgp_fit_n_samples(const mrlgp_fit* f);
MRLGP_API size_t mrlgp_fit_n_params(const mrlgp_fit* f);
MRLGP_API const char* mrlgp_fit_param_name(const mrlgp_fit* f, size_t dim);
/* row-major n_samples x n_params */
MRLGP_API const double* mrlgp_fit_samples(const mrlgp_fit* f);
MRLGP_API const double* mrlgp_fit_log_weights(const mrlgp_fit* f);
MRLGP_API mrlgp_status mrlgp_fit_quantile(const mrlgp_fit* f, size_t dim, double q, double* out);
MRLGP_API void mrlgp_fit_free(mrlgp_fit* f);

#ifdef __cplusplus
}
#endif

#endif /* MRLGP_H */
