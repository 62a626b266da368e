#include "mrlgp/mrlgp.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "mrlgp/errors.hpp"
#include "mrlgp/faults.hpp"
#include "mrlgp/gp.hpp"
#include "mrlgp/hyper.hpp"
#include "mrlgp/kernels.hpp"
#include "mrlgp/region.hpp"
#include "mrlgp/separation.hpp"
#include "mrlgp/simulate.hpp"

namespace {

thread_local std::string g_last_error;

mrlgp_status fail(mrlgp_status code, const char* what) {
    g_last_error = what;
    return code;
}

// run a body, translating exceptions to status codes
template <typename Fn>
mrlgp_status guarded(Fn&& fn) {
    try {
        fn();
        return MRLGP_OK;
    } catch (const mrlgp::ParameterError& e) {
        return fail(MRLGP_ERR_PARAM, e.what());
    } catch (const mrlgp::UnsupportedError& e) {
        return fail(MRLGP_ERR_UNSUPPORTED, e.what());
    } catch (const mrlgp::NumericError& e) {
        return fail(MRLGP_ERR_NUMERIC, e.what());
    } catch (const mrlgp::InferenceError& e) {
        return fail(MRLGP_ERR_INFERENCE, e.what());
    } catch (const std::exception& e) {
        return fail(MRLGP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MRLGP_ERR_INTERNAL, "unknown error");
    }
}

mrlgp::PriorSpec to_prior(const mrlgp_prior& p) {
    switch (p.kind) {
        case 0: return mrlgp::PriorSpec::uniform(p.lo, p.hi);
        case 1: return mrlgp::PriorSpec::log_uniform(p.lo, p.hi);
        case 2: return mrlgp::PriorSpec::fixed(p.lo);
        default: throw mrlgp::ParameterError("unknown prior kind");
    }
}

mrlgp::FaultKind to_kind(int k) {
    switch (k) {
        case 0: return mrlgp::FaultKind::bias;
        case 1: return mrlgp::FaultKind::drift;
        case 2: return mrlgp::FaultKind::drift_then_bias;
        default: throw mrlgp::ParameterError("fault kind must be 0, 1 or 2");
    }
}

}  // namespace

struct mrlgp_kernel {
    mrlgp::KernelSpec spec;
};

struct mrlgp_cov {
    mrlgp::CovFn fn;
};

struct mrlgp_region_model {
    std::vector<mrlgp::KernelSpec> regions;
    std::vector<mrlgp::BoundaryLink> boundaries;
    // built lazily on first evaluation
    std::shared_ptr<mrlgp::RegionModel> built;

    const mrlgp::RegionModel& model() {
        if (!built) built = std::make_shared<mrlgp::RegionModel>(regions, boundaries);
        return *built;
    }
};

struct mrlgp_scenario {
    mrlgp::Scenario s;
};

struct mrlgp_removal {
    mrlgp::FaultRemovalResult r;
    std::vector<double> clean_mean, clean_var, fault_mean, fault_var, combined;
};

struct mrlgp_separation {
    std::vector<double> sig, art, var;
    double ts = 0.0, te = 0.0;
};

struct mrlgp_fit {
    mrlgp::HyperPosterior hp;
    std::vector<double> samples_rm;  // row-major copy
    std::vector<double> logw;
};

extern "C" {

const char* mrlgp_version(void) { return "1.0.0"; }

const char* mrlgp_last_error(void) { return g_last_error.c_str(); }

/* ------------------------- kernels ------------------------- */

mrlgp_status mrlgp_kernel_se(double mu, double len, mrlgp_kernel** out) {
    return guarded([&] { *out = new mrlgp_kernel{mrlgp::KernelSpec::squared_exponential(mu, len)}; });
}

mrlgp_status mrlgp_kernel_constant(double mu, mrlgp_kernel** out) {
    return guarded([&] { *out = new mrlgp_kernel{mrlgp::KernelSpec::constant(mu)}; });
}

mrlgp_status mrlgp_kernel_zero(mrlgp_kernel** out) {
    return guarded([&] { *out = new mrlgp_kernel{mrlgp::KernelSpec::zero()}; });
}

mrlgp_status mrlgp_kernel_white_noise(double sigma2, mrlgp_kernel** out) {
    return guarded([&] { *out = new mrlgp_kernel{mrlgp::KernelSpec::white_noise(sigma2)}; });
}

mrlgp_status mrlgp_kernel_gibbs(const double* cuts, size_t n_cuts, const double* values, double mu,
                                mrlgp_kernel** out) {
    return guarded([&] {
        mrlgp::GibbsLengthTable t;
        t.cuts.assign(cuts, cuts + n_cuts);
        t.values.assign(values, values + n_cuts + 1);
        *out = new mrlgp_kernel{mrlgp::KernelSpec::gibbs(std::move(t), mu)};
    });
}

void mrlgp_kernel_free(mrlgp_kernel* k) { delete k; }

mrlgp_status mrlgp_kernel_eval(const mrlgp_kernel* k, double x1, double x2, double* out) {
    return guarded([&] { *out = mrlgp::eval(k->spec, x1, x2); });
}

mrlgp_status mrlgp_kernel_eval_d1(const mrlgp_kernel* k, double x1, double x2, double* out) {
    return guarded([&] { *out = mrlgp::eval_d1(k->spec, x1, x2); });
}

mrlgp_status mrlgp_kernel_eval_d12(const mrlgp_kernel* k, double x1, double x2, double* out) {
    return guarded([&] { *out = mrlgp::eval_d12(k->spec, x1, x2); });
}

/* ------------------------- cov sources ------------------------- */

mrlgp_status mrlgp_cov_from_kernel(const mrlgp_kernel* k, mrlgp_cov** out) {
    return guarded([&] { *out = new mrlgp_cov{mrlgp::cov_fn(k->spec)}; });
}

mrlgp_status mrlgp_cov_bias(double t0, double t1, double mu, mrlgp_cov** out) {
    return guarded([&] { *out = new mrlgp_cov{mrlgp::cov_fn(mrlgp::FaultSpec::bias(t0, t1, mu))}; });
}

mrlgp_status mrlgp_cov_drift(double t0, double t1, double mu, double len, mrlgp_cov** out) {
    return guarded(
        [&] { *out = new mrlgp_cov{mrlgp::cov_fn(mrlgp::FaultSpec::drift(t0, t1, mu, len))}; });
}

mrlgp_status mrlgp_cov_drift_then_bias(double t0, double t_m, double t1, double mu, double len,
                                       double k_b_link, mrlgp_cov** out) {
    return guarded([&] {
        *out = new mrlgp_cov{
            mrlgp::cov_fn(mrlgp::FaultSpec::drift_then_bias(t0, t_m, t1, mu, len, k_b_link))};
    });
}

void mrlgp_cov_free(mrlgp_cov* c) { delete c; }

mrlgp_status mrlgp_cov_eval(const mrlgp_cov* c, double x1, double x2, double* out) {
    return guarded([&] { *out = c->fn(x1, x2); });
}

mrlgp_status mrlgp_cov_gram(const mrlgp_cov* c, const double* x, size_t nx, const double* y,
                            size_t ny, double* out) {
    return guarded([&] {
        for (size_t i = 0; i < nx; ++i)
            for (size_t j = 0; j < ny; ++j) out[i * ny + j] = c->fn(x[i], y[j]);
    });
}

/* ------------------------- region models ------------------------- */

mrlgp_status mrlgp_region_model_new(mrlgp_region_model** out) {
    return guarded([&] { *out = new mrlgp_region_model{}; });
}

mrlgp_status mrlgp_region_add(mrlgp_region_model* m, const mrlgp_kernel* k) {
    return guarded([&] {
        m->regions.push_back(k->spec);
        m->built.reset();
    });
}

mrlgp_status mrlgp_region_boundary(mrlgp_region_model* m, double loc, double v) {
    return guarded([&] {
        m->boundaries.push_back(mrlgp::BoundaryLink::value(loc, v));
        m->built.reset();
    });
}

mrlgp_status mrlgp_region_boundary_c1(mrlgp_region_model* m, double loc, double v, double w) {
    return guarded([&] {
        m->boundaries.push_back(mrlgp::BoundaryLink::value_and_slope(loc, v, w));
        m->built.reset();
    });
}

mrlgp_status mrlgp_region_break(mrlgp_region_model* m, double loc) {
    return guarded([&] {
        m->boundaries.push_back(mrlgp::BoundaryLink::independent(loc));
        m->built.reset();
    });
}

void mrlgp_region_model_free(mrlgp_region_model* m) { delete m; }

mrlgp_status mrlgp_region_eval(const mrlgp_region_model* m, double x1, double x2, double* out) {
    return guarded(
        [&] { *out = const_cast<mrlgp_region_model*>(m)->model().eval(x1, x2); });
}

mrlgp_status mrlgp_cov_from_region(const mrlgp_region_model* m, mrlgp_cov** out) {
    return guarded([&] {
        const_cast<mrlgp_region_model*>(m)->model();
        auto shared = const_cast<mrlgp_region_model*>(m)->built;
        *out = new mrlgp_cov{[shared](double a, double b) { return shared->eval(a, b); }};
    });
}

/* ------------------------- GP regression ------------------------- */

mrlgp_status mrlgp_posterior(const double* t, const double* y, size_t n, const double* xs,
                             size_t m, const mrlgp_cov* k, double sigma2, double* mean,
                             double* variance) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        const auto e = mrlgp::posterior(train, std::span(xs, m), k->fn, sigma2);
        std::memcpy(mean, e.mean.data(), m * sizeof(double));
        std::memcpy(variance, e.variance.data(), m * sizeof(double));
    });
}

mrlgp_status mrlgp_dual_posterior(const double* t, const double* y, size_t n, const double* xs,
                                  size_t m, const mrlgp_cov* k_f, const mrlgp_cov* k_e,
                                  double sigma2, double* f_mean, double* f_variance,
                                  double* e_mean, double* e_variance) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        const auto [f, e] =
            mrlgp::dual_posterior(train, std::span(xs, m), k_f->fn, k_e->fn, sigma2);
        std::memcpy(f_mean, f.mean.data(), m * sizeof(double));
        std::memcpy(f_variance, f.variance.data(), m * sizeof(double));
        std::memcpy(e_mean, e.mean.data(), m * sizeof(double));
        std::memcpy(e_variance, e.variance.data(), m * sizeof(double));
    });
}

mrlgp_status mrlgp_log_evidence(const double* t, const double* y, size_t n, const mrlgp_cov* k,
                                double sigma2, double* out) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        *out = mrlgp::log_evidence(train, k->fn, sigma2);
    });
}

mrlgp_status mrlgp_sample_prior(const mrlgp_cov* k, const double* x, size_t n, uint64_t seed,
                                double* out) {
    return guarded([&] {
        const auto draw = mrlgp::sample_prior(k->fn, std::span(x, n), seed);
        std::memcpy(out, draw.data(), n * sizeof(double));
    });
}

/* ------------------------- priors ------------------------- */

mrlgp_prior mrlgp_prior_uniform(double lo, double hi) { return {0, lo, hi}; }
mrlgp_prior mrlgp_prior_log_uniform(double lo, double hi) { return {1, lo, hi}; }
mrlgp_prior mrlgp_prior_fixed(double v) { return {2, v, v}; }

/* ------------------------- scenarios ------------------------- */

mrlgp_tracking_config mrlgp_tracking_defaults(void) {
    const mrlgp::TrackingConfig c;
    return {c.t_start, c.t_end,   c.dt,       c.real_scale, c.real_len, c.fault_t0,
            c.fault_t1, c.fault_mu, c.drift_len, c.fault_tm,   c.k_b_link, c.noise_var};
}

mrlgp_status mrlgp_simulate_tracking(int fault_kind, uint64_t seed,
                                     const mrlgp_tracking_config* cfg, mrlgp_scenario** out) {
    return guarded([&] {
        mrlgp::TrackingConfig c;
        if (cfg) {
            c.t_start = cfg->t_start;
            c.t_end = cfg->t_end;
            c.dt = cfg->dt;
            c.real_scale = cfg->real_scale;
            c.real_len = cfg->real_len;
            c.fault_t0 = cfg->fault_t0;
            c.fault_t1 = cfg->fault_t1;
            c.fault_mu = cfg->fault_mu;
            c.drift_len = cfg->drift_len;
            c.fault_tm = cfg->fault_tm;
            c.k_b_link = cfg->k_b_link;
            c.noise_var = cfg->noise_var;
        }
        *out = new mrlgp_scenario{mrlgp::gen_tracking(to_kind(fault_kind), seed, c)};
    });
}

mrlgp_status mrlgp_simulate_gibbs(uint64_t seed, mrlgp_scenario** out) {
    return guarded([&] { *out = new mrlgp_scenario{mrlgp::gen_gibbs_demo(seed)}; });
}

mrlgp_status mrlgp_simulate_wedge(int high_snr, uint64_t seed, mrlgp_scenario** out) {
    return guarded([&] {
        *out = new mrlgp_scenario{
            mrlgp::gen_wedge(high_snr ? mrlgp::WedgeSnr::high : mrlgp::WedgeSnr::low, seed)};
    });
}

size_t mrlgp_scenario_size(const mrlgp_scenario* s) { return s->s.truth.size(); }
const double* mrlgp_scenario_t(const mrlgp_scenario* s) { return s->s.truth.t.data(); }
const double* mrlgp_scenario_truth(const mrlgp_scenario* s) { return s->s.truth.y.data(); }
const double* mrlgp_scenario_fault(const mrlgp_scenario* s) { return s->s.fault.y.data(); }
const double* mrlgp_scenario_observed(const mrlgp_scenario* s) { return s->s.observed.y.data(); }
const char* mrlgp_scenario_config(const mrlgp_scenario* s) { return s->s.config.c_str(); }
void mrlgp_scenario_free(mrlgp_scenario* s) { delete s; }

/* ------------------------- fault removal ------------------------- */

mrlgp_status mrlgp_remove_defaults(double t_lo, double t_hi, mrlgp_remove_options* out) {
    return guarded([&] {
        const auto p = mrlgp::FaultPriors::defaults(t_lo, t_hi);
        auto from = [](const mrlgp::PriorSpec& s) {
            return mrlgp_prior{static_cast<int>(s.kind), s.lo, s.hi};
        };
        out->real_scale = 1.0;
        out->real_len = 10.0;
        out->onset = from(p.onset);
        out->end_ = from(p.end);
        out->magnitude = from(p.magnitude);
        out->length = from(p.length);
        out->link_var = from(p.link_var);
        out->noise_var = from(p.noise_var);
        out->n_samples = 2000;
        out->seed = 0;
    });
}

mrlgp_status mrlgp_remove_fault(const double* t, const double* y, size_t n, int fault_kind,
                                const mrlgp_remove_options* opt, mrlgp_removal** out) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        mrlgp::FaultPriors priors;
        priors.onset = to_prior(opt->onset);
        priors.end = to_prior(opt->end_);
        priors.magnitude = to_prior(opt->magnitude);
        priors.length = to_prior(opt->length);
        priors.link_var = to_prior(opt->link_var);
        priors.noise_var = to_prior(opt->noise_var);
        const auto real_k =
            mrlgp::KernelSpec::squared_exponential(opt->real_scale, opt->real_len);
        auto* r = new mrlgp_removal{};
        r->r = mrlgp::remove_fault(train, real_k, to_kind(fault_kind), priors, opt->n_samples,
                                   opt->seed);
        auto dump = [](const Eigen::VectorXd& v, std::vector<double>& dst) {
            dst.assign(v.data(), v.data() + v.size());
        };
        dump(r->r.clean.mean, r->clean_mean);
        dump(r->r.clean.variance, r->clean_var);
        dump(r->r.fault.mean, r->fault_mean);
        dump(r->r.fault.variance, r->fault_var);
        dump(r->r.combined_mean, r->combined);
        *out = r;
    });
}

size_t mrlgp_removal_size(const mrlgp_removal* r) { return r->clean_mean.size(); }
const double* mrlgp_removal_clean_mean(const mrlgp_removal* r) { return r->clean_mean.data(); }
const double* mrlgp_removal_clean_var(const mrlgp_removal* r) { return r->clean_var.data(); }
const double* mrlgp_removal_fault_mean(const mrlgp_removal* r) { return r->fault_mean.data(); }
const double* mrlgp_removal_fault_var(const mrlgp_removal* r) { return r->fault_var.data(); }
const double* mrlgp_removal_combined_mean(const mrlgp_removal* r) { return r->combined.data(); }
void mrlgp_removal_free(mrlgp_removal* r) { delete r; }

/* ------------------------- separation ------------------------- */

mrlgp_status mrlgp_separate_defaults(double t_lo, double t_hi, mrlgp_separate_options* out) {
    return guarded([&] {
        const auto p = mrlgp::SeparationPriors::defaults(t_lo, t_hi);
        auto from = [](const mrlgp::PriorSpec& s) {
            return mrlgp_prior{static_cast<int>(s.kind), s.lo, s.hi};
        };
        out->sig_scale = from(p.sig_scale);
        out->sig_len = from(p.sig_len);
        out->art_scale = from(p.art_scale);
        out->art_len = from(p.art_len);
        out->t_start = from(p.t_start);
        out->t_end = from(p.t_end);
        out->r_sig = from(p.r_sig);
        out->r_art = from(p.r_art);
        out->n_samples = 400;
        out->seed = 0;
    });
}

mrlgp_status mrlgp_separate(const double* t, const double* y, size_t n,
                            const mrlgp_separate_options* opt, mrlgp_separation** out) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        mrlgp::SeparationPriors priors;
        priors.sig_scale = to_prior(opt->sig_scale);
        priors.sig_len = to_prior(opt->sig_len);
        priors.art_scale = to_prior(opt->art_scale);
        priors.art_len = to_prior(opt->art_len);
        priors.t_start = to_prior(opt->t_start);
        priors.t_end = to_prior(opt->t_end);
        priors.r_sig = to_prior(opt->r_sig);
        priors.r_art = to_prior(opt->r_art);
        const auto r = mrlgp::separate(train, priors, opt->n_samples, opt->seed);
        auto* s = new mrlgp_separation{};
        s->sig.assign(r.s_sig.data(), r.s_sig.data() + r.s_sig.size());
        s->art.assign(r.s_art.data(), r.s_art.data() + r.s_art.size());
        s->var.assign(r.var.data(), r.var.data() + r.var.size());
        s->ts = r.t_start_hat;
        s->te = r.t_end_hat;
        *out = s;
    });
}

size_t mrlgp_separation_size(const mrlgp_separation* s) { return s->sig.size(); }
const double* mrlgp_separation_sig(const mrlgp_separation* s) { return s->sig.data(); }
const double* mrlgp_separation_art(const mrlgp_separation* s) { return s->art.data(); }
const double* mrlgp_separation_var(const mrlgp_separation* s) { return s->var.data(); }
double mrlgp_separation_t_start(const mrlgp_separation* s) { return s->ts; }
double mrlgp_separation_t_end(const mrlgp_separation* s) { return s->te; }
void mrlgp_separation_free(mrlgp_separation* s) { delete s; }

/* ------------------------- fitting ------------------------- */

mrlgp_status mrlgp_fit_se(const double* t, const double* y, size_t n, mrlgp_prior scale,
                          mrlgp_prior len, mrlgp_prior noise_var, int n_samples, uint64_t seed,
                          mrlgp_fit** out) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        const std::vector<mrlgp::PriorSpec> priors = {to_prior(scale), to_prior(len),
                                                      to_prior(noise_var)};
        auto log_ev = [&train](std::span<const double> th) {
            const auto k = mrlgp::KernelSpec::squared_exponential(th[0], th[1]);
            return mrlgp::log_evidence(train, mrlgp::cov_fn(k), th[2]);
        };
        auto* f = new mrlgp_fit{};
        f->hp = mrlgp::mc_marginalize(log_ev, priors, {"mu", "L", "sigma2"}, n_samples, seed);
        f->samples_rm.resize(static_cast<size_t>(f->hp.samples.size()));
        for (Eigen::Index i = 0; i < f->hp.samples.rows(); ++i)
            for (Eigen::Index j = 0; j < f->hp.samples.cols(); ++j)
                f->samples_rm[static_cast<size_t>(i * f->hp.samples.cols() + j)] =
                    f->hp.samples(i, j);
        f->logw.assign(f->hp.log_weights.data(),
                       f->hp.log_weights.data() + f->hp.log_weights.size());
        *out = f;
    });
}

mrlgp_status mrlgp_fit_mrl2(const double* t, const double* y, size_t n, double boundary,
                            double scale1, double scale2, double boundary_var, mrlgp_prior len1,
                            mrlgp_prior len2, mrlgp_prior noise_var, int n_samples, uint64_t seed,
                            mrlgp_fit** out) {
    return guarded([&] {
        mrlgp::TimeSeries train(std::vector<double>(t, t + n), std::vector<double>(y, y + n));
        const std::vector<mrlgp::PriorSpec> priors = {to_prior(len1), to_prior(len2),
                                                      to_prior(noise_var)};
        auto log_ev = [&train, boundary, scale1, scale2, boundary_var](std::span<const double> th) {
            const mrlgp::RegionModel model(
                {mrlgp::KernelSpec::squared_exponential(scale1, th[0]),
                 mrlgp::KernelSpec::squared_exponential(scale2, th[1])},
                {mrlgp::BoundaryLink::value(boundary, boundary_var)});
            return mrlgp::log_evidence(train, mrlgp::cov_fn(model), th[2]);
        };
        auto* f = new mrlgp_fit{};
        f->hp = mrlgp::mc_marginalize(log_ev, priors, {"L1", "L2", "sigma2"}, n_samples, seed);
        f->samples_rm.resize(static_cast<size_t>(f->hp.samples.size()));
        for (Eigen::Index i = 0; i < f->hp.samples.rows(); ++i)
            for (Eigen::Index j = 0; j < f->hp.samples.cols(); ++j)
                f->samples_rm[static_cast<size_t>(i * f->hp.samples.cols() + j)] =
                    f->hp.samples(i, j);
        f->logw.assign(f->hp.log_weights.data(),
                       f->hp.log_weights.data() + f->hp.log_weights.size());
        *out = f;
    });
}

size_t mrlgp_fit_n_samples(const mrlgp_fit* f) { return static_cast<size_t>(f->hp.samples.rows()); }
size_t mrlgp_fit_n_params(const mrlgp_fit* f) { return static_cast<size_t>(f->hp.samples.cols()); }

const char* mrlgp_fit_param_name(const mrlgp_fit* f, size_t dim) {
    return dim < f->hp.names.size() ? f->hp.names[dim].c_str() : "";
}

const double* mrlgp_fit_samples(const mrlgp_fit* f) { return f->samples_rm.data(); }
const double* mrlgp_fit_log_weights(const mrlgp_fit* f) { return f->logw.data(); }

mrlgp_status mrlgp_fit_quantile(const mrlgp_fit* f, size_t dim, double q, double* out) {
    return guarded([&] { *out = f->hp.quantile(dim, q); });
}

void mrlgp_fit_free(mrlgp_fit* f) { delete f; }

}  // extern "C"
