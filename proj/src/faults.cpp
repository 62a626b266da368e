#include "mrlgp/faults.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

bool in_window(double t, double t0, double t1) { return t > t0 && t <= t1; }
}  // namespace

FaultSpec FaultSpec::bias(double t0, double t1, double mu) {
    if (!(t0 < t1)) throw ParameterError("fault: t0 must be < t1");
    if (mu < 0.0) throw ParameterError("fault: magnitude must be >= 0");
    FaultSpec s;
    s.kind = FaultKind::bias;
    s.t0 = t0;
    s.t1 = t1;
    s.mu = mu;
    return s;
}

FaultSpec FaultSpec::drift(double t0, double t1, double mu, double len) {
    if (!(t0 < t1)) throw ParameterError("fault: t0 must be < t1");
    if (mu < 0.0) throw ParameterError("fault: magnitude must be >= 0");
    if (!(len > 0.0)) throw ParameterError("fault: drift length scale must be > 0");
    FaultSpec s;
    s.kind = FaultKind::drift;
    s.t0 = t0;
    s.t1 = t1;
    s.mu = mu;
    s.len = len;
    return s;
}

FaultSpec FaultSpec::drift_then_bias(double t0, double t_m, double t1, double mu, double len,
                                     double k_b_link) {
    if (!(t0 < t_m && t_m < t1))
        throw ParameterError("fault: drift_then_bias requires t0 < t_m < t1");
    if (mu < 0.0 || k_b_link < 0.0) throw ParameterError("fault: variances must be >= 0");
    if (!(len > 0.0)) throw ParameterError("fault: drift length scale must be > 0");
    FaultSpec s;
    s.kind = FaultKind::drift_then_bias;
    s.t0 = t0;
    s.t1 = t1;
    s.t_m = t_m;
    s.mu = mu;
    s.len = len;
    s.k_b_link = k_b_link;
    return s;
}

RegionModel fault_region_model(const FaultSpec& spec) {
    switch (spec.kind) {
        case FaultKind::bias:
            return RegionModel({KernelSpec::zero(), KernelSpec::constant(spec.mu), KernelSpec::zero()},
                               {BoundaryLink::independent(spec.t0), BoundaryLink::independent(spec.t1)});
        case FaultKind::drift:
            return RegionModel(
                {KernelSpec::zero(), KernelSpec::squared_exponential(spec.mu, spec.len),
                 KernelSpec::zero()},
                {BoundaryLink::value(spec.t0, 0.0), BoundaryLink::independent(spec.t1)});
        case FaultKind::drift_then_bias:
            return RegionModel(
                {KernelSpec::zero(), KernelSpec::squared_exponential(spec.mu, spec.len),
                 KernelSpec::constant(spec.k_b_link), KernelSpec::zero()},
                {BoundaryLink::value(spec.t0, 0.0), BoundaryLink::value(spec.t_m, spec.k_b_link),
                 BoundaryLink::independent(spec.t1)});
    }
    throw ParameterError("fault_region_model: unknown kind");
}

double fault_eval(const FaultSpec& spec, double a, double b) {
    switch (spec.kind) {
        case FaultKind::bias:
            return (in_window(a, spec.t0, spec.t1) && in_window(b, spec.t0, spec.t1)) ? spec.mu
                                                                                      : 0.0;
        case FaultKind::drift: {
            if (!in_window(a, spec.t0, spec.t1) || !in_window(b, spec.t0, spec.t1)) return 0.0;
            // SE drift conditioned on zero value at onset
            const double l2 = spec.len * spec.len;
            const double d = a - b;
            const double da = a - spec.t0;
            const double db = b - spec.t0;
            return spec.mu *
                   (std::exp(-d * d / l2) - std::exp(-da * da / l2) * std::exp(-db * db / l2));
        }
        case FaultKind::drift_then_bias:
            return fault_region_model(spec).eval(a, b);
    }
    return 0.0;
}

CovFn cov_fn(const FaultSpec& spec) {
    if (spec.kind == FaultKind::drift_then_bias) {
        auto model = std::make_shared<RegionModel>(fault_region_model(spec));
        return [model](double a, double b) { return model->eval(a, b); };
    }
    return [spec](double a, double b) { return fault_eval(spec, a, b); };
}

namespace {

GramMatrix fault_gram(const FaultSpec& spec, std::span<const double> x,
                      std::span<const double> y) {
    const CovFn k = cov_fn(spec);
    GramMatrix g;
    g.values = build_gram(k, x, y);
    g.row_points.assign(x.begin(), x.end());
    g.col_points.assign(y.begin(), y.end());
    return g;
}

}  // namespace

GramMatrix bias_cov(const FaultSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (spec.kind != FaultKind::bias) throw ParameterError("bias_cov: wrong fault kind");
    return fault_gram(spec, x, y);
}

GramMatrix drift_cov(const FaultSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (spec.kind != FaultKind::drift) throw ParameterError("drift_cov: wrong fault kind");
    return fault_gram(spec, x, y);
}

GramMatrix drift_then_bias_cov(const FaultSpec& spec, std::span<const double> x,
                               std::span<const double> y) {
    if (spec.kind != FaultKind::drift_then_bias)
        throw ParameterError("drift_then_bias_cov: wrong fault kind");
    return fault_gram(spec, x, y);
}

FaultPriors FaultPriors::defaults(double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw ParameterError("FaultPriors: empty data span");
    const double span = t_hi - t_lo;
    FaultPriors p;
    p.onset = PriorSpec::uniform(t_lo, t_hi);
    p.end = PriorSpec::uniform(t_lo, t_hi);
    p.magnitude = PriorSpec::log_uniform(1e-3, 1e2);
    p.length = span > 1.0 ? PriorSpec::log_uniform(1.0, span) : PriorSpec::fixed(span);
    p.link_var = PriorSpec::log_uniform(1e-3, 1e2);
    p.noise_var = PriorSpec::fixed(0.001);
    return p;
}

namespace {

// theta layout shared by remove_fault and the online filter
struct FaultTheta {
    double t0, t1, t_m, mu, len, k_b, sigma2;
    bool valid = true;
};

std::vector<FaultTheta> draw_thetas(const FaultPriors& priors, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<FaultTheta> out(static_cast<std::size_t>(n));
    for (auto& th : out) {
        const double a = priors.onset.sample(rng);
        const double b = priors.end.sample(rng);
        th.t0 = std::min(a, b);
        th.t1 = std::max(a, b);
        const double u = rng.uniform();
        th.t_m = th.t0 + u * (th.t1 - th.t0);
        th.mu = priors.magnitude.sample(rng);
        th.len = priors.length.sample(rng);
        th.k_b = priors.link_var.sample(rng);
        th.sigma2 = priors.noise_var.sample(rng);
        th.valid = th.t0 < th.t1 && th.t_m > th.t0 && th.t_m < th.t1;
    }
    return out;
}

FaultSpec theta_spec(FaultKind kind, const FaultTheta& th) {
    switch (kind) {
        case FaultKind::bias: return FaultSpec::bias(th.t0, th.t1, th.mu);
        case FaultKind::drift: return FaultSpec::drift(th.t0, th.t1, th.mu, th.len);
        case FaultKind::drift_then_bias:
            return FaultSpec::drift_then_bias(th.t0, th.t_m, th.t1, th.mu, th.len, th.k_b);
    }
    throw ParameterError("unknown fault kind");
}

// Evidence-weighted mixture of dual-process posteriors over the drawn fault
// hyperparameters.  kf blocks are precomputed by the caller; fault blocks are
// produced per sample through fault_blocks (which lets the online filter feed
// cached slices).
FaultRemovalResult removal_core(
    const Eigen::VectorXd& y, std::size_t m, FaultKind kind,
    const std::vector<FaultTheta>& thetas, const Eigen::MatrixXd& kf_train,
    const Eigen::MatrixXd& kf_cross, const Eigen::VectorXd& kf_diag,
    const std::function<void(const FaultSpec&, Eigen::MatrixXd&, Eigen::MatrixXd&,
                             Eigen::VectorXd&)>& fault_blocks) {
    const Eigen::Index n = y.size();
    const int ns = static_cast<int>(thetas.size());
    const Eigen::Index mi = static_cast<Eigen::Index>(m);

    Eigen::VectorXd logw = Eigen::VectorXd::Constant(ns, kNegInf);
    Eigen::MatrixXd fmean(ns, mi), fvar(ns, mi), emean(ns, mi), evar(ns, mi);

    Eigen::MatrixXd ke_train, ke_cross;
    Eigen::VectorXd ke_diag;
    for (int s = 0; s < ns; ++s) {
        const auto& th = thetas[static_cast<std::size_t>(s)];
        if (!th.valid) continue;
        const FaultSpec spec = theta_spec(kind, th);
        fault_blocks(spec, ke_train, ke_cross, ke_diag);

        if (n == 0) {
            logw(s) = 0.0;  // empty product: prior only
            fmean.row(s).setZero();
            emean.row(s).setZero();
            fvar.row(s) = kf_diag;
            evar.row(s) = ke_diag;
            continue;
        }

        Eigen::MatrixXd ks = kf_train + ke_train;
        ks.diagonal().array() += th.sigma2;
        std::unique_ptr<SpdFactor> f;
        try {
            f = std::make_unique<SpdFactor>(std::move(ks));
        } catch (const NumericError&) {
            continue;
        }
        const Eigen::VectorXd alpha = f->solve(y);
        logw(s) = -0.5 * y.dot(alpha) - 0.5 * f->log_det() -
                  0.5 * static_cast<double>(n) * kLog2Pi;

        fmean.row(s) = (kf_cross * alpha).transpose();
        emean.row(s) = (ke_cross * alpha).transpose();
        const Eigen::MatrixXd vf = f->solve(kf_cross.transpose());
        const Eigen::MatrixXd ve = f->solve(ke_cross.transpose());
        for (Eigen::Index j = 0; j < mi; ++j) {
            fvar(s, j) = std::max(kf_diag(j) - kf_cross.row(j).dot(vf.col(j)), 0.0);
            evar(s, j) = std::max(ke_diag(j) - ke_cross.row(j).dot(ve.col(j)), 0.0);
        }
    }

    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw InferenceError("remove_fault: all sample weights are -inf");
    logw.array() -= lse;

    FaultRemovalResult r;
    r.clean.mean = Eigen::VectorXd::Zero(mi);
    r.clean.variance = Eigen::VectorXd::Zero(mi);
    r.fault.mean = Eigen::VectorXd::Zero(mi);
    r.fault.variance = Eigen::VectorXd::Zero(mi);
    Eigen::VectorXd f2 = Eigen::VectorXd::Zero(mi), e2 = Eigen::VectorXd::Zero(mi);
    for (int s = 0; s < ns; ++s) {
        const double w = std::exp(logw(s));
        if (w == 0.0) continue;
        r.clean.mean += w * fmean.row(s).transpose();
        r.fault.mean += w * emean.row(s).transpose();
        f2 += w * (fvar.row(s) + fmean.row(s).cwiseProduct(fmean.row(s))).transpose();
        e2 += w * (evar.row(s) + emean.row(s).cwiseProduct(emean.row(s))).transpose();
    }
    r.clean.variance = (f2 - r.clean.mean.cwiseProduct(r.clean.mean)).cwiseMax(0.0);
    r.fault.variance = (e2 - r.fault.mean.cwiseProduct(r.fault.mean)).cwiseMax(0.0);
    r.combined_mean = r.clean.mean + r.fault.mean;

    r.hyper.names = {"t0", "t1", "t_m", "mu", "L", "k_b", "sigma2"};
    r.hyper.samples.resize(ns, 7);
    for (int s = 0; s < ns; ++s) {
        const auto& th = thetas[static_cast<std::size_t>(s)];
        r.hyper.samples.row(s) << th.t0, th.t1, th.t_m, th.mu, th.len, th.k_b, th.sigma2;
    }
    r.hyper.log_weights = logw;
    return r;
}

}  // namespace

FaultRemovalResult remove_fault(const TimeSeries& train, const KernelSpec& real_k, FaultKind kind,
                                const FaultPriors& priors, int n_samples, std::uint64_t seed,
                                std::span<const double> xs) {
    if (n_samples < 1) throw ParameterError("remove_fault: n_samples must be >= 1");
    const auto thetas = draw_thetas(priors, n_samples, seed);

    const CovFn kf = cov_fn(real_k);
    const Eigen::MatrixXd kf_train = build_gram(kf, train.t);
    const Eigen::MatrixXd kf_cross = build_gram(kf, xs, train.t);
    Eigen::VectorXd kf_diag(static_cast<Eigen::Index>(xs.size()));
    for (std::size_t j = 0; j < xs.size(); ++j)
        kf_diag(static_cast<Eigen::Index>(j)) = kf(xs[j], xs[j]);

    Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) y(static_cast<Eigen::Index>(i)) = train.y[i];
    std::vector<double> xs_copy(xs.begin(), xs.end());

    auto fault_blocks = [&](const FaultSpec& spec, Eigen::MatrixXd& ke_train,
                            Eigen::MatrixXd& ke_cross, Eigen::VectorXd& ke_diag) {
        const CovFn ke = cov_fn(spec);
        ke_train = build_gram(ke, train.t);
        ke_cross = build_gram(ke, xs_copy, train.t);
        ke_diag.resize(static_cast<Eigen::Index>(xs_copy.size()));
        for (std::size_t j = 0; j < xs_copy.size(); ++j)
            ke_diag(static_cast<Eigen::Index>(j)) = ke(xs_copy[j], xs_copy[j]);
    };

    return removal_core(y, xs.size(), kind, thetas, kf_train, kf_cross, kf_diag, fault_blocks);
}

FaultRemovalResult remove_fault(const TimeSeries& train, const KernelSpec& real_k, FaultKind kind,
                                const FaultPriors& priors, int n_samples, std::uint64_t seed) {
    return remove_fault(train, real_k, kind, priors, n_samples, seed, train.t);
}

std::vector<PosteriorEstimate> online_filter(const TimeSeries& train,
                                             const OnlineFilterConfig& config) {
    std::vector<PosteriorEstimate> out;
    out.reserve(train.size());

    if (!config.reuse_grams) {
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double xq = train.t[i];
            const auto r = remove_fault(train.prefix(i), config.real_k, config.kind, config.priors,
                                        config.n_samples, config.seed, std::span(&xq, 1));
            out.push_back(r.clean);
        }
        return out;
    }

    // cached path: evaluate every kernel entry once over the full series and
    // hand prefix slices to the same core
    const auto thetas = draw_thetas(config.priors, config.n_samples, config.seed);
    const CovFn kf = cov_fn(config.real_k);
    const Eigen::MatrixXd kf_full = build_gram(kf, train.t);

    std::vector<Eigen::MatrixXd> ke_full(thetas.size());
    for (std::size_t s = 0; s < thetas.size(); ++s) {
        if (!thetas[s].valid) continue;
        ke_full[s] = build_gram(cov_fn(theta_spec(config.kind, thetas[s])), train.t);
    }

    const Eigen::VectorXd y_all =
        Eigen::Map<const Eigen::VectorXd>(train.y.data(), static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        const Eigen::MatrixXd kf_train = kf_full.topLeftCorner(ii, ii);
        const Eigen::MatrixXd kf_cross = kf_full.row(ii).head(ii);
        Eigen::VectorXd kf_diag(1);
        kf_diag(0) = kf_full(ii, ii);

        std::size_t cursor = 0;
        auto fault_blocks = [&](const FaultSpec&, Eigen::MatrixXd& ke_train,
                                Eigen::MatrixXd& ke_cross, Eigen::VectorXd& ke_diag) {
            // thetas are visited in order by removal_core; track the index
            while (!thetas[cursor].valid) ++cursor;
            const Eigen::MatrixXd& full = ke_full[cursor];
            ke_train = full.topLeftCorner(ii, ii);
            ke_cross = full.row(ii).head(ii);
            ke_diag.resize(1);
            ke_diag(0) = full(ii, ii);
            ++cursor;
        };

        const Eigen::VectorXd y = y_all.head(ii);
        out.push_back(removal_core(y, 1, config.kind, thetas, kf_train, kf_cross, kf_diag,
                                   fault_blocks)
                          .clean);
    }
    return out;
}

}  // namespace mrlgp
