#include "mrlgp/separation.hpp"

#include <cmath>
#include <limits>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}  // namespace

SeparationModel::SeparationModel(KernelSpec k_sig_, double art_scale_, double art_len_,
                                 double t_start_, double t_end_, double mid_var_, double r_sig_,
                                 double r_art_)
    : k_sig(std::move(k_sig_)),
      art_scale(art_scale_),
      art_len(art_len_),
      t_start(t_start_),
      t_end(t_end_),
      mid_var(mid_var_),
      r_sig(r_sig_),
      r_art(r_art_) {
    if (!(t_start < t_end)) throw ParameterError("SeparationModel: t_start must be < t_end");
    if (art_scale < 0.0 || mid_var < 0.0 || r_sig < 0.0 || r_art < 0.0)
        throw ParameterError("SeparationModel: variances must be >= 0");
    if (!(art_len > 0.0)) throw ParameterError("SeparationModel: artifact length must be > 0");
    const double mid = 0.5 * (t_start + t_end);
    if (!(t_start < mid && mid < t_end))
        throw ParameterError("SeparationModel: window too narrow");
}

RegionModel SeparationModel::artifact_model() const {
    const KernelSpec half = KernelSpec::squared_exponential(art_scale, art_len);
    const double mid = 0.5 * (t_start + t_end);
    return RegionModel({KernelSpec::zero(), half, half, KernelSpec::zero()},
                       {BoundaryLink::value(t_start, 0.0), BoundaryLink::value(mid, mid_var),
                        BoundaryLink::value(t_end, 0.0)});
}

GramMatrix artifact_prior(const SeparationModel& model, std::span<const double> x,
                          std::span<const double> y) {
    return model.artifact_model().gram(x, y);
}

HiddenPosteriors hidden_posteriors(const SeparationModel& model, const TimeSeries& train,
                                   std::span<const double> xs) {
    const auto [sig, art] = dual_posterior(train, xs, cov_fn(model.k_sig),
                                           cov_fn(model.artifact_model()),
                                           model.r_sig + model.r_art);
    return {sig.mean, sig.variance, art.mean, art.variance};
}

Apportioned apportion(double y, double m_sig, double cov_sig, double m_art, double cov_art,
                      double r_sig, double r_art) {
    const double p_sig = std::max(cov_sig, 0.0) + r_sig;
    const double p_art = std::max(cov_art, 0.0) + r_art;
    const double tot = p_sig + p_art;
    if (!(tot > 0.0)) throw ParameterError("apportion: both component variances are zero");
    Apportioned a;
    a.s_sig = (p_sig * (y - m_art) + p_art * m_sig) / tot;
    a.s_art = (p_art * (y - m_sig) + p_sig * m_art) / tot;
    a.var = p_sig * p_art / tot;
    return a;
}

SeparationPriors SeparationPriors::defaults(double t_lo, double t_hi) {
    if (!(t_lo < t_hi)) throw ParameterError("SeparationPriors: empty data span");
    const double span = t_hi - t_lo;
    SeparationPriors p;
    p.sig_scale = PriorSpec::log_uniform(0.1, 10.0);
    p.sig_len = PriorSpec::log_uniform(std::max(span / 16.0, 1e-3), std::max(span / 2.0, 1e-2));
    p.art_scale = PriorSpec::log_uniform(0.1, 25.0);
    p.art_len = PriorSpec::log_uniform(std::max(span / 80.0, 1e-3), std::max(span / 4.0, 1e-2));
    p.t_start = PriorSpec::uniform(t_lo, t_hi);
    p.t_end = PriorSpec::uniform(t_lo, t_hi);
    p.r_sig = PriorSpec::log_uniform(1e-3, 0.1);
    p.r_art = PriorSpec::log_uniform(1e-4, 0.1);
    return p;
}

namespace {

struct SeqOut {
    double loglik = kNegInf;
    Eigen::VectorXd s_sig, s_art, var_step, m_sig, m_art;
};

// Sequential pass: at each step predict both hidden components from earlier
// observations only, accumulate the per-point predictive likelihood, and
// apportion the current observation.  The Cholesky factor of
// K_sig + K_art + (r_sig + r_art) I grows one row per step.
SeqOut run_sequential(const Eigen::VectorXd& y, const Eigen::MatrixXd& k_sig,
                      const Eigen::MatrixXd& k_art, double r_sig, double r_art) {
    const Eigen::Index n = y.size();
    const double s2 = r_sig + r_art;
    const Eigen::MatrixXd ks = k_sig + k_art;

    SeqOut out;
    out.s_sig.resize(n);
    out.s_art.resize(n);
    out.var_step.resize(n);
    out.m_sig.resize(n);
    out.m_art.resize(n);

    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd z(n);  // solves L z = y(prefix)
    double ll = 0.0;

    for (Eigen::Index i = 0; i < n; ++i) {
        double m_s = 0.0, m_a = 0.0;
        double c_s = k_sig(i, i), c_a = k_art(i, i);
        if (i > 0) {
            const auto l = chol.topLeftCorner(i, i).triangularView<Eigen::Lower>();
            const Eigen::VectorXd w_s = l.solve(k_sig.col(i).head(i));
            const Eigen::VectorXd w_a = l.solve(k_art.col(i).head(i));
            m_s = w_s.dot(z.head(i));
            m_a = w_a.dot(z.head(i));
            c_s = k_sig(i, i) - w_s.squaredNorm();
            c_a = k_art(i, i) - w_a.squaredNorm();
        }
        const double p_s = std::max(c_s, 0.0) + r_sig;
        const double p_a = std::max(c_a, 0.0) + r_art;
        const double tot = p_s + p_a;
        if (!(tot > 0.0)) throw NumericError("separation: zero predictive variance");
        const double resid = y(i) - m_s - m_a;
        ll += -0.5 * std::log(tot) - 0.5 * kLog2Pi - 0.5 * resid * resid / tot;

        const Apportioned a = apportion(y(i), m_s, c_s, m_a, c_a, r_sig, r_art);
        out.s_sig(i) = a.s_sig;
        out.s_art(i) = a.s_art;
        out.var_step(i) = a.var;
        out.m_sig(i) = m_s;
        out.m_art(i) = m_a;

        // append row i to the growing factor
        if (i == 0) {
            const double d2 = ks(0, 0) + s2;
            if (!(d2 > 0.0)) throw NumericError("separation: singular covariance");
            chol(0, 0) = std::sqrt(d2);
        } else {
            const auto l = chol.topLeftCorner(i, i).triangularView<Eigen::Lower>();
            const Eigen::VectorXd li = l.solve(ks.col(i).head(i));
            const double d2 = ks(i, i) + s2 - li.squaredNorm();
            if (!(d2 > 0.0)) throw NumericError("separation: covariance not positive definite");
            chol.row(i).head(i) = li.transpose();
            chol(i, i) = std::sqrt(d2);
        }
        z(i) = (y(i) - chol.row(i).head(i).dot(z.head(i))) / chol(i, i);
    }
    out.loglik = ll;
    return out;
}

}  // namespace

SeparationResult separate(const TimeSeries& train, const SeparationPriors& priors, int n_samples,
                          std::uint64_t seed) {
    if (train.size() == 0) throw ParameterError("separate: empty training series");
    if (n_samples < 1) throw ParameterError("separate: n_samples must be >= 1");
    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = train.y[static_cast<std::size_t>(i)];

    struct Draw {
        double ms, ls, ma, la, ts, te, rs, ra;
        bool valid;
    };
    Rng rng(seed);
    std::vector<Draw> draws(static_cast<std::size_t>(n_samples));
    for (auto& d : draws) {
        d.ms = priors.sig_scale.sample(rng);
        d.ls = priors.sig_len.sample(rng);
        d.ma = priors.art_scale.sample(rng);
        d.la = priors.art_len.sample(rng);
        const double a = priors.t_start.sample(rng);
        const double b = priors.t_end.sample(rng);
        d.ts = std::min(a, b);
        d.te = std::max(a, b);
        d.rs = priors.r_sig.sample(rng);
        d.ra = priors.r_art.sample(rng);
        const double mid = 0.5 * (d.ts + d.te);
        d.valid = d.ts < mid && mid < d.te;
    }

    Eigen::VectorXd logw = Eigen::VectorXd::Constant(n_samples, kNegInf);
    std::vector<SeqOut> outs(static_cast<std::size_t>(n_samples));
    for (int s = 0; s < n_samples; ++s) {
        const auto& d = draws[static_cast<std::size_t>(s)];
        if (!d.valid) continue;
        try {
            const SeparationModel model(KernelSpec::squared_exponential(d.ms, d.ls), d.ma, d.la,
                                        d.ts, d.te, d.ma, d.rs, d.ra);
            const Eigen::MatrixXd k_sig = build_gram(cov_fn(model.k_sig), train.t);
            const Eigen::MatrixXd k_art = model.artifact_model().gram(train.t).values;
            auto& o = outs[static_cast<std::size_t>(s)];
            o = run_sequential(y, k_sig, k_art, d.rs, d.ra);
            logw(s) = o.loglik;
        } catch (const NumericError&) {
            logw(s) = kNegInf;
        }
    }

    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw InferenceError("separate: all sample weights are -inf");
    logw.array() -= lse;

    SeparationResult r;
    r.s_sig = Eigen::VectorXd::Zero(n);
    r.s_art = Eigen::VectorXd::Zero(n);
    r.m_sig = Eigen::VectorXd::Zero(n);
    r.m_art = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd a2 = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n_samples; ++s) {
        const double w = std::exp(logw(s));
        if (w == 0.0) continue;
        const auto& o = outs[static_cast<std::size_t>(s)];
        r.s_sig += w * o.s_sig;
        r.s_art += w * o.s_art;
        r.m_sig += w * o.m_sig;
        r.m_art += w * o.m_art;
        a2 += w * (o.var_step + o.s_art.cwiseProduct(o.s_art));
    }
    r.var = (a2 - r.s_art.cwiseProduct(r.s_art)).cwiseMax(0.0);

    r.hyper.names = {"sig_scale", "sig_len", "art_scale", "art_len",
                     "t_start",   "t_end",   "r_sig",     "r_art"};
    r.hyper.samples.resize(n_samples, 8);
    for (int s = 0; s < n_samples; ++s) {
        const auto& d = draws[static_cast<std::size_t>(s)];
        r.hyper.samples.row(s) << d.ms, d.ls, d.ma, d.la, d.ts, d.te, d.rs, d.ra;
    }
    r.hyper.log_weights = logw;
    r.t_start_hat = r.hyper.quantile(4, 0.5);
    r.t_end_hat = r.hyper.quantile(5, 0.5);
    return r;
}

}  // namespace mrlgp
