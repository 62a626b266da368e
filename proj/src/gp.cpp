#include "mrlgp/gp.hpp"

#include <cmath>
#include <memory>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
}

TimeSeries::TimeSeries(std::vector<double> t_, std::vector<double> y_)
    : t(std::move(t_)), y(std::move(y_)) {
    if (t.size() != y.size()) throw ParameterError("TimeSeries: t and y lengths differ");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(y[i]))
            throw ParameterError("TimeSeries: values must be finite");
        if (i > 0 && !(t[i] > t[i - 1]))
            throw ParameterError("TimeSeries: locations must be strictly increasing");
    }
}

TimeSeries TimeSeries::prefix(std::size_t n) const {
    TimeSeries p;
    n = std::min(n, t.size());
    p.t.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n));
    p.y.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
    return p;
}

CovFn cov_fn(const KernelSpec& spec) {
    return [spec](double a, double b) { return eval(spec, a, b); };
}

CovFn cov_fn(const RegionModel& model) {
    auto shared = std::make_shared<RegionModel>(model);
    return [shared](double a, double b) { return shared->eval(a, b); };
}

Eigen::MatrixXd build_gram(const CovFn& k, std::span<const double> x, std::span<const double> y) {
    Eigen::MatrixXd g(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(x[i], y[j]);
    return g;
}

Eigen::MatrixXd build_gram(const CovFn& k, std::span<const double> x) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = k(x[i], x[j]);
            g(i, j) = v;
            g(j, i) = v;
        }
    }
    return g;
}

namespace {

Eigen::VectorXd clamp_variance(Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::max(v(i), 0.0);
    return v;
}

PosteriorEstimate prior_estimate(const CovFn& k, std::span<const double> xs, bool full_cov) {
    PosteriorEstimate e;
    e.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xs.size()));
    Eigen::MatrixXd kss = build_gram(k, xs);
    e.variance = clamp_variance(kss.diagonal());
    if (full_cov) e.cov = std::move(kss);
    return e;
}

}  // namespace

PosteriorEstimate posterior(const TimeSeries& train, std::span<const double> xs, const CovFn& k,
                            double sigma2, bool full_cov) {
    if (sigma2 < 0.0) throw ParameterError("posterior: sigma2 must be >= 0");
    if (train.size() == 0) return prior_estimate(k, xs, full_cov);

    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    Eigen::MatrixXd kxx = build_gram(k, train.t);
    kxx.diagonal().array() += sigma2;
    const SpdFactor f(std::move(kxx));

    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(train.y.data(), n);
    const Eigen::VectorXd alpha = f.solve(y);
    const Eigen::MatrixXd ksx = build_gram(k, xs, train.t);

    PosteriorEstimate e;
    e.mean = ksx * alpha;
    const Eigen::MatrixXd v = f.solve(ksx.transpose());
    if (full_cov) {
        Eigen::MatrixXd cov = build_gram(k, xs) - ksx * v;
        e.variance = clamp_variance(cov.diagonal());
        e.cov = std::move(cov);
    } else {
        Eigen::VectorXd var(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const Eigen::Index ii = static_cast<Eigen::Index>(i);
            var(ii) = k(xs[i], xs[i]) - ksx.row(ii).dot(v.col(ii));
        }
        e.variance = clamp_variance(std::move(var));
    }
    return e;
}

std::pair<PosteriorEstimate, PosteriorEstimate> dual_posterior(const TimeSeries& train,
                                                               std::span<const double> xs,
                                                               const CovFn& k_f, const CovFn& k_e,
                                                               double sigma2, bool full_cov) {
    if (sigma2 < 0.0) throw ParameterError("dual_posterior: sigma2 must be >= 0");
    if (train.size() == 0) return {prior_estimate(k_f, xs, full_cov), prior_estimate(k_e, xs, full_cov)};

    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    const Eigen::MatrixXd kf = build_gram(k_f, train.t);
    const Eigen::MatrixXd ke = build_gram(k_e, train.t);
    Eigen::MatrixXd ks = kf + ke;
    ks.diagonal().array() += sigma2;
    const SpdFactor f(std::move(ks));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(train.y.data(), n);
    const Eigen::VectorXd alpha = f.solve(y);

    auto one = [&](const CovFn& k) {
        const Eigen::MatrixXd ksx = build_gram(k, xs, train.t);
        PosteriorEstimate e;
        e.mean = ksx * alpha;
        const Eigen::MatrixXd v = f.solve(ksx.transpose());
        if (full_cov) {
            Eigen::MatrixXd cov = build_gram(k, xs) - ksx * v;
            e.variance = clamp_variance(cov.diagonal());
            e.cov = std::move(cov);
        } else {
            Eigen::VectorXd var(static_cast<Eigen::Index>(xs.size()));
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const Eigen::Index ii = static_cast<Eigen::Index>(i);
                var(ii) = k(xs[i], xs[i]) - ksx.row(ii).dot(v.col(ii));
            }
            e.variance = clamp_variance(std::move(var));
        }
        return e;
    };
    return {one(k_f), one(k_e)};
}

double log_evidence(const TimeSeries& train, const CovFn& k, double sigma2) {
    if (sigma2 < 0.0) throw ParameterError("log_evidence: sigma2 must be >= 0");
    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    if (n == 0) return 0.0;
    Eigen::MatrixXd kxx = build_gram(k, train.t);
    kxx.diagonal().array() += sigma2;
    const SpdFactor f(std::move(kxx));
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(train.y.data(), n);
    return -0.5 * y.dot(f.solve(y)) - 0.5 * f.log_det() - 0.5 * static_cast<double>(n) * kLog2Pi;
}

Eigen::VectorXd sample_prior(const CovFn& k, std::span<const double> x, Rng& rng) {
    return sample_gaussian(build_gram(k, x), rng);
}

Eigen::VectorXd sample_prior(const CovFn& k, std::span<const double> x, std::uint64_t seed) {
    Rng rng(seed);
    return sample_prior(k, x, rng);
}

}  // namespace mrlgp
