#include "mrlgp/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

PriorSpec PriorSpec::uniform(double lo, double hi) {
    if (!(lo < hi)) throw ParameterError("uniform prior: lo must be < hi");
    return {Kind::uniform, lo, hi};
}

PriorSpec PriorSpec::log_uniform(double lo, double hi) {
    if (!(lo < hi)) throw ParameterError("log_uniform prior: lo must be < hi");
    if (!(lo > 0.0)) throw ParameterError("log_uniform prior: lo must be > 0");
    return {Kind::log_uniform, lo, hi};
}

PriorSpec PriorSpec::fixed(double v) { return {Kind::fixed, v, v}; }

double PriorSpec::sample(Rng& rng) const {
    const double u = rng.uniform();
    switch (kind) {
        case Kind::uniform: return lo + (hi - lo) * u;
        case Kind::log_uniform: return lo * std::pow(hi / lo, u);
        case Kind::fixed: return lo;
    }
    return lo;
}

bool PriorSpec::in_support(double x) const {
    switch (kind) {
        case Kind::uniform:
        case Kind::log_uniform: return x >= lo && x <= hi;
        case Kind::fixed: return x == lo;
    }
    return false;
}

double PriorSpec::log_pdf(double x) const {
    if (!in_support(x)) return kNegInf;
    switch (kind) {
        case Kind::uniform: return -std::log(hi - lo);
        case Kind::log_uniform: return -std::log(x) - std::log(std::log(hi / lo));
        case Kind::fixed: return 0.0;
    }
    return kNegInf;
}

Eigen::VectorXd HyperPosterior::weights() const {
    return log_weights.array().exp().matrix();
}

double HyperPosterior::quantile(std::size_t dim, double q) const {
    const Eigen::Index n = samples.rows();
    if (n == 0) throw ParameterError("HyperPosterior: empty sample set");
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return samples(a, static_cast<Eigen::Index>(dim)) < samples(b, static_cast<Eigen::Index>(dim));
    });
    double acc = 0.0;
    for (Eigen::Index i : order) {
        acc += std::exp(log_weights(i));
        if (acc >= q) return samples(i, static_cast<Eigen::Index>(dim));
    }
    return samples(order.back(), static_cast<Eigen::Index>(dim));
}

double log_unnormalized_posterior(std::span<const double> theta,
                                  const std::vector<PriorSpec>& priors,
                                  const std::function<double(std::span<const double>)>& log_ev,
                                  bool* numeric_failure) {
    if (theta.size() != priors.size())
        throw ParameterError("log_unnormalized_posterior: theta/prior size mismatch");
    if (numeric_failure) *numeric_failure = false;
    double lp = 0.0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
        const double d = priors[i].log_pdf(theta[i]);
        if (d == kNegInf) return kNegInf;
        lp += d;
    }
    try {
        return lp + log_ev(theta);
    } catch (const NumericError&) {
        if (numeric_failure) *numeric_failure = true;
        return kNegInf;
    }
}

HyperPosterior mc_marginalize(const std::function<double(std::span<const double>)>& log_ev,
                              const std::vector<PriorSpec>& priors,
                              std::vector<std::string> names, int n, std::uint64_t seed) {
    if (n < 1) throw ParameterError("mc_marginalize: n must be >= 1");
    const Eigen::Index d = static_cast<Eigen::Index>(priors.size());

    HyperPosterior hp;
    hp.names = std::move(names);
    hp.samples.resize(n, d);
    hp.log_weights.resize(n);

    Rng rng(seed);
    std::vector<double> theta(priors.size());
    for (int i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            theta[static_cast<std::size_t>(j)] = priors[static_cast<std::size_t>(j)].sample(rng);
            hp.samples(i, j) = theta[static_cast<std::size_t>(j)];
        }
        double lw;
        try {
            lw = log_ev(theta);
        } catch (const NumericError&) {
            lw = kNegInf;
        }
        hp.log_weights(i) = lw;
    }

    const double lse = log_sum_exp(hp.log_weights);
    if (!std::isfinite(lse))
        throw InferenceError("mc_marginalize: all sample weights are -inf");
    hp.log_weights.array() -= lse;
    return hp;
}

PosteriorEstimate marginal_predict(
    const HyperPosterior& hp,
    const std::function<PosteriorEstimate(std::span<const double>)>& predictor) {
    const Eigen::Index n = hp.samples.rows();
    if (n == 0) throw ParameterError("marginal_predict: empty sample set");

    PosteriorEstimate out;
    Eigen::VectorXd m2;  // sum w (v + m^2)
    std::vector<double> theta(static_cast<std::size_t>(hp.samples.cols()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const double w = std::exp(hp.log_weights(i));
        if (w == 0.0) continue;
        for (Eigen::Index j = 0; j < hp.samples.cols(); ++j)
            theta[static_cast<std::size_t>(j)] = hp.samples(i, j);
        const PosteriorEstimate p = predictor(theta);
        if (out.mean.size() == 0) {
            out.mean = Eigen::VectorXd::Zero(p.mean.size());
            m2 = Eigen::VectorXd::Zero(p.mean.size());
        }
        out.mean += w * p.mean;
        m2 += w * (p.variance + p.mean.cwiseProduct(p.mean));
    }
    if (out.mean.size() == 0) {
        // every weight underflowed to zero except none: fall back to the peak
        Eigen::Index best;
        hp.log_weights.maxCoeff(&best);
        for (Eigen::Index j = 0; j < hp.samples.cols(); ++j)
            theta[static_cast<std::size_t>(j)] = hp.samples(best, j);
        return predictor(theta);
    }
    out.variance = (m2 - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
    return out;
}

}  // namespace mrlgp
