#ifndef MRLGP_HYPER_HPP
#define MRLGP_HYPER_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mrlgp/gp.hpp"
#include "mrlgp/rng.hpp"

namespace mrlgp {

// Per-parameter prior: uniform(lo,hi), log_uniform(lo,hi) or fixed(v).
// sample() always consumes exactly one uniform draw (fixed priors consume and
// ignore it) so the random stream stays aligned across prior configurations.
struct PriorSpec {
    enum class Kind { uniform, log_uniform, fixed };

    Kind kind = Kind::fixed;
    double lo = 0.0;
    double hi = 0.0;

    static PriorSpec uniform(double lo, double hi);
    static PriorSpec log_uniform(double lo, double hi);
    static PriorSpec fixed(double v);

    double sample(Rng& rng) const;
    bool in_support(double x) const;
    double log_pdf(double x) const;  // -inf outside support; 0 for fixed at v
};

// Weighted sample set over hyperparameter vectors.  log_weights are
// normalized so that logsumexp(log_weights) == 0.
struct HyperPosterior {
    std::vector<std::string> names;
    Eigen::MatrixXd samples;      // n x d
    Eigen::VectorXd log_weights;  // length n

    Eigen::VectorXd weights() const;
    // weighted quantile of one parameter (q in [0,1])
    double quantile(std::size_t dim, double q) const;
};

// log p(Y|X,theta) + log p(theta); -inf outside the prior support.  Numerical
// failures inside the evidence callback count as -inf (flagged through
// *numeric_failure when given).
double log_unnormalized_posterior(std::span<const double> theta,
                                  const std::vector<PriorSpec>& priors,
                                  const std::function<double(std::span<const double>)>& log_ev,
                                  bool* numeric_failure = nullptr);

// Importance sampling with the prior as proposal: draw n vectors, weight each
// by its evidence, normalize in log space.  Deterministic given seed; throws
// InferenceError when every sample weight is -inf.
HyperPosterior mc_marginalize(const std::function<double(std::span<const double>)>& log_ev,
                              const std::vector<PriorSpec>& priors,
                              std::vector<std::string> names, int n, std::uint64_t seed);

// Moment-matched mixture of per-sample predictions:
//   mean = sum w_i m_i,  var = sum w_i (v_i + m_i^2) - mean^2
PosteriorEstimate marginal_predict(
    const HyperPosterior& hp,
    const std::function<PosteriorEstimate(std::span<const double>)>& predictor);

}  // namespace mrlgp

#endif
