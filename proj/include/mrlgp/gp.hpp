#ifndef MRLGP_GP_HPP
#define MRLGP_GP_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrlgp/kernels.hpp"
#include "mrlgp/region.hpp"
#include "mrlgp/rng.hpp"

namespace mrlgp {

// Observed series: strictly increasing sample locations with values.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> y;

    TimeSeries() = default;
    TimeSeries(std::vector<double> t_, std::vector<double> y_);

    std::size_t size() const { return t.size(); }
    TimeSeries prefix(std::size_t n) const;
};

// Per-query-point posterior mean and variance, optionally the full covariance.
struct PosteriorEstimate {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;  // clamped at 0
    std::optional<Eigen::MatrixXd> cov;
};

// Any covariance source: a KernelSpec, a RegionModel, a fault kernel, ...
using CovFn = std::function<double(double, double)>;

CovFn cov_fn(const KernelSpec& spec);
CovFn cov_fn(const RegionModel& model);

Eigen::MatrixXd build_gram(const CovFn& k, std::span<const double> x, std::span<const double> y);
Eigen::MatrixXd build_gram(const CovFn& k, std::span<const double> x);

// Zero-mean GP posterior at xs given train and iid noise sigma2:
//   mean = K(xs,X) [K(X,X)+sigma2 I]^{-1} Y
//   cov  = K(xs,xs) - K(xs,X) [K(X,X)+sigma2 I]^{-1} K(xs,X)^T
// Empty training data returns the prior.
PosteriorEstimate posterior(const TimeSeries& train, std::span<const double> xs, const CovFn& k,
                            double sigma2, bool full_cov = false);

// Dual-process posterior under K_s = K_f + K_e: both processes inferred from
// the same data, each predicted through its own cross-covariance.
std::pair<PosteriorEstimate, PosteriorEstimate> dual_posterior(const TimeSeries& train,
                                                               std::span<const double> xs,
                                                               const CovFn& k_f, const CovFn& k_e,
                                                               double sigma2,
                                                               bool full_cov = false);

// log N(Y; 0, K(X,X) + sigma2 I)
double log_evidence(const TimeSeries& train, const CovFn& k, double sigma2);

// One draw from N(0, K(X,X)); locations with exactly-zero prior variance stay
// exactly zero.
Eigen::VectorXd sample_prior(const CovFn& k, std::span<const double> x, Rng& rng);
Eigen::VectorXd sample_prior(const CovFn& k, std::span<const double> x, std::uint64_t seed);

}  // namespace mrlgp

#endif
