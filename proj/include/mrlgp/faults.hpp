#ifndef MRLGP_FAULTS_HPP
#define MRLGP_FAULTS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mrlgp/gp.hpp"
#include "mrlgp/hyper.hpp"
#include "mrlgp/kernels.hpp"
#include "mrlgp/region.hpp"

namespace mrlgp {

enum class FaultKind { bias, drift, drift_then_bias };

// One fault episode.  The fault process is nonzero only on the half-open
// window (t0, t1].  Bias jumps to a fixed offset at onset; drift grows
// continuously from zero; drift_then_bias drifts until t_m and then holds a
// constant offset until t1, value-continuous at t_m with boundary variance
// k_b_link.  All kinds snap back to zero after t1.
struct FaultSpec {
    FaultKind kind = FaultKind::bias;
    double t0 = 0.0;
    double t1 = 0.0;
    double mu = 0.0;       // output scale
    double len = 1.0;      // drift input scale (drift kinds)
    double t_m = 0.0;      // drift -> bias transition (drift_then_bias)
    double k_b_link = 0.0; // boundary variance at t_m (drift_then_bias)

    static FaultSpec bias(double t0, double t1, double mu);
    static FaultSpec drift(double t0, double t1, double mu, double len);
    static FaultSpec drift_then_bias(double t0, double t_m, double t1, double mu, double len,
                                     double k_b_link);
};

// Pointwise fault covariance (closed forms for bias and drift, region chain
// for drift_then_bias).
double fault_eval(const FaultSpec& spec, double a, double b);
CovFn cov_fn(const FaultSpec& spec);

GramMatrix bias_cov(const FaultSpec& spec, std::span<const double> x, std::span<const double> y);
GramMatrix drift_cov(const FaultSpec& spec, std::span<const double> x, std::span<const double> y);
GramMatrix drift_then_bias_cov(const FaultSpec& spec, std::span<const double> x,
                               std::span<const double> y);

// Region-chain representation of a fault prior (zero regions outside the
// window, an independent splice at t1).  drift_then_bias_cov routes through
// this; for plain drift it provides the second, independent code path to the
// closed form.
RegionModel fault_region_model(const FaultSpec& spec);

// Priors over the fault hyperparameters.  Draw order per sample is fixed:
// onset, end (swapped into order), transition fraction, magnitude, length,
// link variance, noise variance -- with exactly one uniform consumed each.
struct FaultPriors {
    PriorSpec onset;      // t0
    PriorSpec end;        // t1
    PriorSpec magnitude;  // mu, log-uniform by default
    PriorSpec length;     // drift L
    PriorSpec link_var;   // k_b_link
    PriorSpec noise_var;  // sigma2

    static FaultPriors defaults(double t_lo, double t_hi);
};

struct FaultRemovalResult {
    PosteriorEstimate clean;       // real process f
    PosteriorEstimate fault;       // fault process e
    Eigen::VectorXd combined_mean; // posterior mean under K_s = K_f + K_e
    HyperPosterior hyper;
};

// Monte-Carlo fault removal: draws fault hyperparameters from the priors,
// weights by evidence under K_f + K_e + sigma2 I, and moment-matches the
// evidence-weighted mixture of dual-process posteriors at xs.
FaultRemovalResult remove_fault(const TimeSeries& train, const KernelSpec& real_k, FaultKind kind,
                                const FaultPriors& priors, int n_samples, std::uint64_t seed,
                                std::span<const double> xs);
FaultRemovalResult remove_fault(const TimeSeries& train, const KernelSpec& real_k, FaultKind kind,
                                const FaultPriors& priors, int n_samples, std::uint64_t seed);

struct OnlineFilterConfig {
    KernelSpec real_k = KernelSpec::zero();
    FaultKind kind = FaultKind::bias;
    FaultPriors priors;
    int n_samples = 200;
    std::uint64_t seed = 0;
    bool reuse_grams = true;  // cache kernel evaluations across prefix steps
};

// Filtering estimates of the real process: element i is the posterior at t_i
// given only observations with index < i (element 0 is the prior).  Equals
// remove_fault run on each prefix with the same seed, bit for bit, whether or
// not Gram caching is enabled.
std::vector<PosteriorEstimate> online_filter(const TimeSeries& train,
                                             const OnlineFilterConfig& config);

}  // namespace mrlgp

#endif
