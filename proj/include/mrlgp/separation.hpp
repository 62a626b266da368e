#ifndef MRLGP_SEPARATION_HPP
#define MRLGP_SEPARATION_HPP

#include <cstdint>
#include <span>

#include "mrlgp/gp.hpp"
#include "mrlgp/hyper.hpp"
#include "mrlgp/kernels.hpp"
#include "mrlgp/region.hpp"

namespace mrlgp {

// Additive two-component model: a smooth signal plus a windowed artifact.
// The artifact prior is zero outside [t_start, t_end], zero-valued at both
// ends, and built from two equal squared-exponential halves joined mid-window
// with value continuity only (continuous, not differentiable, at the join).
// Residual variances r_sig / r_art are part of the signals, not noise.
struct SeparationModel {
    KernelSpec k_sig = KernelSpec::zero();
    double art_scale = 0.0;  // artifact output scale (both halves)
    double art_len = 1.0;    // artifact input scale (both halves)
    double t_start = 0.0;
    double t_end = 0.0;
    double mid_var = 0.0;    // boundary variance at the mid-window join
    double r_sig = 0.0;
    double r_art = 0.0;

    SeparationModel() = default;
    SeparationModel(KernelSpec k_sig, double art_scale, double art_len, double t_start,
                    double t_end, double mid_var, double r_sig, double r_art);

    RegionModel artifact_model() const;  // [zero | SE | SE | zero]
};

// Artifact prior covariance over the given locations.
GramMatrix artifact_prior(const SeparationModel& model, std::span<const double> x,
                          std::span<const double> y);

struct HiddenPosteriors {
    Eigen::VectorXd m_sig, var_sig;
    Eigen::VectorXd m_art, var_art;
};

// Posterior of the two hidden smooth components given train, with noise
// sigma2 = r_sig + r_art.
HiddenPosteriors hidden_posteriors(const SeparationModel& model, const TimeSeries& train,
                                   std::span<const double> xs);

// Split one observation between the components by precision fusion, with
// P*_sig = cov_sig + r_sig and P*_art = cov_art + r_art:
//   s_sig = [P*_sig (y - m_art) + P*_art m_sig] / (P*_sig + P*_art)
//   s_art = [P*_art (y - m_sig) + P*_sig m_art] / (P*_sig + P*_art)
//   var   = P*_sig P*_art / (P*_sig + P*_art)   (same for both components)
// so s_sig + s_art == y exactly.
struct Apportioned {
    double s_sig, s_art, var;
};
Apportioned apportion(double y, double m_sig, double cov_sig, double m_art, double cov_art,
                      double r_sig, double r_art);

struct SeparationResult {
    Eigen::VectorXd s_sig, s_art;      // per-point component estimates
    Eigen::VectorXd var;               // fused variance (shared by both)
    Eigen::VectorXd m_sig, m_art;      // hidden means (mixture)
    double t_start_hat = 0.0, t_end_hat = 0.0;  // posterior-weighted medians
    HyperPosterior hyper;
};

// The eight marginalized hyperparameters, in draw order.  Window ends are
// drawn from their priors and swapped into order.
struct SeparationPriors {
    PriorSpec sig_scale;   // signal output scale
    PriorSpec sig_len;     // signal input scale
    PriorSpec art_scale;   // artifact output scale
    PriorSpec art_len;     // artifact input scale
    PriorSpec t_start;
    PriorSpec t_end;
    PriorSpec r_sig;
    PriorSpec r_art;

    static SeparationPriors defaults(double t_lo, double t_hi);
};

// Monte-Carlo marginalization of the eight hyperparameters with the
// sequential per-point predictive likelihood, then sequential apportionment.
// The artifact mid-window boundary variance is tied to the artifact scale.
SeparationResult separate(const TimeSeries& train, const SeparationPriors& priors, int n_samples,
                          std::uint64_t seed);

}  // namespace mrlgp

#endif
