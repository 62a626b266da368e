#ifndef MRLGP_SIMULATE_HPP
#define MRLGP_SIMULATE_HPP

#include <cstdint>
#include <string>

#include "mrlgp/faults.hpp"
#include "mrlgp/gp.hpp"

namespace mrlgp {

// One synthetic dataset: observed = truth + fault + iid noise, all over the
// same grid, reproducible from the seed.
struct Scenario {
    TimeSeries truth;     // real process f
    TimeSeries fault;     // fault/artifact process e
    TimeSeries observed;  // y = f + e + eps
    std::string config;   // resolved generator settings, key=value lines
    std::uint64_t seed = 0;
};

// Target-tracking scenario: SE real process plus one fault episode.
struct TrackingConfig {
    double t_start = 0.0;
    double t_end = 30.0;   // exclusive
    double dt = 1.0;
    double real_scale = 1.0;
    double real_len = 10.0;
    double fault_t0 = 10.0;
    double fault_t1 = 20.0;
    double fault_mu = 1.0;
    double drift_len = 5.0;
    double fault_tm = 15.0;   // drift_then_bias transition
    double k_b_link = 0.5;
    double noise_var = 0.001;
};

Scenario gen_tracking(FaultKind kind, std::uint64_t seed,
                      const TrackingConfig& cfg = TrackingConfig{});

// Length-scale change-point demo: Gibbs kernel with l = 35 up to x = 130 and
// l = 15 beyond, over [0, 260]; no fault component.
Scenario gen_gibbs_demo(std::uint64_t seed);

// Reference table used by gen_gibbs_demo (also handy for tests).
GibbsLengthTable gibbs_demo_table();

enum class WedgeSnr { low, high };

// Piecewise-linear wedge over [0, 200], apex at x = 100, with gentle rise
// (+0.02) and steep fall (-0.08); noise std 0.2 (low SNR) or 0.02 (high SNR).
Scenario gen_wedge(WedgeSnr snr, std::uint64_t seed);

struct WedgeConfig {
    double apex = 100.0;
    double t_end = 200.0;
    double slope_left = 0.02;
    double slope_right = -0.08;
    double noise_low = 0.2;
    double noise_high = 0.02;
};

}  // namespace mrlgp

#endif
