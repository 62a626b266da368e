#include "mrlgp/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

namespace {

std::vector<double> grid(double t0, double t_end, double dt) {
    std::vector<double> t;
    for (double x = t0; x < t_end; x += dt) t.push_back(x);
    if (t.empty()) throw ParameterError("scenario grid is empty");
    return t;
}

std::string fmt(const char* key, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
    return buf;
}

}  // namespace

Scenario gen_tracking(FaultKind kind, std::uint64_t seed, const TrackingConfig& cfg) {
    const std::vector<double> t = grid(cfg.t_start, cfg.t_end, cfg.dt);
    const std::size_t n = t.size();
    Rng rng(seed);

    const KernelSpec real_k = KernelSpec::squared_exponential(cfg.real_scale, cfg.real_len);
    const Eigen::VectorXd f = sample_prior(cov_fn(real_k), t, rng);

    Eigen::VectorXd e;
    if (cfg.fault_mu == 0.0) {
        // degenerate episode: no fault at all
        e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    } else {
        FaultSpec spec = FaultSpec::bias(cfg.fault_t0, cfg.fault_t1, cfg.fault_mu);
        switch (kind) {
            case FaultKind::bias: break;
            case FaultKind::drift:
                spec = FaultSpec::drift(cfg.fault_t0, cfg.fault_t1, cfg.fault_mu, cfg.drift_len);
                break;
            case FaultKind::drift_then_bias:
                spec = FaultSpec::drift_then_bias(cfg.fault_t0, cfg.fault_tm, cfg.fault_t1,
                                                  cfg.fault_mu, cfg.drift_len, cfg.k_b_link);
                break;
        }
        e = sample_prior(cov_fn(spec), t, rng);
    }

    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    const double noise_sd = std::sqrt(cfg.noise_var);
    for (std::size_t i = 0; i < n; ++i)
        y(static_cast<Eigen::Index>(i)) =
            f(static_cast<Eigen::Index>(i)) + e(static_cast<Eigen::Index>(i)) + noise_sd * rng.normal();

    Scenario s;
    s.seed = seed;
    s.truth = TimeSeries(t, std::vector<double>(f.data(), f.data() + n));
    s.fault = TimeSeries(t, std::vector<double>(e.data(), e.data() + n));
    s.observed = TimeSeries(t, std::vector<double>(y.data(), y.data() + n));
    const char* kind_name = kind == FaultKind::bias ? "bias"
                            : kind == FaultKind::drift ? "drift"
                                                       : "drift_then_bias";
    s.config = std::string("scenario = ") + kind_name + "\n" + fmt("t_start", cfg.t_start) +
               fmt("t_end", cfg.t_end) + fmt("dt", cfg.dt) + fmt("real_scale", cfg.real_scale) +
               fmt("real_len", cfg.real_len) + fmt("fault_t0", cfg.fault_t0) +
               fmt("fault_t1", cfg.fault_t1) + fmt("fault_mu", cfg.fault_mu) +
               fmt("drift_len", cfg.drift_len) + fmt("fault_tm", cfg.fault_tm) +
               fmt("k_b_link", cfg.k_b_link) + fmt("noise_var", cfg.noise_var);
    return s;
}

GibbsLengthTable gibbs_demo_table() {
    GibbsLengthTable table;
    table.cuts = {130.0};
    table.values = {35.0, 15.0};
    return table;
}

Scenario gen_gibbs_demo(std::uint64_t seed) {
    const double noise_var = 0.01;
    const std::vector<double> t = grid(0.0, 261.0, 1.0);
    const std::size_t n = t.size();
    Rng rng(seed);

    const KernelSpec k = KernelSpec::gibbs(gibbs_demo_table(), 1.0);
    const Eigen::VectorXd f = sample_prior(cov_fn(k), t, rng);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    const double sd = std::sqrt(noise_var);
    for (std::size_t i = 0; i < n; ++i)
        y(static_cast<Eigen::Index>(i)) = f(static_cast<Eigen::Index>(i)) + sd * rng.normal();

    Scenario s;
    s.seed = seed;
    s.truth = TimeSeries(t, std::vector<double>(f.data(), f.data() + n));
    s.fault = TimeSeries(t, std::vector<double>(n, 0.0));
    s.observed = TimeSeries(t, std::vector<double>(y.data(), y.data() + n));
    s.config = std::string("scenario = gibbs\n") + fmt("len_left", 35.0) + fmt("len_right", 15.0) +
               fmt("change_point", 130.0) + fmt("noise_var", noise_var);
    return s;
}

Scenario gen_wedge(WedgeSnr snr, std::uint64_t seed) {
    const WedgeConfig cfg;
    const std::vector<double> t = grid(0.0, cfg.t_end + 1.0, 1.0);
    const std::size_t n = t.size();
    Rng rng(seed);

    const double sd = snr == WedgeSnr::low ? cfg.noise_low : cfg.noise_high;
    std::vector<double> truth(n), fault(n, 0.0), obs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = t[i];
        truth[i] = x <= cfg.apex ? cfg.slope_left * x
                                 : cfg.slope_left * cfg.apex + cfg.slope_right * (x - cfg.apex);
        obs[i] = truth[i] + sd * rng.normal();
    }

    Scenario s;
    s.seed = seed;
    s.truth = TimeSeries(t, truth);
    s.fault = TimeSeries(t, fault);
    s.observed = TimeSeries(t, obs);
    s.config = std::string("scenario = ") + (snr == WedgeSnr::low ? "wedge_low" : "wedge_high") +
               "\n" + fmt("apex", cfg.apex) + fmt("slope_left", cfg.slope_left) +
               fmt("slope_right", cfg.slope_right) + fmt("noise_sd", sd);
    return s;
}

}  // namespace mrlgp
