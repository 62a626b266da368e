#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrlgp/errors.hpp"
#include "mrlgp/faults.hpp"
#include "mrlgp/simulate.hpp"
#include "support.hpp"

using namespace mrlgp;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / static_cast<double>(n - 1);
    return v;
}

}  // namespace

TEST_CASE("fault spec validation") {
    CHECK_THROWS_AS(FaultSpec::bias(2.0, 2.0, 1.0), ParameterError);
    CHECK_THROWS_AS(FaultSpec::drift(0.0, 1.0, 1.0, 0.0), ParameterError);
    CHECK_THROWS_AS(FaultSpec::drift_then_bias(0.0, 0.0, 1.0, 1.0, 1.0, 0.5), ParameterError);
    CHECK_THROWS_AS(FaultSpec::drift_then_bias(0.0, 2.0, 1.0, 1.0, 1.0, 0.5), ParameterError);
}

TEST_CASE("bias covariance") {
    const auto spec = FaultSpec::bias(10.0, 20.0, 1.5);

    SUBCASE("inside the window the covariance is the magnitude") {
        CHECK(fault_eval(spec, 12.0, 19.0) == 1.5);
        CHECK(fault_eval(spec, 20.0, 20.0) == 1.5);  // end point included
    }

    SUBCASE("zero at and outside the onset") {
        CHECK(fault_eval(spec, 10.0, 12.0) == 0.0);  // onset itself carries no fault
        CHECK(fault_eval(spec, 9.0, 12.0) == 0.0);
        CHECK(fault_eval(spec, 21.0, 12.0) == 0.0);
    }

    SUBCASE("window block is rank one") {
        const auto x = linspace(11.0, 20.0, 6);
        const auto g = bias_cov(spec, x, x);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.values);
        int nonzero = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()(i)) > 1e-10) ++nonzero;
        CHECK(nonzero == 1);
    }

    SUBCASE("discontinuous at onset: the prior jump equals the magnitude") {
        const double h = 1e-9;
        const double a = 10.0 - h, b = 10.0 + h;
        const double jump =
            fault_eval(spec, a, a) + fault_eval(spec, b, b) - 2.0 * fault_eval(spec, a, b);
        CHECK(jump == doctest::Approx(1.5).epsilon(1e-12));
    }

    SUBCASE("wrong kind rejected") {
        const auto x = linspace(0.0, 1.0, 3);
        CHECK_THROWS_AS(drift_cov(spec, x, x), ParameterError);
    }
}

TEST_CASE("drift covariance") {
    const double t0 = 5.0, t1 = 45.0, mu = 2.0, len = 10.0;
    const auto spec = FaultSpec::drift(t0, t1, mu, len);

    SUBCASE("zero variance at onset") {
        CHECK(fault_eval(spec, t0, t0) == 0.0);
        const double just_after = t0 + 1e-9;
        CHECK(fault_eval(spec, just_after, just_after) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("plain drift kernel recovered far from onset") {
        const double t = t0 + 10.0 * len, tp = t0 + 10.0 * len + 3.0;
        const auto far = FaultSpec::drift(t0, t0 + 25.0 * len, mu, len);
        const double expect = mu * std::exp(-9.0 / (len * len));
        CHECK(fault_eval(far, t, tp) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("variance one length after onset") {
        const double v = fault_eval(spec, t0 + len, t0 + len);
        CHECK(v == doctest::Approx(mu * 0.8646647167633873).epsilon(1e-13));
    }

    SUBCASE("matches the region-chain construction elementwise") {
        // independent code path: [zero | SE] linked with K_B = 0 at onset
        const auto chain = fault_region_model(spec);
        const auto x = linspace(t0 - 10.0, t1, 40);
        const auto direct = drift_cov(spec, x, x);
        const auto viachain = chain.gram(x);
        CHECK((direct.values - viachain.values).cwiseAbs().maxCoeff() <= 1e-12);
    }

    SUBCASE("symmetric and PSD for random windows") {
        Rng rng(61);
        for (int trial = 0; trial < 10; ++trial) {
            const double a = rng.uniform(0.0, 20.0);
            const auto s = FaultSpec::drift(a, a + rng.log_uniform(2.0, 30.0),
                                            rng.log_uniform(0.1, 5.0), rng.log_uniform(1.0, 15.0));
            const auto x = linspace(a - 5.0, a + 35.0, 25);
            const auto g = drift_cov(s, x, x);
            CHECK((g.values - g.values.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
            CHECK(oracle::min_eig(g.values) >= -1e-8 * std::max(g.values.trace(), 1.0));
        }
    }
}

TEST_CASE("drift-then-bias covariance") {
    const auto spec = FaultSpec::drift_then_bias(0.0, 10.0, 20.0, 1.0, 10.0, 0.5);

    SUBCASE("onset pinned to zero, transition pinned to the link variance") {
        CHECK(fault_eval(spec, 0.0, 0.0) == 0.0);
        CHECK(fault_eval(spec, 10.0, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("constant variance across the bias segment") {
        for (double t : {10.5, 13.0, 17.0, 20.0})
            CHECK(fault_eval(spec, t, t) == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("snaps back to zero after the end") {
        CHECK(fault_eval(spec, 20.5, 20.5) == 0.0);
        CHECK(fault_eval(spec, 19.0, 21.0) == 0.0);
    }

    SUBCASE("PSD and continuous at the transition") {
        const auto x = linspace(-5.0, 25.0, 31);
        const auto g = drift_then_bias_cov(spec, x, x);
        CHECK(oracle::min_eig(g.values) >= -1e-8 * std::max(g.values.trace(), 1.0));

        const double h = 1e-3;
        const auto model = fault_region_model(spec);
        const double j = model.eval(10.0 - h, 10.0 - h) + model.eval(10.0 + h, 10.0 + h) -
                         2.0 * model.eval(10.0 - h, 10.0 + h);
        CHECK(j <= 1e-4);
    }
}

TEST_CASE("fault covariances vanish outside the window for every kind") {
    const std::vector<FaultSpec> specs = {
        FaultSpec::bias(3.0, 12.0, 2.0), FaultSpec::drift(3.0, 12.0, 2.0, 4.0),
        FaultSpec::drift_then_bias(3.0, 7.0, 12.0, 2.0, 4.0, 0.7)};
    const auto x = linspace(-2.0, 18.0, 41);
    for (const auto& spec : specs) {
        const auto k = cov_fn(spec);
        const auto g = build_gram(k, x);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] > 3.0 && x[i] <= 12.0) continue;
            for (std::size_t j = 0; j < x.size(); ++j) {
                CHECK(g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0);
            }
        }
    }
}

TEST_CASE("remove_fault") {
    const auto scenario = gen_tracking(FaultKind::bias, 42);
    const auto& train = scenario.observed;
    const auto real_k = KernelSpec::squared_exponential(1.0, 10.0);
    const auto priors = FaultPriors::defaults(train.t.front(), train.t.back());

    SUBCASE("component means add to the combined posterior mean") {
        const auto r = remove_fault(train, real_k, FaultKind::bias, priors, 200, 7);
        CHECK((r.clean.mean + r.fault.mean - r.combined_mean).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(std::abs(oracle::VectorXd(r.hyper.log_weights.array().exp()).sum() - 1.0) <= 1e-10);
    }

    SUBCASE("recovers the real track better than ignoring the fault") {
        const auto r = remove_fault(train, real_k, FaultKind::bias, priors, 2000, 7);
        const auto ignorant = posterior(train, train.t, cov_fn(real_k), 0.001);
        double se_aware = 0.0, se_ignorant = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            if (!(train.t[i] > 10.0 && train.t[i] <= 20.0)) continue;
            const double truth = scenario.truth.y[i];
            se_aware += std::pow(r.clean.mean(static_cast<Eigen::Index>(i)) - truth, 2);
            se_ignorant += std::pow(ignorant.mean(static_cast<Eigen::Index>(i)) - truth, 2);
            ++count;
        }
        REQUIRE(count > 0);
        CHECK(se_aware < 0.25 * se_ignorant);  // this seed recovers well
    }

    SUBCASE("deterministic given the seed") {
        const auto a = remove_fault(train, real_k, FaultKind::drift, priors, 100, 3);
        const auto b = remove_fault(train, real_k, FaultKind::drift, priors, 100, 3);
        CHECK((a.clean.mean - b.clean.mean).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.fault.variance - b.fault.variance).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("online filter") {
    const auto scenario = gen_tracking(FaultKind::drift, 11);
    // keep the prefix loop cheap
    const auto train = scenario.observed.prefix(12);

    OnlineFilterConfig cfg;
    cfg.real_k = KernelSpec::squared_exponential(1.0, 10.0);
    cfg.kind = FaultKind::drift;
    cfg.priors = FaultPriors::defaults(scenario.observed.t.front(), scenario.observed.t.back());
    cfg.n_samples = 60;
    cfg.seed = 5;

    cfg.reuse_grams = true;
    const auto cached = online_filter(train, cfg);
    REQUIRE(cached.size() == train.size());

    SUBCASE("first step is the prior") {
        CHECK(cached[0].mean(0) == 0.0);
        CHECK(cached[0].variance(0) > 0.0);
    }

    SUBCASE("each step equals remove_fault on the prefix") {
        for (std::size_t i : {std::size_t{0}, std::size_t{4}, std::size_t{11}}) {
            const double xq = train.t[i];
            const auto r = remove_fault(train.prefix(i), cfg.real_k, cfg.kind, cfg.priors,
                                        cfg.n_samples, cfg.seed, std::span(&xq, 1));
            CHECK(cached[i].mean(0) == r.clean.mean(0));
            CHECK(cached[i].variance(0) == r.clean.variance(0));
        }
    }

    SUBCASE("cached and recomputed paths are bit-identical") {
        cfg.reuse_grams = false;
        const auto fresh = online_filter(train, cfg);
        REQUIRE(fresh.size() == cached.size());
        for (std::size_t i = 0; i < fresh.size(); ++i) {
            CHECK(fresh[i].mean(0) == cached[i].mean(0));
            CHECK(fresh[i].variance(0) == cached[i].variance(0));
        }
    }
}
