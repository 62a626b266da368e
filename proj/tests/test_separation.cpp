#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"
#include "mrlgp/separation.hpp"
#include "support.hpp"

using namespace mrlgp;

namespace {

SeparationModel demo_model() {
    return SeparationModel(KernelSpec::squared_exponential(1.0, 15.0), 16.0, 3.0, 30.0, 50.0, 16.0,
                           0.01, 0.005);
}

std::vector<double> arange(double n) {
    std::vector<double> v;
    for (double x = 0.0; x < n; x += 1.0) v.push_back(x);
    return v;
}

// synthetic mixture: smooth signal + windowed artifact + residuals
TimeSeries gen_mixture(std::uint64_t seed, bool with_artifact, std::vector<double>* sig_true,
                       std::vector<double>* art_true) {
    const auto t = arange(80.0);
    Rng rng(seed);
    const auto model = demo_model();
    const Eigen::VectorXd ms = sample_prior(cov_fn(model.k_sig), t, rng);
    Eigen::VectorXd ma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.size()));
    if (with_artifact) ma = sample_prior(cov_fn(model.artifact_model()), t, rng);
    std::vector<double> y(t.size());
    if (sig_true) sig_true->resize(t.size());
    if (art_true) art_true->resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double rs = std::sqrt(model.r_sig) * rng.normal();
        const double ra = std::sqrt(model.r_art) * rng.normal();
        const Eigen::Index ii = static_cast<Eigen::Index>(i);
        y[i] = ms(ii) + rs + ma(ii) + ra;
        if (sig_true) (*sig_true)[i] = ms(ii) + rs;
        if (art_true) (*art_true)[i] = ma(ii) + ra;
    }
    return TimeSeries(t, y);
}

}  // namespace

TEST_CASE("artifact prior structure") {
    const auto model = demo_model();
    const auto t = arange(80.0);
    const auto g = artifact_prior(model, t, t);

    SUBCASE("zero variance at the window ends") {
        CHECK(model.artifact_model().eval(30.0, 30.0) == 0.0);
        CHECK(model.artifact_model().eval(50.0, 50.0) == doctest::Approx(0.0).epsilon(1e-12));
    }

    SUBCASE("midpoint variance equals the join variance") {
        CHECK(model.artifact_model().eval(40.0, 40.0) == doctest::Approx(16.0).epsilon(1e-12));
    }

    SUBCASE("rows and columns vanish outside the window") {
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] > 30.0 && t[i] <= 50.0) continue;
            for (std::size_t j = 0; j < t.size(); ++j)
                CHECK(g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0);
        }
    }

    SUBCASE("continuous but reluctant across the join") {
        // value continuity at the midpoint
        const double h = 1e-3;
        const auto am = model.artifact_model();
        const double j =
            am.eval(40.0 - h, 40.0 - h) + am.eval(40.0 + h, 40.0 + h) - 2.0 * am.eval(40.0 - h, 40.0 + h);
        CHECK(j <= 1e-4);
    }
}

TEST_CASE("hidden posteriors") {
    std::vector<double> sig_true, art_true;
    const auto train = gen_mixture(1, true, &sig_true, &art_true);
    const auto model = demo_model();

    SUBCASE("no artifact model reduces to a plain posterior") {
        const SeparationModel plain(model.k_sig, 0.0, 4.0, 30.0, 50.0, 0.0, 0.01, 0.0);
        const auto h = hidden_posteriors(plain, train, train.t);
        const auto ref = posterior(train, train.t, cov_fn(model.k_sig), 0.01);
        CHECK((h.m_sig - ref.mean).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(h.m_art.cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("hidden means add to the combined posterior mean") {
        const auto h = hidden_posteriors(model, train, train.t);
        const auto art = model.artifact_model();
        const auto ks = [&](double a, double b) {
            return eval(model.k_sig, a, b) + art.eval(a, b);
        };
        const auto sum = posterior(train, train.t, ks, model.r_sig + model.r_art);
        CHECK((h.m_sig + h.m_art - sum.mean).cwiseAbs().maxCoeff() <= 1e-10);
    }

    SUBCASE("matches the joint-Gaussian oracle on a small instance") {
        const std::vector<double> t = {31.0, 35.0, 41.0, 47.0};
        const std::vector<double> y = {0.5, -2.0, 3.0, 0.7};
        const std::vector<double> xs = {33.0, 44.0};
        const auto kf = cov_fn(model.k_sig);
        const auto ke = cov_fn(model.artifact_model());
        const auto ref = oracle::dual_condition(kf, ke, t, y, xs, model.r_sig + model.r_art);
        const auto h = hidden_posteriors(model, TimeSeries(t, y), xs);
        CHECK((h.m_sig - ref.f_mean).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((h.m_art - ref.e_mean).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((h.var_sig - ref.f_cov.diagonal()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((h.var_art - ref.e_cov.diagonal()).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("apportionment") {
    SUBCASE("hand instance splits the residual") {
        // P_sig = 1, P_art = 1, y = 2, m_sig = 0, m_art = 1
        const auto a = apportion(2.0, 0.0, 0.5, 1.0, 0.7, 0.5, 0.3);
        CHECK(a.s_sig == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(a.s_art == doctest::Approx(1.5).epsilon(1e-14));
        CHECK(a.var == doctest::Approx(0.5).epsilon(1e-14));
    }

    SUBCASE("components always add back to the observation") {
        Rng rng(9);
        for (int i = 0; i < 200; ++i) {
            const double y = rng.normal() * 3.0;
            const auto a = apportion(y, rng.normal(), rng.log_uniform(1e-4, 2.0), rng.normal(),
                                     rng.log_uniform(1e-4, 2.0), rng.log_uniform(1e-4, 0.5),
                                     rng.log_uniform(1e-4, 0.5));
            CHECK(a.s_sig + a.s_art == doctest::Approx(y).epsilon(1e-12));
        }
    }

    SUBCASE("vanishing artifact precision hands everything to the artifact share") {
        // P_art -> 0: s_sig -> y - m_art
        const auto a = apportion(2.0, 0.3, 1.0, 0.9, 0.0, 0.0, 0.0);
        CHECK(a.s_sig == doctest::Approx(2.0 - 0.9).epsilon(1e-12));
        CHECK(a.s_art == doctest::Approx(0.9).epsilon(1e-12));
        CHECK(a.var == 0.0);
    }

    SUBCASE("fused variance below both component variances") {
        Rng rng(10);
        for (int i = 0; i < 100; ++i) {
            const double cs = rng.log_uniform(1e-3, 2.0), ca = rng.log_uniform(1e-3, 2.0);
            const double rs = rng.log_uniform(1e-4, 0.3), ra = rng.log_uniform(1e-4, 0.3);
            const auto a = apportion(0.0, 0.0, cs, 0.0, ca, rs, ra);
            CHECK(a.var <= std::min(cs + rs, ca + ra) + 1e-14);
        }
    }

    SUBCASE("residual split is proportional to the precisions") {
        Rng rng(12);
        for (int i = 0; i < 100; ++i) {
            const double ms = rng.normal(), ma = rng.normal(), y = rng.normal() * 2.0;
            const double cs = rng.log_uniform(1e-3, 2.0), ca = rng.log_uniform(1e-3, 2.0);
            const auto a = apportion(y, ms, cs, ma, ca, 0.01, 0.02);
            const double ps = cs + 0.01, pa = ca + 0.02;
            if (std::abs(a.s_sig - ms) > 1e-8) {
                CHECK((a.s_art - ma) / (a.s_sig - ms) == doctest::Approx(pa / ps).epsilon(1e-8));
            }
        }
    }

    SUBCASE("degenerate model rejected") {
        CHECK_THROWS_AS(apportion(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0), ParameterError);
    }
}

TEST_CASE("separate") {
    const auto priors = SeparationPriors::defaults(0.0, 79.0);

    SUBCASE("components add back to the observations everywhere") {
        const auto train = gen_mixture(21, true, nullptr, nullptr);
        const auto r = separate(train, priors, 120, 5);
        for (std::size_t i = 0; i < train.size(); ++i)
            CHECK(std::abs(r.s_sig(static_cast<Eigen::Index>(i)) +
                           r.s_art(static_cast<Eigen::Index>(i)) - train.y[i]) <= 1e-10);
    }

    SUBCASE("artifact-free data keeps the artifact share near zero") {
        int pass = 0;
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const auto train = gen_mixture(100 + seed, false, nullptr, nullptr);
            const auto r = separate(train, priors, 300, 9000 + seed);
            int ok = 0;
            for (Eigen::Index i = 0; i < r.s_art.size(); ++i)
                if (std::abs(r.s_art(i)) <= 2.0 * std::sqrt(r.var(i))) ++ok;
            if (ok >= static_cast<int>(0.95 * static_cast<double>(r.s_art.size()))) ++pass;
        }
        CHECK(pass >= 3);
    }

    SUBCASE("recovers the artifact window") {
        // spec target: window-estimate error within a quarter width, median of 20 seeds
        std::vector<double> ts_err, te_err;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto train = gen_mixture(200 + seed, true, nullptr, nullptr);
            const auto r = separate(train, priors, 400, 9500 + seed);
            ts_err.push_back(std::abs(r.t_start_hat - 30.0));
            te_err.push_back(std::abs(r.t_end_hat - 50.0));
        }
        std::sort(ts_err.begin(), ts_err.end());
        std::sort(te_err.begin(), te_err.end());
        CHECK(ts_err[10] <= 5.0);
        CHECK(te_err[10] <= 5.0);
    }

    SUBCASE("deterministic given the seed") {
        const auto train = gen_mixture(33, true, nullptr, nullptr);
        const auto a = separate(train, priors, 50, 77);
        const auto b = separate(train, priors, 50, 77);
        CHECK((a.s_sig - b.s_sig).cwiseAbs().maxCoeff() == 0.0);
        CHECK((a.var - b.var).cwiseAbs().maxCoeff() == 0.0);
    }
}
