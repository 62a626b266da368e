#ifndef MRLGP_TESTS_SUPPORT_HPP
#define MRLGP_TESTS_SUPPORT_HPP

// Shared test oracles.  Everything here is deliberately independent of the
// library's solve paths: dense inverses, finite differences and sampling
// constructions only.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mrlgp/gp.hpp"
#include "mrlgp/kernels.hpp"
#include "mrlgp/region.hpp"
#include "mrlgp/rng.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd dense_gram(const mrlgp::CovFn& k, const std::vector<double>& a,
                           const std::vector<double>& b) {
    MatrixXd g(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k(a[i], b[j]);
    return g;
}

// posterior by explicit joint-Gaussian conditioning with a dense inverse
struct Conditioned {
    VectorXd mean;
    MatrixXd cov;
};

inline Conditioned condition(const mrlgp::CovFn& k, const std::vector<double>& x,
                             const std::vector<double>& y, const std::vector<double>& xs,
                             double sigma2) {
    MatrixXd kxx = dense_gram(k, x, x);
    kxx.diagonal().array() += sigma2;
    const MatrixXd ksx = dense_gram(k, xs, x);
    const MatrixXd kss = dense_gram(k, xs, xs);
    const MatrixXd inv = kxx.inverse();
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    return {ksx * inv * yv, kss - ksx * inv * ksx.transpose()};
}

// dual-process oracle: joint Gaussian over (f(xs), e(xs), Y), conditioned on Y
struct DualConditioned {
    VectorXd f_mean, e_mean;
    MatrixXd f_cov, e_cov;
};

inline DualConditioned dual_condition(const mrlgp::CovFn& kf, const mrlgp::CovFn& ke,
                                      const std::vector<double>& x, const std::vector<double>& y,
                                      const std::vector<double>& xs, double sigma2) {
    const MatrixXd kf_ss = dense_gram(kf, xs, xs);
    const MatrixXd ke_ss = dense_gram(ke, xs, xs);
    const MatrixXd kf_sx = dense_gram(kf, xs, x);
    const MatrixXd ke_sx = dense_gram(ke, xs, x);
    MatrixXd kyy = dense_gram(kf, x, x) + dense_gram(ke, x, x);
    kyy.diagonal().array() += sigma2;
    const MatrixXd inv = kyy.inverse();
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    DualConditioned d;
    d.f_mean = kf_sx * inv * yv;
    d.e_mean = ke_sx * inv * yv;
    d.f_cov = kf_ss - kf_sx * inv * kf_sx.transpose();
    d.e_cov = ke_ss - ke_sx * inv * ke_sx.transpose();
    return d;
}

inline double log_density(const mrlgp::CovFn& k, const std::vector<double>& x,
                          const std::vector<double>& y, double sigma2) {
    MatrixXd kxx = dense_gram(k, x, x);
    kxx.diagonal().array() += sigma2;
    const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
    return -0.5 * yv.dot(kxx.inverse() * yv) - 0.5 * std::log(kxx.determinant()) -
           0.5 * static_cast<double>(x.size()) * std::log(2.0 * M_PI);
}

inline double min_eig(const MatrixXd& m) {
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(m).eigenvalues().minCoeff();
}

inline double central_diff_d1(const mrlgp::CovFn& k, double x1, double x2, double h = 1e-5) {
    return (k(x1 + h, x2) - k(x1 - h, x2)) / (2.0 * h);
}

inline double central_diff_d12(const mrlgp::CovFn& k, double x1, double x2, double h = 1e-5) {
    return (k(x1 + h, x2 + h) - k(x1 + h, x2 - h) - k(x1 - h, x2 + h) + k(x1 - h, x2 - h)) /
           (4.0 * h * h);
}

// Monte-Carlo covariance oracle for a region chain, built directly from the
// generative reading of the graphical model: independent boundary states,
// each region regressed on its adjacent linked boundary states under its own
// kernel, plus an independent within-region residual.
class ChainSampler {
public:
    ChainSampler(const mrlgp::RegionModel& model, const std::vector<double>& x) : x_(x) {
        using mrlgp::BoundaryLink;
        const auto& bounds = model.boundaries();
        const auto& regions = model.regions();

        std::vector<int> off(bounds.size(), -1);
        for (std::size_t j = 0; j < bounds.size(); ++j) {
            if (bounds[j].kind == BoundaryLink::Kind::independent) continue;
            off[j] = n_states_;
            n_states_ += bounds[j].kind == BoundaryLink::Kind::value ? 1 : 2;
        }
        state_sd_.resize(n_states_);
        for (std::size_t j = 0; j < bounds.size(); ++j) {
            if (off[j] < 0) continue;
            state_sd_(off[j]) = std::sqrt(bounds[j].value_var);
            if (bounds[j].kind == BoundaryLink::Kind::value_and_slope)
                state_sd_(off[j] + 1) = std::sqrt(bounds[j].slope_var);
        }

        load_.resize(static_cast<Eigen::Index>(x.size()), n_states_);
        load_.setZero();
        std::vector<int> region_of(x.size(), -1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            bool on_boundary = false;
            for (std::size_t j = 0; j < bounds.size(); ++j) {
                if (x[i] == bounds[j].location && off[j] >= 0) {
                    load_(static_cast<Eigen::Index>(i), off[j]) = 1.0;
                    on_boundary = true;
                }
            }
            if (on_boundary) continue;
            int r = 0;
            for (const auto& b : bounds)
                if (b.location < x[i]) ++r;
            region_of[i] = r;
        }

        for (std::size_t r = 0; r < regions.size(); ++r) {
            std::vector<std::size_t> pts;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (region_of[i] == static_cast<int>(r)) pts.push_back(i);
            if (pts.empty()) continue;

            std::vector<int> adj;
            if (r > 0 && bounds[r - 1].kind != BoundaryLink::Kind::independent)
                adj.push_back(static_cast<int>(r - 1));
            if (r < bounds.size() && bounds[r].kind != BoundaryLink::Kind::independent)
                adj.push_back(static_cast<int>(r));

            const auto& ker = regions[r];
            MatrixXd cross(pts.size(), 0);
            MatrixXd bb(0, 0);
            if (!adj.empty()) {
                int dim = 0;
                for (int j : adj)
                    dim += bounds[static_cast<std::size_t>(j)].kind == BoundaryLink::Kind::value ? 1 : 2;
                cross.resize(static_cast<Eigen::Index>(pts.size()), dim);
                bb.resize(dim, dim);
                auto state_cov = [&](double a, int j, bool deriv_a) {
                    const auto& b = bounds[static_cast<std::size_t>(j)];
                    if (!deriv_a) return mrlgp::eval(ker, a, b.location);
                    return mrlgp::eval_d1(ker, b.location, a);
                };
                for (std::size_t p = 0; p < pts.size(); ++p) {
                    int c = 0;
                    for (int j : adj) {
                        cross(static_cast<Eigen::Index>(p), c++) = state_cov(x_[pts[p]], j, false);
                        if (bounds[static_cast<std::size_t>(j)].kind ==
                            BoundaryLink::Kind::value_and_slope)
                            cross(static_cast<Eigen::Index>(p), c++) = state_cov(x_[pts[p]], j, true);
                    }
                }
                int row = 0;
                for (int j : adj) {
                    const auto& bj = bounds[static_cast<std::size_t>(j)];
                    const bool dj = bj.kind == BoundaryLink::Kind::value_and_slope;
                    int col = 0;
                    for (int k : adj) {
                        const auto& bk = bounds[static_cast<std::size_t>(k)];
                        const bool dk = bk.kind == BoundaryLink::Kind::value_and_slope;
                        bb(row, col) = mrlgp::eval(ker, bj.location, bk.location);
                        if (dk) bb(row, col + 1) = mrlgp::eval_d1(ker, bk.location, bj.location);
                        if (dj) {
                            bb(row + 1, col) = mrlgp::eval_d1(ker, bj.location, bk.location);
                            if (dk)
                                bb(row + 1, col + 1) = mrlgp::eval_d12(ker, bj.location, bk.location);
                        }
                        col += dk ? 2 : 1;
                    }
                    row += dj ? 2 : 1;
                }
            }

            RegionDraw rd;
            rd.points = pts;
            MatrixXd kpp(pts.size(), pts.size());
            for (std::size_t a = 0; a < pts.size(); ++a)
                for (std::size_t b = 0; b < pts.size(); ++b)
                    kpp(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        mrlgp::eval(ker, x_[pts[a]], x_[pts[b]]);
            MatrixXd resid = kpp;
            if (!adj.empty()) {
                // pseudo-inverse via SVD, independent of the library helper
                Eigen::JacobiSVD<MatrixXd> svd(bb, Eigen::ComputeFullU | Eigen::ComputeFullV);
                VectorXd inv = VectorXd::Zero(svd.singularValues().size());
                for (Eigen::Index i = 0; i < inv.size(); ++i)
                    if (svd.singularValues()(i) > 1e-13 * svd.singularValues()(0))
                        inv(i) = 1.0 / svd.singularValues()(i);
                const MatrixXd bb_pinv =
                    svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
                const MatrixXd gain = cross * bb_pinv;
                resid -= gain * cross.transpose();
                int c = 0;
                for (int j : adj) {
                    for (std::size_t p = 0; p < pts.size(); ++p)
                        load_(static_cast<Eigen::Index>(pts[p]), off[static_cast<std::size_t>(j)]) =
                            gain(static_cast<Eigen::Index>(p), c);
                    if (bounds[static_cast<std::size_t>(j)].kind ==
                        BoundaryLink::Kind::value_and_slope) {
                        for (std::size_t p = 0; p < pts.size(); ++p)
                            load_(static_cast<Eigen::Index>(pts[p]),
                                  off[static_cast<std::size_t>(j)] + 1) =
                                gain(static_cast<Eigen::Index>(p), c + 1);
                        c += 2;
                    } else {
                        ++c;
                    }
                }
            }
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(resid);
            rd.root = es.eigenvectors() *
                      es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
            draws_.push_back(std::move(rd));
        }
    }

    VectorXd draw(mrlgp::Rng& rng) {
        VectorXd states(n_states_);
        for (Eigen::Index i = 0; i < states.size(); ++i) states(i) = state_sd_(i) * rng.normal();
        VectorXd f = load_ * states;
        for (const auto& rd : draws_) {
            VectorXd z(static_cast<Eigen::Index>(rd.points.size()));
            for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
            const VectorXd r = rd.root * z;
            for (std::size_t p = 0; p < rd.points.size(); ++p)
                f(static_cast<Eigen::Index>(rd.points[p])) += r(static_cast<Eigen::Index>(p));
        }
        return f;
    }

    // sample covariance over n draws
    MatrixXd sample_cov(int n, mrlgp::Rng& rng) {
        const Eigen::Index m = static_cast<Eigen::Index>(x_.size());
        MatrixXd acc = MatrixXd::Zero(m, m);
        VectorXd mean = VectorXd::Zero(m);
        for (int i = 0; i < n; ++i) {
            const VectorXd f = draw(rng);
            acc += f * f.transpose();
            mean += f;
        }
        mean /= static_cast<double>(n);
        return acc / static_cast<double>(n) - mean * mean.transpose();
    }

private:
    struct RegionDraw {
        std::vector<std::size_t> points;
        MatrixXd root;
    };

    std::vector<double> x_;
    int n_states_ = 0;
    VectorXd state_sd_;
    MatrixXd load_;
    std::vector<RegionDraw> draws_;
};

// max |a-b| over all entries, scaled by the 3-standard-error band of a
// sample covariance with n draws
inline double max_cov_err_in_se(const MatrixXd& sample, const MatrixXd& truth, int n) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
        for (Eigen::Index j = 0; j < truth.cols(); ++j) {
            const double se = std::sqrt(
                (truth(i, i) * truth(j, j) + truth(i, j) * truth(i, j)) / static_cast<double>(n));
            const double err = std::abs(sample(i, j) - truth(i, j));
            if (se == 0.0) {
                if (err > 0.0) return 1e30;
                continue;
            }
            worst = std::max(worst, err / se);
        }
    }
    return worst;
}

}  // namespace oracle

#endif
