#include "mrlgp/region.hpp"

#include <algorithm>
#include <cmath>

#include "mrlgp/errors.hpp"
#include "mrlgp/linalg.hpp"

namespace mrlgp {

BoundaryLink BoundaryLink::independent(double loc) {
    BoundaryLink b;
    b.location = loc;
    b.kind = Kind::independent;
    return b;
}

BoundaryLink BoundaryLink::value(double loc, double v) {
    if (v < 0.0) throw ParameterError("boundary value variance must be >= 0");
    BoundaryLink b;
    b.location = loc;
    b.kind = Kind::value;
    b.value_var = v;
    return b;
}

BoundaryLink BoundaryLink::value_and_slope(double loc, double v, double w) {
    if (v < 0.0 || w < 0.0) throw ParameterError("boundary variances must be >= 0");
    BoundaryLink b;
    b.location = loc;
    b.kind = Kind::value_and_slope;
    b.value_var = v;
    b.slope_var = w;
    return b;
}

namespace {

int state_dim_of(const BoundaryLink& b) {
    switch (b.kind) {
        case BoundaryLink::Kind::independent: return 0;
        case BoundaryLink::Kind::value: return 1;
        case BoundaryLink::Kind::value_and_slope: return 2;
    }
    return 0;
}

}  // namespace

RegionModel::RegionModel(std::vector<KernelSpec> regions, std::vector<BoundaryLink> boundaries)
    : regions_(std::move(regions)), boundaries_(std::move(boundaries)) {
    if (regions_.empty()) throw ParameterError("RegionModel: needs at least one region");
    if (regions_.size() != boundaries_.size() + 1)
        throw ParameterError("RegionModel: region count must be boundary count + 1");
    for (std::size_t j = 1; j < boundaries_.size(); ++j) {
        if (!(boundaries_[j].location > boundaries_[j - 1].location))
            throw ParameterError("RegionModel: boundary locations must be strictly increasing");
    }
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
        if (boundaries_[j].kind == BoundaryLink::Kind::value_and_slope) {
            if (!regions_[j].supports_derivatives() || !regions_[j + 1].supports_derivatives())
                throw UnsupportedError(
                    "derivative continuity requires analytic derivatives in both adjacent regions");
        }
    }

    state_off_.assign(boundaries_.size(), -1);
    n_states_ = 0;
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
        const int d = state_dim_of(boundaries_[j]);
        if (d > 0) {
            state_off_[j] = n_states_;
            n_states_ += d;
        }
    }
    state_var_.resize(n_states_);
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
        if (state_off_[j] < 0) continue;
        state_var_(state_off_[j]) = boundaries_[j].value_var;
        if (boundaries_[j].kind == BoundaryLink::Kind::value_and_slope)
            state_var_(state_off_[j] + 1) = boundaries_[j].slope_var;
    }

    ctx_.resize(regions_.size());
    for (std::size_t r = 0; r < regions_.size(); ++r) {
        auto& c = ctx_[r];
        if (r > 0 && boundaries_[r - 1].kind != BoundaryLink::Kind::independent)
            c.adj.push_back(static_cast<int>(r - 1));
        if (r < boundaries_.size() && boundaries_[r].kind != BoundaryLink::Kind::independent)
            c.adj.push_back(static_cast<int>(r));
        c.state_dim = 0;
        for (int j : c.adj) c.state_dim += state_dim_of(boundaries_[j]);
        if (c.state_dim == 0) continue;

        // boundary-state covariance under this region's own kernel
        Eigen::MatrixXd bb(c.state_dim, c.state_dim);
        int row = 0;
        for (int j : c.adj) {
            const auto& bj = boundaries_[j];
            int col = 0;
            for (int k : c.adj) {
                const auto& bk = boundaries_[k];
                bb(row, col) = mrlgp::eval(regions_[r], bj.location, bk.location);
                if (bk.kind == BoundaryLink::Kind::value_and_slope)
                    bb(row, col + 1) = mrlgp::eval_d1(regions_[r], bk.location, bj.location);
                if (bj.kind == BoundaryLink::Kind::value_and_slope) {
                    bb(row + 1, col) = mrlgp::eval_d1(regions_[r], bj.location, bk.location);
                    if (bk.kind == BoundaryLink::Kind::value_and_slope)
                        bb(row + 1, col + 1) = mrlgp::eval_d12(regions_[r], bj.location, bk.location);
                }
                col += state_dim_of(bk);
            }
            row += state_dim_of(bj);
        }
        c.bb_pinv = pinv(bb);
    }
}

std::size_t RegionModel::region_of(double x) const {
    std::size_t r = 0;
    for (const auto& b : boundaries_) {
        if (b.location < x) ++r;
    }
    return r;
}

Eigen::VectorXd RegionModel::cross_states(std::size_t r, double x) const {
    const auto& c = ctx_[r];
    Eigen::VectorXd v(c.state_dim);
    int i = 0;
    for (int j : c.adj) {
        const auto& b = boundaries_[j];
        v(i++) = mrlgp::eval(regions_[r], x, b.location);
        if (b.kind == BoundaryLink::Kind::value_and_slope)
            v(i++) = mrlgp::eval_d1(regions_[r], b.location, x);  // Cov(f(x), f'(b))
    }
    return v;
}

std::pair<Eigen::VectorXd, int> RegionModel::loading(double x) const {
    Eigen::VectorXd lam = Eigen::VectorXd::Zero(n_states_);
    for (std::size_t j = 0; j < boundaries_.size(); ++j) {
        if (x == boundaries_[j].location && state_off_[j] >= 0) {
            lam(state_off_[j]) = 1.0;  // the boundary value itself
            return {lam, -1};
        }
    }
    const std::size_t r = region_of(x);
    const auto& c = ctx_[r];
    if (c.state_dim > 0) {
        Eigen::VectorXd g = c.bb_pinv * cross_states(r, x);
        int i = 0;
        for (int j : c.adj) {
            lam(state_off_[j]) = g(i++);
            if (boundaries_[j].kind == BoundaryLink::Kind::value_and_slope)
                lam(state_off_[j] + 1) = g(i++);
        }
    }
    return {lam, static_cast<int>(r)};
}

double RegionModel::residual_cov(double x1, double x2, std::size_t r) const {
    const auto& c = ctx_[r];
    double v = mrlgp::eval(regions_[r], x1, x2);
    if (c.state_dim > 0) {
        const Eigen::VectorXd k1 = cross_states(r, x1);
        const Eigen::VectorXd k2 = cross_states(r, x2);
        v -= k1.dot(c.bb_pinv * k2);
    }
    return v;
}

double RegionModel::eval(double x1, double x2) const {
    const auto [lam1, r1] = loading(x1);
    const auto [lam2, r2] = loading(x2);
    double v = n_states_ > 0 ? lam1.dot(state_var_.asDiagonal() * lam2) : 0.0;
    if (r1 >= 0 && r1 == r2) v += residual_cov(x1, x2, static_cast<std::size_t>(r1));
    return v;
}

namespace {

// per-point cache for gram assembly: loading onto the boundary states, the
// owning region, and the region-kernel cross terms against those states
struct PointCtx {
    int region = -1;  // -1: sits exactly on a linked boundary
    Eigen::VectorXd lam;
    Eigen::VectorXd cross;     // K_r(x, B_r states)
    Eigen::VectorXd weighted;  // bb_pinv * cross
};

}  // namespace

GramMatrix RegionModel::gram(std::span<const double> x, std::span<const double> y) const {
    auto contexts = [this](std::span<const double> pts) {
        std::vector<PointCtx> out(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto [lam, r] = loading(pts[i]);
            out[i].lam = std::move(lam);
            out[i].region = r;
            if (r >= 0 && ctx_[static_cast<std::size_t>(r)].state_dim > 0) {
                out[i].cross = cross_states(static_cast<std::size_t>(r), pts[i]);
                out[i].weighted = ctx_[static_cast<std::size_t>(r)].bb_pinv * out[i].cross;
            }
        }
        return out;
    };
    const auto cx = contexts(x);
    const auto cy = contexts(y);

    GramMatrix g;
    g.values.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < y.size(); ++j) {
            double v = 0.0;
            if (n_states_ > 0)
                v = cx[i].lam.dot(state_var_.asDiagonal() * cy[j].lam);
            if (cx[i].region >= 0 && cx[i].region == cy[j].region) {
                const auto r = static_cast<std::size_t>(cx[i].region);
                v += mrlgp::eval(regions_[r], x[i], y[j]);
                if (cx[i].cross.size() > 0) v -= cx[i].cross.dot(cy[j].weighted);
            }
            g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    }
    g.row_points.assign(x.begin(), x.end());
    g.col_points.assign(y.begin(), y.end());
    return g;
}

GramMatrix RegionModel::gram(std::span<const double> x) const { return gram(x, x); }

double mrl_eval(double x1, double x2, const RegionModel& model) {
    if (model.boundaries().size() != 1)
        throw ParameterError("mrl_eval: model must have exactly one boundary");
    if (!std::isfinite(x1) || !std::isfinite(x2))
        throw ParameterError("mrl_eval: locations must be finite");
    return model.eval(x1, x2);
}

GramMatrix assemble_global(const RegionModel& model, std::span<const double> x1,
                           std::span<const double> xb, std::span<const double> x2) {
    if (model.boundaries().size() != 1)
        throw ParameterError("assemble_global: model must have exactly one boundary");
    const double b = model.boundaries()[0].location;
    for (double v : x1)
        if (!(v < b)) throw ParameterError("assemble_global: X1 must lie left of the boundary");
    for (double v : xb)
        if (v != b) throw ParameterError("assemble_global: XB entries must sit on the boundary");
    for (double v : x2)
        if (!(v > b)) throw ParameterError("assemble_global: X2 must lie right of the boundary");

    std::vector<double> stacked;
    stacked.reserve(x1.size() + xb.size() + x2.size());
    stacked.insert(stacked.end(), x1.begin(), x1.end());
    stacked.insert(stacked.end(), xb.begin(), xb.end());
    stacked.insert(stacked.end(), x2.begin(), x2.end());
    return model.gram(stacked);
}

GramMatrix chain_regions(const RegionModel& model, std::span<const double> x) {
    if (model.boundaries().empty())
        throw ParameterError("chain_regions: model must have at least one boundary");
    if (!std::is_sorted(x.begin(), x.end()))
        throw ParameterError("chain_regions: locations must be sorted");
    return model.gram(x);
}

Eigen::MatrixXd augment_derivative(const KernelSpec& spec, std::span<const double> xb) {
    if (!spec.supports_derivatives())
        throw UnsupportedError("augment_derivative: kernel lacks analytic derivatives");
    const Eigen::Index m = static_cast<Eigen::Index>(xb.size());
    Eigen::MatrixXd out(2 * m, 2 * m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out(i, j) = eval(spec, xb[i], xb[j]);
            out(m + i, j) = eval_d1(spec, xb[i], xb[j]);
            out(i, m + j) = eval_d1(spec, xb[j], xb[i]);
            out(m + i, m + j) = eval_d12(spec, xb[i], xb[j]);
        }
    }
    return out;
}

Eigen::MatrixXd augmented_cross(const KernelSpec& spec, std::span<const double> x,
                                std::span<const double> xb) {
    if (!spec.supports_derivatives())
        throw UnsupportedError("augmented_cross: kernel lacks analytic derivatives");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index m = static_cast<Eigen::Index>(xb.size());
    Eigen::MatrixXd out(n, 2 * m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            out(i, j) = eval(spec, x[i], xb[j]);
            out(i, m + j) = eval_d1(spec, xb[j], x[i]);
        }
    }
    return out;
}

}  // namespace mrlgp
