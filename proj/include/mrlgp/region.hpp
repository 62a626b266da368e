#ifndef MRLGP_REGION_HPP
#define MRLGP_REGION_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mrlgp/kernels.hpp"

namespace mrlgp {

// One region boundary (change-point).  A linked boundary carries the shared
// boundary covariance K_B: a scalar value variance for continuity order 0,
// plus an independent slope variance when the first derivative is also tied
// (order 1).  An independent boundary splices the neighbouring regions
// without any link, leaving them decorrelated; a point exactly on such a
// boundary belongs to the region on its left (half-open convention).
struct BoundaryLink {
    enum class Kind { independent, value, value_and_slope };

    double location = 0.0;
    Kind kind = Kind::value;
    double value_var = 0.0;
    double slope_var = 0.0;

    static BoundaryLink independent(double loc);
    static BoundaryLink value(double loc, double v);
    static BoundaryLink value_and_slope(double loc, double v, double w);

    int continuity_order() const { return kind == Kind::value_and_slope ? 1 : 0; }
};

// Piecewise-stationary prior: per-region kernels joined at ordered boundary
// locations.  Each region is conditioned on the state (value, and slope for
// order-1 links) of its adjacent linked boundaries; boundary states across
// different boundaries are a-priori independent with the given variances.
// With a single boundary this is exactly the two-region construction
//   K*_r = K_r + G_r [K_B - K_r(x_B,x_B)] G_r^T,   D = G_1 K_B G_2^T
// with G_r = K_r(., x_B) K_r(x_B,x_B)^{-1} (pseudo-inverse when singular).
class RegionModel {
public:
    RegionModel(std::vector<KernelSpec> regions, std::vector<BoundaryLink> boundaries);

    const std::vector<KernelSpec>& regions() const { return regions_; }
    const std::vector<BoundaryLink>& boundaries() const { return boundaries_; }

    // prior covariance between two sample locations
    double eval(double x1, double x2) const;

    GramMatrix gram(std::span<const double> x, std::span<const double> y) const;
    GramMatrix gram(std::span<const double> x) const;

    // region index owning x: region r spans (b_{r-1}, b_r]
    std::size_t region_of(double x) const;

private:
    struct RegionCtx {
        std::vector<int> adj;         // adjacent linked boundary indices
        Eigen::MatrixXd bb_pinv;      // pinv of the region kernel's boundary-state block
        int state_dim = 0;
    };

    // covariance of f(x) against region r's boundary states, under kernel r
    Eigen::VectorXd cross_states(std::size_t r, double x) const;
    // loading of a point onto the global boundary-state vector; out.second is
    // the owning region, or -1 when x sits exactly on a linked boundary
    std::pair<Eigen::VectorXd, int> loading(double x) const;
    double residual_cov(double x1, double x2, std::size_t r) const;

    std::vector<KernelSpec> regions_;
    std::vector<BoundaryLink> boundaries_;
    std::vector<int> state_off_;   // per boundary; -1 for independent
    int n_states_ = 0;
    Eigen::VectorXd state_var_;
    std::vector<RegionCtx> ctx_;
};

// Pointwise two-region evaluation (the change-point kernel).  The model must
// have exactly one boundary.
double mrl_eval(double x1, double x2, const RegionModel& model);

// Global prior over the stacked locations (X1, XB, X2) for a one-boundary
// model; X1 must lie strictly left of the boundary, X2 strictly right, and
// every XB entry on it.
GramMatrix assemble_global(const RegionModel& model, std::span<const double> x1,
                           std::span<const double> xb, std::span<const double> x2);

// Global prior over sorted locations for a model with one or more boundaries.
GramMatrix chain_regions(const RegionModel& model, std::span<const double> x);

// Value/derivative boundary blocks for derivative-augmented boundaries:
// [[K(XB,XB), dK(XB,XB)^T], [dK(XB,XB), ddK(XB,XB)]], values first.
Eigen::MatrixXd augment_derivative(const KernelSpec& spec, std::span<const double> xb);

// Cross block [K(X,XB), dK(XB,X)^T] pairing sample locations with the
// augmented boundary states (n x 2m).
Eigen::MatrixXd augmented_cross(const KernelSpec& spec, std::span<const double> x,
                                std::span<const double> xb);

}  // namespace mrlgp

#endif
