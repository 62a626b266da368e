#ifndef MRLGP_KERNELS_HPP
#define MRLGP_KERNELS_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mrlgp {

enum class KernelFamily {
    squared_exponential,
    gibbs,
    constant,
    zero,
    white_noise,
};

// Piecewise-constant length-scale function l(x) for the Gibbs kernel.
// values[i] applies to x <= cuts[i] (first matching cut); values.back()
// covers everything beyond the last cut, so the whole axis is covered.
struct GibbsLengthTable {
    std::vector<double> cuts;    // strictly increasing
    std::vector<double> values;  // size == cuts.size() + 1, all > 0

    double at(double x) const;
};

// A stationary (or piecewise-stationary, for Gibbs) covariance family with
// its named hyperparameters.
class KernelSpec {
public:
    // k(x,x') = mu * exp(-(x-x')^2 / len^2)
    static KernelSpec squared_exponential(double mu, double len);
    // Gibbs kernel with varying length scale; mu is an output-scale multiplier
    static KernelSpec gibbs(GibbsLengthTable table, double mu = 1.0);
    static KernelSpec constant(double mu);
    static KernelSpec zero();
    // sigma2 iff x == x', else 0
    static KernelSpec white_noise(double sigma2);

    KernelFamily family() const { return family_; }
    double output_scale() const { return mu_; }
    double input_scale() const { return len_; }
    double noise_var() const { return noise_var_; }
    const GibbsLengthTable& length_table() const { return table_; }

    bool supports_derivatives() const;

private:
    KernelSpec() = default;

    KernelFamily family_ = KernelFamily::zero;
    double mu_ = 0.0;
    double len_ = 1.0;
    double noise_var_ = 0.0;
    GibbsLengthTable table_;
};

// Covariance matrix with the sample locations it was built from and any
// jitter a factorization later had to add to make it PSD.
struct GramMatrix {
    Eigen::MatrixXd values;
    double jitter_added = 0.0;
    std::vector<double> row_points;
    std::vector<double> col_points;
};

double eval(const KernelSpec& spec, double x1, double x2);

// dK/dx1 and d2K/dx1 dx2; throws UnsupportedError for white noise
double eval_d1(const KernelSpec& spec, double x1, double x2);
double eval_d12(const KernelSpec& spec, double x1, double x2);

GramMatrix gram(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);
GramMatrix gram(const KernelSpec& spec, std::span<const double> x);

}  // namespace mrlgp

#endif
