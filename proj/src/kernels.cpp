#include "mrlgp/kernels.hpp"

#include <cmath>

#include "mrlgp/errors.hpp"

namespace mrlgp {

double GibbsLengthTable::at(double x) const {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (x <= cuts[i]) return values[i];
    }
    return values.back();
}

KernelSpec KernelSpec::squared_exponential(double mu, double len) {
    if (mu < 0.0) throw ParameterError("squared_exponential: output scale must be >= 0");
    if (!(len > 0.0)) throw ParameterError("squared_exponential: input scale must be > 0");
    KernelSpec k;
    k.family_ = KernelFamily::squared_exponential;
    k.mu_ = mu;
    k.len_ = len;
    return k;
}

KernelSpec KernelSpec::gibbs(GibbsLengthTable table, double mu) {
    if (table.values.size() != table.cuts.size() + 1)
        throw ParameterError("gibbs: length table needs cuts.size()+1 values");
    for (std::size_t i = 1; i < table.cuts.size(); ++i) {
        if (!(table.cuts[i] > table.cuts[i - 1]))
            throw ParameterError("gibbs: length table cuts must be strictly increasing");
    }
    for (double v : table.values) {
        if (!(v > 0.0)) throw ParameterError("gibbs: length scales must be > 0");
    }
    if (mu < 0.0) throw ParameterError("gibbs: output scale must be >= 0");
    KernelSpec k;
    k.family_ = KernelFamily::gibbs;
    k.mu_ = mu;
    k.table_ = std::move(table);
    return k;
}

KernelSpec KernelSpec::constant(double mu) {
    if (mu < 0.0) throw ParameterError("constant: output scale must be >= 0");
    KernelSpec k;
    k.family_ = KernelFamily::constant;
    k.mu_ = mu;
    return k;
}

KernelSpec KernelSpec::zero() {
    KernelSpec k;
    k.family_ = KernelFamily::zero;
    return k;
}

KernelSpec KernelSpec::white_noise(double sigma2) {
    if (sigma2 < 0.0) throw ParameterError("white_noise: variance must be >= 0");
    KernelSpec k;
    k.family_ = KernelFamily::white_noise;
    k.noise_var_ = sigma2;
    return k;
}

bool KernelSpec::supports_derivatives() const {
    switch (family_) {
        case KernelFamily::squared_exponential:
        case KernelFamily::gibbs:
        case KernelFamily::constant:
        case KernelFamily::zero:
            return true;
        case KernelFamily::white_noise:
            return false;
    }
    return false;
}

double eval(const KernelSpec& spec, double x1, double x2) {
    switch (spec.family()) {
        case KernelFamily::squared_exponential: {
            const double d = x1 - x2;
            const double l = spec.input_scale();
            return spec.output_scale() * std::exp(-d * d / (l * l));
        }
        case KernelFamily::gibbs: {
            const double la = spec.length_table().at(x1);
            const double lb = spec.length_table().at(x2);
            const double s = la * la + lb * lb;
            const double d = x1 - x2;
            return spec.output_scale() * std::sqrt(2.0 * la * lb / s) * std::exp(-d * d / s);
        }
        case KernelFamily::constant:
            return spec.output_scale();
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::white_noise:
            return x1 == x2 ? spec.noise_var() : 0.0;
    }
    return 0.0;
}

double eval_d1(const KernelSpec& spec, double x1, double x2) {
    switch (spec.family()) {
        case KernelFamily::squared_exponential: {
            const double d = x1 - x2;
            const double l2 = spec.input_scale() * spec.input_scale();
            return spec.output_scale() * std::exp(-d * d / l2) * (-2.0 * d / l2);
        }
        case KernelFamily::gibbs: {
            // l(x) is locally constant, so only the exponential varies
            const double la = spec.length_table().at(x1);
            const double lb = spec.length_table().at(x2);
            const double s = la * la + lb * lb;
            const double d = x1 - x2;
            return spec.output_scale() * std::sqrt(2.0 * la * lb / s) * std::exp(-d * d / s) *
                   (-2.0 * d / s);
        }
        case KernelFamily::constant:
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::white_noise:
            throw UnsupportedError("white_noise kernel has no analytic derivatives");
    }
    return 0.0;
}

double eval_d12(const KernelSpec& spec, double x1, double x2) {
    switch (spec.family()) {
        case KernelFamily::squared_exponential: {
            const double d = x1 - x2;
            const double l2 = spec.input_scale() * spec.input_scale();
            return spec.output_scale() * (2.0 / l2) * std::exp(-d * d / l2) *
                   (1.0 - 2.0 * d * d / l2);
        }
        case KernelFamily::gibbs: {
            const double la = spec.length_table().at(x1);
            const double lb = spec.length_table().at(x2);
            const double s = la * la + lb * lb;
            const double d = x1 - x2;
            return spec.output_scale() * std::sqrt(2.0 * la * lb / s) * (2.0 / s) *
                   std::exp(-d * d / s) * (1.0 - 2.0 * d * d / s);
        }
        case KernelFamily::constant:
        case KernelFamily::zero:
            return 0.0;
        case KernelFamily::white_noise:
            throw UnsupportedError("white_noise kernel has no analytic derivatives");
    }
    return 0.0;
}

GramMatrix gram(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    GramMatrix g;
    g.values.resize(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(y.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                eval(spec, x[i], y[j]);
    g.row_points.assign(x.begin(), x.end());
    g.col_points.assign(y.begin(), y.end());
    return g;
}

GramMatrix gram(const KernelSpec& spec, std::span<const double> x) { return gram(spec, x, x); }

}  // namespace mrlgp
