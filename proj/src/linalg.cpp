#include "mrlgp/linalg.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "mrlgp/errors.hpp"

namespace mrlgp {

SpdFactor::SpdFactor(Eigen::MatrixXd k) {
    if (k.rows() != k.cols()) throw ParameterError("SpdFactor: matrix must be square");
    llt_.compute(k);
    if (llt_.info() == Eigen::Success) return;

    const double scale = k.diagonal().mean();
    if (scale > 0.0) {
        for (double rel = 1e-10; rel <= 1.0000001e-6; rel *= 10.0) {
            const double j = rel * scale;
            llt_.compute(k + j * Eigen::MatrixXd::Identity(k.rows(), k.cols()));
            if (llt_.info() == Eigen::Success) {
                jitter_ = j;
                return;
            }
        }
    }
    throw NumericError("Cholesky factorization failed after jitter escalation");
}

double SpdFactor::log_det() const {
    return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rcond) {
    if (m.size() == 0) return m;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = rcond * (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& k, Rng& rng) {
    const Eigen::Index n = k.rows();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);

    std::vector<Eigen::Index> live;
    live.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (k(i, i) != 0.0) live.push_back(i);
    }
    if (live.empty()) return out;

    Eigen::MatrixXd sub(live.size(), live.size());
    for (std::size_t a = 0; a < live.size(); ++a)
        for (std::size_t b = 0; b < live.size(); ++b)
            sub(a, b) = k(live[a], live[b]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed in sample_gaussian");

    Eigen::VectorXd z(static_cast<Eigen::Index>(live.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();

    Eigen::VectorXd scaled = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * z;
    Eigen::VectorXd draw = es.eigenvectors() * scaled;
    for (std::size_t a = 0; a < live.size(); ++a) out(live[a]) = draw(static_cast<Eigen::Index>(a));
    return out;
}

double log_sum_exp(const Eigen::VectorXd& v) {
    if (v.size() == 0) return -std::numeric_limits<double>::infinity();
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::exp(v(i) - m);
    return m + std::log(s);
}

}  // namespace mrlgp
