#ifndef MRLGP_LINALG_HPP
#define MRLGP_LINALG_HPP

#include <Eigen/Dense>

#include "mrlgp/rng.hpp"

namespace mrlgp {

// Cholesky factorization of a symmetric PSD matrix with the library-wide
// jitter policy: try as-is, then add 1e-10*mean(diag) to the diagonal,
// escalating by x10 up to 1e-6*mean(diag) before giving up.
class SpdFactor {
public:
    // throws NumericError when the matrix cannot be factorized
    explicit SpdFactor(Eigen::MatrixXd k);

    double jitter() const { return jitter_; }
    const Eigen::LLT<Eigen::MatrixXd>& llt() const { return llt_; }

    template <typename Derived>
    auto solve(const Eigen::MatrixBase<Derived>& b) const {
        return llt_.solve(b).eval();
    }

    // log det of the factorized matrix
    double log_det() const;

private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double jitter_ = 0.0;
};

// Moore-Penrose pseudo-inverse for the small boundary blocks (<= 4x4 in
// practice).  Singular values below rcond*max are treated as zero, so a
// zero matrix maps to a zero inverse (G == 0 convention for degenerate
// boundary covariances).
Eigen::MatrixXd pinv(const Eigen::MatrixXd& m, double rcond = 1e-13);

// One draw from N(0, K) for PSD (possibly singular) K.  Rows whose diagonal
// is exactly zero stay exactly zero; the rest go through an eigendecomposition
// with negative eigenvalues clamped to zero.
Eigen::VectorXd sample_gaussian(const Eigen::MatrixXd& k, Rng& rng);

// log(sum(exp(v))) computed stably
double log_sum_exp(const Eigen::VectorXd& v);

}  // namespace mrlgp

#endif
