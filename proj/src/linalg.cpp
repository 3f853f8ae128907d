#include "tdn/linalg.hpp"

namespace tdn {

SvdFactors svd(const Matrix& M) {
    if (!M.allFinite()) throw std::invalid_argument("svd: non-finite entries");
    if (M.rows() == 0 || M.cols() == 0) throw std::invalid_argument("svd: empty matrix");
    Eigen::BDCSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success)
        throw std::runtime_error("svd: bidiagonalization did not converge");
    return SvdFactors{dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

double matrix_spectral_norm(const Matrix& M) {
    SvdFactors f = svd(M);
    return f.s.size() > 0 ? f.s(0) : 0.0;
}

double matrix_nuclear_norm(const Matrix& M) {
    return svd(M).s.sum();
}

Matrix pinv(const Matrix& M, double rel_tol) {
    SvdFactors f = svd(M);
    double cutoff = rel_tol * (f.s.size() > 0 ? f.s(0) : 0.0);
    Vector inv = f.s;
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        inv(i) = f.s(i) > cutoff ? 1.0 / f.s(i) : 0.0;
    return f.V * inv.asDiagonal() * f.U.transpose();
}

}  // namespace tdn
