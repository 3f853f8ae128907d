#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace tdn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD M = U * diag(s) * V^T with singular values non-increasing.
struct SvdFactors {
    Matrix U;
    Vector s;
    Matrix V;
};

/// Thin SVD via Eigen's divide-and-conquer bidiagonalization. Throws on
/// non-convergence instead of returning garbage factors.
SvdFactors svd(const Matrix& M);

/// Largest singular value.
double matrix_spectral_norm(const Matrix& M);

/// Sum of singular values.
double matrix_nuclear_norm(const Matrix& M);

/// Moore-Penrose pseudo-inverse with relative tolerance on singular values.
Matrix pinv(const Matrix& M, double rel_tol = 1e-12);

}  // namespace tdn
