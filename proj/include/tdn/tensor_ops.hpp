#pragma once

#include <cstddef>
#include <vector>

#include "tdn/linalg.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

double frobenius_norm(const DenseTensor& T);

double inner_product(const DenseTensor& T, const DenseTensor& S);

/// q-transpose (generalized permute). `perm` is a 0-based permutation of the
/// modes; the result has shape (p_{perm[0]}, ..., p_{perm[d-1]}) and
/// out[j_0,...,j_{d-1}] = in[m] with m[perm[k]] = j_k, i.e. MATLAB
/// permute(T, perm) semantics.
DenseTensor transpose_q(const DenseTensor& T, const std::vector<std::size_t>& perm);

/// Inverse of a permutation.
std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm);

/// Cyclic permutation that brings `mode` to the front: (mode, mode+1, ..., mode-1).
std::vector<std::size_t> cyclic_front_permutation(std::size_t order, std::size_t mode);

/// Mode-n flattening, p_n x (N/p_n). Columns enumerate the remaining modes in
/// cyclic order (n+1, ..., d-1, 0, ..., n-1) with the first-listed mode
/// fastest; this is the rotate-mode-to-front-then-reshape layout, so
/// flatten(T, 0) is a pure reinterpretation of the linear buffer.
Matrix flatten(const DenseTensor& T, std::size_t mode);

/// Inverse of flatten: fold(flatten(T, n), T.shape(), n) == T exactly.
DenseTensor fold(const Matrix& M, const std::vector<std::size_t>& shape, std::size_t mode);

/// n-mode product T x_n A where A has p_n columns; satisfies
/// flatten(result, n) = A * flatten(T, n).
DenseTensor n_mode_product(const DenseTensor& T, const Matrix& A, std::size_t mode);

/// Kronecker product, IK x JL block layout.
Matrix kronecker(const Matrix& A, const Matrix& B);

/// Outer product of tensors of order d and e; result has order d + e.
DenseTensor outer_product(const DenseTensor& T, const DenseTensor& S);

/// Rank-1 tensor from per-mode vectors: weight * v_0 o v_1 o ... o v_{d-1}.
DenseTensor rank_one(double weight, const std::vector<std::vector<double>>& vectors);

}  // namespace tdn
