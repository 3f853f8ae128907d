#include "tdn/tensor_ops.hpp"

#include <algorithm>
#include <cmath>

namespace tdn {

double frobenius_norm(const DenseTensor& T) {
    double acc = 0.0;
    for (double v : T.values()) acc += v * v;
    return std::sqrt(acc);
}

double inner_product(const DenseTensor& T, const DenseTensor& S) {
    if (!same_shape(T, S)) throw std::invalid_argument("inner_product: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < T.size(); ++i) acc += T[i] * S[i];
    return acc;
}

std::vector<std::size_t> inverse_permutation(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
    return inv;
}

std::vector<std::size_t> cyclic_front_permutation(std::size_t order, std::size_t mode) {
    std::vector<std::size_t> q(order);
    for (std::size_t k = 0; k < order; ++k) q[k] = (mode + k) % order;
    return q;
}

namespace {

void check_permutation(const std::vector<std::size_t>& perm, std::size_t order) {
    if (perm.size() != order) throw std::invalid_argument("transpose_q: permutation length mismatch");
    std::vector<bool> seen(order, false);
    for (std::size_t p : perm) {
        if (p >= order || seen[p]) throw std::invalid_argument("transpose_q: not a permutation");
        seen[p] = true;
    }
}

}  // namespace

DenseTensor transpose_q(const DenseTensor& T, const std::vector<std::size_t>& perm) {
    const std::size_t d = T.order();
    check_permutation(perm, d);

    std::vector<std::size_t> out_shape(d);
    for (std::size_t k = 0; k < d; ++k) out_shape[k] = T.shape()[perm[k]];

    const std::vector<std::size_t> in_strides = strides_of(T.shape());
    // Walking the output in linear order, digit k of the output index moves
    // the input offset by in_strides[perm[k]].
    std::vector<std::size_t> step(d);
    for (std::size_t k = 0; k < d; ++k) step[k] = in_strides[perm[k]];

    std::vector<double> out(T.size());
    std::vector<std::size_t> digit(d, 0);
    std::size_t in_lin = 0;
    for (std::size_t o = 0; o < out.size(); ++o) {
        out[o] = T[in_lin];
        for (std::size_t k = 0; k < d; ++k) {
            if (++digit[k] < out_shape[k]) {
                in_lin += step[k];
                break;
            }
            digit[k] = 0;
            in_lin -= step[k] * (out_shape[k] - 1);
        }
    }
    return DenseTensor(std::move(out_shape), std::move(out));
}

Matrix flatten(const DenseTensor& T, std::size_t mode) {
    const std::size_t d = T.order();
    if (mode >= d) throw std::invalid_argument("flatten: invalid mode");
    const std::size_t rows = T.shape()[mode];
    const std::size_t cols = T.size() / rows;

    const std::vector<std::size_t> strides = strides_of(T.shape());
    const std::size_t row_stride = strides[mode];

    Matrix M(rows, cols);
    // Odometer over the remaining modes in cyclic order (mode+1, ..., mode-1),
    // first-listed fastest; tracks the base input offset per column.
    std::vector<std::size_t> rem_extent(d - 1), rem_step(d - 1), digit(d - 1, 0);
    for (std::size_t k = 0; k + 1 < d; ++k) {
        std::size_t m = (mode + 1 + k) % d;
        rem_extent[k] = T.shape()[m];
        rem_step[k] = strides[m];
    }
    std::size_t base = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        const double* src = T.values().data() + base;
        for (std::size_t r = 0; r < rows; ++r) M(r, c) = src[r * row_stride];
        for (std::size_t k = 0; k + 1 < d; ++k) {
            if (++digit[k] < rem_extent[k]) {
                base += rem_step[k];
                break;
            }
            digit[k] = 0;
            base -= rem_step[k] * (rem_extent[k] - 1);
        }
    }
    return M;
}

DenseTensor fold(const Matrix& M, const std::vector<std::size_t>& shape, std::size_t mode) {
    const std::size_t d = shape.size();
    if (mode >= d) throw std::invalid_argument("fold: invalid mode");
    const std::size_t n = DenseTensor::checked_element_count(shape);
    const std::size_t rows = shape[mode];
    if (static_cast<std::size_t>(M.rows()) != rows || static_cast<std::size_t>(M.cols()) != n / rows)
        throw std::invalid_argument("fold: matrix dimensions incompatible with shape/mode");

    const std::vector<std::size_t> strides = strides_of(shape);
    const std::size_t row_stride = strides[mode];

    std::vector<double> out(n);
    std::vector<std::size_t> rem_extent(d - 1), rem_step(d - 1), digit(d - 1, 0);
    for (std::size_t k = 0; k + 1 < d; ++k) {
        std::size_t m = (mode + 1 + k) % d;
        rem_extent[k] = shape[m];
        rem_step[k] = strides[m];
    }
    std::size_t base = 0;
    const std::size_t cols = n / rows;
    for (std::size_t c = 0; c < cols; ++c) {
        double* dst = out.data() + base;
        for (std::size_t r = 0; r < rows; ++r) dst[r * row_stride] = M(r, c);
        for (std::size_t k = 0; k + 1 < d; ++k) {
            if (++digit[k] < rem_extent[k]) {
                base += rem_step[k];
                break;
            }
            digit[k] = 0;
            base -= rem_step[k] * (rem_extent[k] - 1);
        }
    }
    return DenseTensor(shape, std::move(out));
}

DenseTensor n_mode_product(const DenseTensor& T, const Matrix& A, std::size_t mode) {
    if (mode >= T.order()) throw std::invalid_argument("n_mode_product: invalid mode");
    if (static_cast<std::size_t>(A.cols()) != T.shape()[mode])
        throw std::invalid_argument("n_mode_product: matrix columns do not match mode extent");
    Matrix G = A * flatten(T, mode);
    std::vector<std::size_t> out_shape = T.shape();
    out_shape[mode] = static_cast<std::size_t>(A.rows());
    return fold(G, out_shape, mode);
}

Matrix kronecker(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

DenseTensor outer_product(const DenseTensor& T, const DenseTensor& S) {
    std::vector<std::size_t> shape = T.shape();
    shape.insert(shape.end(), S.shape().begin(), S.shape().end());
    std::vector<double> out(T.size() * S.size());
    std::size_t o = 0;
    for (std::size_t j = 0; j < S.size(); ++j) {
        const double sj = S[j];
        for (std::size_t i = 0; i < T.size(); ++i) out[o++] = T[i] * sj;
    }
    return DenseTensor(std::move(shape), std::move(out));
}

DenseTensor rank_one(double weight, const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) throw std::invalid_argument("rank_one: no vectors");
    DenseTensor acc({vectors[0].size()}, vectors[0]);
    for (std::size_t m = 1; m < vectors.size(); ++m)
        acc = outer_product(acc, DenseTensor({vectors[m].size()}, vectors[m]));
    return weight * acc;
}

}  // namespace tdn
