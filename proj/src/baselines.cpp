#include "tdn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tdn/rng.hpp"
#include "tdn/tensor_ops.hpp"

namespace tdn {

namespace {

// Khatri-Rao product over the non-`mode` factors, arranged so that the rows
// enumerate the cyclic flattening columns (mode+1, ..., mode-1, first listed
// fastest): the chain is built slowest-first and each column is
// kron(accumulated, next) with the right factor's index fastest.
Matrix khatri_rao_others(const std::vector<Matrix>& factors, std::size_t mode) {
    const std::size_t d = factors.size();
    std::vector<std::size_t> order;  // slowest to fastest
    for (std::size_t k = d - 1; k >= 1; --k) order.push_back((mode + k) % d);
    Matrix W = factors[order[0]];
    for (std::size_t k = 1; k < order.size(); ++k) {
        const Matrix& B = factors[order[k]];
        Matrix next(W.rows() * B.rows(), W.cols());
        for (Eigen::Index r = 0; r < W.cols(); ++r)
            for (Eigen::Index i = 0; i < W.rows(); ++i)
                next.block(i * B.rows(), r, B.rows(), 1) = W(i, r) * B.col(r);
        W = std::move(next);
    }
    return W;
}

// Leading `count` left singular vectors. When the matrix offers fewer
// directions than requested, the remainder is filled with seeded random unit
// columns (rank can exceed the extents in CP models).
Matrix leading_left_singular_padded(const Matrix& M, std::size_t count, Rng& rng) {
    SvdFactors f = svd(M);
    const std::size_t avail = std::min<std::size_t>(f.U.cols(), count);
    Matrix U(M.rows(), count);
    U.leftCols(avail) = f.U.leftCols(avail);
    for (std::size_t c = avail; c < count; ++c) {
        Vector v(M.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
        double n = v.norm();
        U.col(c) = n > 0 ? (v / n).eval() : v;
    }
    return U;
}

// Leading `count` (<= rows) left singular vectors, Gram-Schmidt-completed to
// an orthonormal set when the thin SVD is short of columns.
Matrix leading_left_singular_orthonormal(const Matrix& M, std::size_t count) {
    SvdFactors f = svd(M);
    const std::size_t rows = static_cast<std::size_t>(M.rows());
    if (count > rows)
        throw std::invalid_argument("leading_left_singular_orthonormal: count exceeds rows");
    std::size_t avail = std::min<std::size_t>(f.U.cols(), count);
    Matrix U(M.rows(), count);
    U.leftCols(avail) = f.U.leftCols(avail);
    std::size_t filled = avail;
    for (std::size_t basis = 0; basis < rows && filled < count; ++basis) {
        Vector v = Vector::Zero(M.rows());
        v(static_cast<Eigen::Index>(basis)) = 1.0;
        for (std::size_t c = 0; c < filled; ++c) v -= U.col(c).dot(v) * U.col(c);
        double n = v.norm();
        if (n > 1e-8) {
            U.col(filled++) = v / n;
        }
    }
    if (filled < count)
        throw std::runtime_error("leading_left_singular_orthonormal: completion failed");
    return U;
}

}  // namespace

DenseTensor CpModel::reconstruct(const std::vector<std::size_t>& shape) const {
    DenseTensor out = DenseTensor::zeros(shape);
    const std::size_t d = factors.size();
    for (std::size_t r = 0; r < weights.size(); ++r) {
        std::vector<std::vector<double>> vecs(d);
        for (std::size_t m = 0; m < d; ++m) {
            vecs[m].resize(shape[m]);
            for (std::size_t i = 0; i < shape[m]; ++i) vecs[m][i] = factors[m](i, r);
        }
        out = out + rank_one(weights[r], vecs);
    }
    return out;
}

CpModel cp_als(const DenseTensor& T, int rank, double tol, int max_iter, std::uint64_t rng_seed) {
    if (rank < 1) throw std::invalid_argument("cp_als: rank must be >= 1");
    const std::size_t d = T.order();
    if (d < 2) throw std::invalid_argument("cp_als: order must be >= 2");
    const std::size_t r = static_cast<std::size_t>(rank);
    const double norm_T = frobenius_norm(T);

    CpModel model;
    model.weights.assign(r, 0.0);
    model.factors.resize(d);

    if (norm_T == 0.0) {
        // Degenerate input: zero weights with canonical unit columns.
        for (std::size_t m = 0; m < d; ++m) {
            Matrix U = Matrix::Zero(T.shape()[m], r);
            for (std::size_t c = 0; c < r; ++c) U(c % T.shape()[m], c) = 1.0;
            model.factors[m] = U;
        }
        model.converged = true;
        return model;
    }

    Rng rng(derive_seed(rng_seed, 0x6370616c73ULL));
    for (std::size_t m = 0; m < d; ++m)
        model.factors[m] = leading_left_singular_padded(flatten(T, m), r, rng);

    std::vector<Matrix> flats(d);
    for (std::size_t m = 0; m < d; ++m) flats[m] = flatten(T, m);

    double fit_prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t m = 0; m < d; ++m) {
            Matrix W = khatri_rao_others(model.factors, m);
            // Gram of the Khatri-Rao product is the Hadamard product of the
            // factor Grams.
            Matrix G = Matrix::Ones(r, r);
            for (std::size_t k = 0; k < d; ++k) {
                if (k == m) continue;
                G = G.cwiseProduct((model.factors[k].transpose() * model.factors[k]).eval());
            }
            Matrix U = flats[m] * W * pinv(G);
            for (std::size_t c = 0; c < r; ++c) {
                double n = U.col(c).norm();
                if (n > 0) {
                    model.weights[c] = n;
                    U.col(c) /= n;
                } else {
                    model.weights[c] = 0.0;
                    U.col(c).setZero();
                    U(c % U.rows(), c) = 1.0;
                }
            }
            model.factors[m] = std::move(U);
        }
        double err = frobenius_norm(T - model.reconstruct(T.shape()));
        double fit = 1.0 - err / norm_T;
        model.fit_trace.push_back(fit);
        model.iterations = it + 1;
        if (it > 0 && std::abs(fit - fit_prev) < tol) {
            model.converged = true;
            break;
        }
        fit_prev = fit;
    }
    return model;
}

DenseTensor TuckerModel::reconstruct() const {
    DenseTensor out = core;
    for (std::size_t m = 0; m < factors.size(); ++m) out = n_mode_product(out, factors[m], m);
    return out;
}

TuckerModel hooi(const DenseTensor& T, const std::vector<std::size_t>& ranks, double tol,
                 int max_iter) {
    const std::size_t d = T.order();
    if (ranks.size() != d) throw std::invalid_argument("hooi: rank list length mismatch");
    for (std::size_t m = 0; m < d; ++m)
        if (ranks[m] < 1 || ranks[m] > T.shape()[m])
            throw std::invalid_argument("hooi: rank out of range for mode " + std::to_string(m));

    TuckerModel model{DenseTensor::zeros(std::vector<std::size_t>(ranks)), {}, {}, 0, false};
    model.factors.resize(d);
    for (std::size_t m = 0; m < d; ++m)
        model.factors[m] = leading_left_singular_orthonormal(flatten(T, m), ranks[m]);

    const double norm_T = frobenius_norm(T);
    double err_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        for (std::size_t m = 0; m < d; ++m) {
            DenseTensor Y = T;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == m) continue;
                Y = n_mode_product(Y, model.factors[k].transpose(), k);
            }
            model.factors[m] = leading_left_singular_orthonormal(flatten(Y, m), ranks[m]);
        }
        DenseTensor core = T;
        for (std::size_t m = 0; m < d; ++m)
            core = n_mode_product(core, model.factors[m].transpose(), m);
        model.core = core;
        double err = norm_T > 0 ? frobenius_norm(T - model.reconstruct()) / norm_T : 0.0;
        model.error_trace.push_back(err);
        model.iterations = it + 1;
        if (std::abs(err_prev - err) < tol) {
            model.converged = true;
            break;
        }
        err_prev = err;
    }
    return model;
}

DenoiseOutcome rank_sweep(const DenseTensor& T, SweepMethod method, SweepSelection selection,
                          const DenseTensor* clean, double tol, int max_iter,
                          std::uint64_t rng_seed) {
    if (selection == SweepSelection::oracle && clean == nullptr)
        throw std::invalid_argument("rank_sweep: oracle selection requires the clean tensor");
    if (clean != nullptr && !same_shape(*clean, T))
        throw std::invalid_argument("rank_sweep: clean tensor shape mismatch");

    std::size_t r_max = *std::min_element(T.shape().begin(), T.shape().end());
    const DenseTensor& reference = selection == SweepSelection::oracle ? *clean : T;

    DenoiseOutcome best{DenseTensor::zeros(T.shape()), T, {}, std::nullopt, 0, false, {}};
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r <= r_max; ++r) {
        DenseTensor rec = DenseTensor::zeros(T.shape());
        int iters = 0;
        bool conv = false;
        if (method == SweepMethod::cp) {
            CpModel m = cp_als(T, static_cast<int>(r), tol, max_iter, rng_seed);
            rec = m.reconstruct(T.shape());
            iters = m.iterations;
            conv = m.converged;
        } else {
            TuckerModel m = hooi(T, std::vector<std::size_t>(T.order(), r), tol, max_iter);
            rec = m.reconstruct();
            iters = m.iterations;
            conv = m.converged;
        }
        double err = frobenius_norm(reference - rec);
        if (err < best_err) {
            best_err = err;
            best.denoised = std::move(rec);
            best.rank_statistic = static_cast<double>(r);
            best.iterations = iters;
            best.converged = conv;
        }
    }
    best.residual = T - best.denoised;
    return best;
}

int aic_subspace_dim(const std::vector<double>& eigvals, std::size_t n_samples) {
    const std::size_t p = eigvals.size();
    if (p < 2) throw std::invalid_argument("aic_subspace_dim: need at least two eigenvalues");
    if (n_samples == 0) throw std::invalid_argument("aic_subspace_dim: n_samples must be positive");

    std::vector<double> ev(eigvals);
    for (double& v : ev) {
        if (v < 0.0) v = 0.0;  // clamp numerical negatives from symmetric eig
    }

    int best_k = 1;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= p - 1; ++k) {
        const std::size_t q = p - k;  // noise eigenvalue count
        double arith = 0.0;
        std::size_t zeros = 0;
        double log_geo = 0.0;
        for (std::size_t i = k; i < p; ++i) {
            arith += ev[i];
            if (ev[i] > 0.0)
                log_geo += std::log(ev[i]);
            else
                ++zeros;
        }
        arith /= static_cast<double>(q);

        double log_ratio;  // log(g_k / a_k) <= 0
        if (arith == 0.0) {
            log_ratio = 0.0;  // all noise eigenvalues zero: perfectly flat
        } else if (zeros > 0) {
            log_ratio = -std::numeric_limits<double>::infinity();
        } else {
            log_ratio = log_geo / static_cast<double>(q) - std::log(arith);
        }

        double aic = -2.0 * static_cast<double>(n_samples) * static_cast<double>(q) * log_ratio +
                     2.0 * static_cast<double>(k) * (2.0 * static_cast<double>(p) - static_cast<double>(k));
        if (aic < best_aic) {
            best_aic = aic;
            best_k = static_cast<int>(k);
        }
    }
    return best_k;
}

DenoiseOutcome multiway_wiener(const DenseTensor& T, int max_stages, double tol,
                               WienerState* state) {
    const std::size_t d = T.order();
    if (d < 2) throw std::invalid_argument("multiway_wiener: order must be >= 2");
    if (max_stages < 1) throw std::invalid_argument("multiway_wiener: max_stages must be >= 1");

    std::vector<Matrix> H(d);
    for (std::size_t m = 0; m < d; ++m) H[m] = Matrix::Identity(T.shape()[m], T.shape()[m]);

    auto apply_filters = [&](const std::vector<Matrix>& filters) {
        DenseTensor out = T;
        for (std::size_t m = 0; m < d; ++m) out = n_mode_product(out, filters[m], m);
        return out;
    };

    DenseTensor denoised = T;  // stage 0: identity filters
    int stage = 0;
    bool converged = false;
    for (; stage < max_stages; ++stage) {
        for (std::size_t n = 0; n < d; ++n) {
            const std::size_t p = T.shape()[n];
            if (p == 1) {
                H[n] = Matrix::Identity(1, 1);
                continue;
            }
            // gamma_n = T_(n) q_n T_(n)^T with q_n = kron of the other H's;
            // applied as n-mode products so the Kronecker factor is never
            // materialized and each H_i meets its own mode's index.
            DenseTensor Tq = T;
            DenseTensor TQ = T;
            for (std::size_t k = 0; k < d; ++k) {
                if (k == n) continue;
                Tq = n_mode_product(Tq, H[k], k);
                TQ = n_mode_product(TQ, (H[k].transpose() * H[k]).eval(), k);
            }
            Matrix Tn = flatten(T, n);
            Matrix gamma = flatten(Tq, n) * Tn.transpose();
            Matrix Gamma = flatten(TQ, n) * Tn.transpose();
            gamma = 0.5 * (gamma + gamma.transpose()).eval();
            Gamma = 0.5 * (Gamma + Gamma.transpose()).eval();

            Eigen::SelfAdjointEigenSolver<Matrix> eg(gamma);
            Eigen::SelfAdjointEigenSolver<Matrix> eG(Gamma);
            if (eg.info() != Eigen::Success || eG.info() != Eigen::Success)
                throw std::runtime_error("multiway_wiener: eigendecomposition failed");

            // SelfAdjointEigenSolver returns ascending order; flip.
            std::vector<double> lam_g(p), lam_G(p);
            Matrix V(p, p);
            for (std::size_t i = 0; i < p; ++i) {
                lam_g[i] = eg.eigenvalues()(static_cast<Eigen::Index>(p - 1 - i));
                lam_G[i] = eG.eigenvalues()(static_cast<Eigen::Index>(p - 1 - i));
                V.col(static_cast<Eigen::Index>(i)) =
                    eg.eigenvectors().col(static_cast<Eigen::Index>(p - 1 - i));
            }

            int K = aic_subspace_dim(lam_g, T.size() / p);
            double sigma2 = 0.0;
            for (std::size_t i = static_cast<std::size_t>(K); i < p; ++i) sigma2 += std::max(lam_g[i], 0.0);
            sigma2 /= static_cast<double>(p - static_cast<std::size_t>(K));

            Vector lam(K);
            for (int i = 0; i < K; ++i) {
                double num = std::max(lam_g[static_cast<std::size_t>(i)] - sigma2, 0.0);
                double den = std::max(lam_G[static_cast<std::size_t>(i)], 1e-12);
                lam(i) = num / den;
            }
            Matrix Vk = V.leftCols(K);
            H[n] = Vk * lam.asDiagonal() * Vk.transpose();
        }

        DenseTensor next = apply_filters(H);
        double prev_norm = frobenius_norm(denoised);
        double change = frobenius_norm(next - denoised);
        denoised = std::move(next);
        if (prev_norm > 0.0 && change / prev_norm < tol) {
            ++stage;
            converged = true;
            break;
        }
    }

    if (state != nullptr) *state = WienerState{H, stage};
    DenoiseOutcome out{denoised, T - denoised, {}, std::nullopt, stage, converged, {}};
    return out;
}

}  // namespace tdn
