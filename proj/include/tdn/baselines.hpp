#pragma once

#include <cstdint>
#include <vector>

#include "tdn/denoise.hpp"
#include "tdn/linalg.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

/// CP model: sum_i weights[i] * factors[0].col(i) o ... o factors[d-1].col(i),
/// factor columns unit-norm.
struct CpModel {
    std::vector<double> weights;
    std::vector<Matrix> factors;
    std::vector<double> fit_trace;  // fit = 1 - ||T - rec|| / ||T|| per iteration
    int iterations = 0;
    bool converged = false;

    DenseTensor reconstruct(const std::vector<std::size_t>& shape) const;
};

/// Tucker model: core x_1 U_1 ... x_d U_d with orthonormal factor columns.
struct TuckerModel {
    DenseTensor core;
    std::vector<Matrix> factors;
    std::vector<double> error_trace;  // relative reconstruction error per iteration
    int iterations = 0;
    bool converged = false;

    DenseTensor reconstruct() const;
};

/// Mode filters of the multiway Wiener filter and the stage count reached.
struct WienerState {
    std::vector<Matrix> filters;  // H_n, p_n x p_n symmetric
    int stage = 0;
};

/// CP decomposition by alternating least squares. Least-squares solves go
/// through the pseudo-inverse of the Khatri-Rao Gram system; factors are
/// initialized from leading left singular vectors of the flattenings, with
/// seeded random columns when r exceeds an extent.
CpModel cp_als(const DenseTensor& T, int rank, double tol = 1e-4, int max_iter = 50,
               std::uint64_t rng_seed = 0);

/// Higher-order orthogonal iteration with truncated-HOSVD initialization.
TuckerModel hooi(const DenseTensor& T, const std::vector<std::size_t>& ranks, double tol = 1e-4,
                 int max_iter = 50);

enum class SweepMethod { cp, hooi };
enum class SweepSelection { oracle, literal };

/// Run the decomposition for r = 1..min(p_i) and keep the candidate closest to
/// the noisy input (literal) or to the supplied clean tensor (oracle).
/// rank_statistic of the outcome is the chosen rank.
DenoiseOutcome rank_sweep(const DenseTensor& T, SweepMethod method, SweepSelection selection,
                          const DenseTensor* clean = nullptr, double tol = 1e-4, int max_iter = 50,
                          std::uint64_t rng_seed = 0);

/// Akaike-information-criterion order selection on a non-increasing eigenvalue
/// spectrum: K = argmin_{1<=k<=p-1} -2*n*(p-k)*log(g_k/a_k) + 2k(2p-k) with
/// g_k/a_k the geometric/arithmetic means of the p-k smallest eigenvalues.
int aic_subspace_dim(const std::vector<double>& eigvals, std::size_t n_samples);

/// Multiway Wiener filter with per-mode signal subspaces chosen by AIC.
/// Filters are refined stage by stage, ALS style, until the denoised tensor
/// stabilizes. Pass `state` to retrieve the final filters.
DenoiseOutcome multiway_wiener(const DenseTensor& T, int max_stages = 10, double tol = 1e-4,
                               WienerState* state = nullptr);

}  // namespace tdn
