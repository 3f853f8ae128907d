#pragma once

#include <optional>
#include <vector>

#include "tdn/amplification.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

/// Result of a denoising run: denoised + residual = input to machine
/// precision, components (when present) sum to the denoised tensor.
struct DenoiseOutcome {
    DenseTensor denoised;
    DenseTensor residual;
    std::vector<DenseTensor> components;
    std::optional<double> rank_statistic;  // ssrk / sxrk / chosen sweep rank
    int iterations = 0;
    bool converged = false;
    /// One entry per sweep for the proximal methods:
    /// 0.5*||T - sum S||^2 + lambda * sum_j ||(S_j)_(j)||_*.
    std::vector<double> objective_trace;
};

struct StableRankConfig {
    double lambda = 1.0;   // soft-threshold level / cutoff scale, > 0
    double acc = 0.95;     // convergence accuracy in (0, 1]
    int max_sweeps = 200;  // safety bound; non-convergence is reported, not thrown

    void validate() const;
};

/// Amplification-based deflation: repeatedly amplify the residual with the
/// map, normalize, peel the projection onto the amplified direction, and stop
/// once the residual norm drops below tau * ||T|| or max_components pieces
/// have been removed. tau = 1 peels exactly one component.
DenoiseOutcome denoise_amplification(const DenseTensor& T, const AmplificationMap& map, int m,
                                     double tau = 1.0, int max_components = 64);

/// Stable SliceRank denoising: block-coordinate sweeps that soft-threshold the
/// singular values of each mode flattening at lambda. rank_statistic is ssrk.
DenoiseOutcome denoise_slicerank(const DenseTensor& T, const StableRankConfig& cfg);

/// Nuclear-norm cutoff selection for XRank. f must be non-negative and sorted
/// non-increasing. Returns t_k minimizing the penalized shrinkage objective;
/// ties break to the smallest index.
double find_cutoff(const std::vector<double>& f, double lambda);

/// Stable XRank denoising: same sweep structure as SliceRank with the
/// per-mode threshold chosen by find_cutoff. rank_statistic is sxrk.
DenoiseOutcome denoise_xrank(const DenseTensor& T, const StableRankConfig& cfg);

}  // namespace tdn
