#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tdn/rng.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

/// Multi-lead ECG recording sampled at a fixed rate.
struct EcgRecord {
    enum class Label { healthy, unhealthy, unknown };

    double sample_rate = 1000.0;
    std::vector<std::vector<double>> leads;  // exactly 12, equal lengths
    std::string id;
    Label label = Label::unknown;

    void validate() const;
    std::size_t length() const { return leads.empty() ? 0 : leads[0].size(); }
};

/// Piecewise-linear tube approximation: ||x - y||_inf <= epsilon and
/// ||D(y)||_2 minimal among tube-feasible sequences.
struct TautStringResult {
    std::vector<double> approx;      // y, same length as the input
    double epsilon = 0.0;
    std::vector<std::size_t> knots;  // interior indices where the slope changes
};

/// Taut string estimate through the tube [x - eps, x + eps] with free ends,
/// computed by the greatest-convex-minorant / least-concave-majorant funnel
/// sweep in linear time.
TautStringResult taut_string(const std::vector<double>& x, double epsilon);

/// Morphological/statistical summary of a taut-string approximation:
/// [segment count, mean |slope|, variance of slopes, residual RMS,
///  total variation of y, max |slope|]. Slopes are per sample.
std::array<double, 6> extract_features(const std::vector<double>& x, const TautStringResult& ts);

/// The five coarseness levels used for ECG tensor formation.
inline constexpr std::array<double, 5> kEcgEpsilons{0.0100, 0.1575, 0.3050, 0.4525, 0.6000};

/// Feature tensor over the first 90 s: (epsilon, feature, lead) = 5 x 6 x 12.
DenseTensor form_tensor_full(const EcgRecord& rec,
                             const std::array<double, 5>& epsilons = kEcgEpsilons);

/// Feature tensor over three consecutive 30 s windows from the start:
/// (epsilon, feature, lead, window) = 5 x 6 x 12 x 3.
DenseTensor form_tensor_windowed(const EcgRecord& rec,
                                 const std::array<double, 5>& epsilons = kEcgEpsilons);

/// Add per-lead Gaussian noise calibrated so each lead hits the target SNR.
EcgRecord add_signal_noise(const EcgRecord& rec, double snr_db, Rng& rng);

/// Text ECG container: header "sample_rate=<Hz>, leads=12, length=<n>"
/// (optionally ", id=<str>, label=<healthy|unhealthy|unknown>") followed by
/// <n> rows of 12 whitespace-separated samples.
EcgRecord read_ecg_file(const std::string& path);
void write_ecg_file(const std::string& path, const EcgRecord& rec);

/// Deterministic pulse-train test record; stands in for PTB data in demos and
/// pipeline tests.
EcgRecord make_synthetic_ecg(std::uint64_t seed, double seconds = 90.0, double sample_rate = 1000.0);

}  // namespace tdn
