#pragma once

#include <cstdint>
#include <string>

#include "tdn/rng.hpp"
#include "tdn/tensor.hpp"

namespace tdn {

enum class Variant { uniform, nonuniform };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

/// One cell of the synthetic parameter grid.
struct SyntheticSpec {
    int order = 3;          // 3 or 4
    int rank = 1;           // CP rank of the clean tensor
    int size = 5;           // extent of each mode
    double snr_db = 20.0;   // target SNR after noise injection
    Variant variant = Variant::uniform;
    std::uint64_t seed = 0;
};

/// Clean tensor plus its noise-injected counterpart; the realized SNR matches
/// the target to better than 1e-9 dB by construction.
struct NoisyPair {
    DenseTensor clean;
    DenseTensor noisy;
    double realized_snr_db = 0.0;
};

/// Sum of `rank` weighted outer products with N(0,1) weights and factor
/// vectors; shape size^order.
DenseTensor gen_uniform(const SyntheticSpec& spec, Rng& rng);

/// Same construction with one mode stretched to a uniform extent in
/// [size, min(500, size^order)].
DenseTensor gen_nonuniform(const SyntheticSpec& spec, Rng& rng);

/// Generate according to spec.variant.
DenseTensor gen_synthetic(const SyntheticSpec& spec, Rng& rng);

/// Add iid Gaussian noise scaled so the realized amplitude SNR
/// 20*log10(||clean|| / ||noise||) equals the target exactly.
NoisyPair add_noise_to_snr(const DenseTensor& clean, double snr_db, Rng& rng);

/// 20*log10(||reference|| / ||estimate - reference||); +inf when the estimate
/// is exact.
double measure_snr_db(const DenseTensor& reference, const DenseTensor& estimate);

}  // namespace tdn
