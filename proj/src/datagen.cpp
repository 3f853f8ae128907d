#include "tdn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tdn/tensor_ops.hpp"

namespace tdn {

std::string to_string(Variant v) {
    return v == Variant::uniform ? "uniform" : "nonuniform";
}

Variant variant_from_string(const std::string& s) {
    if (s == "uniform") return Variant::uniform;
    if (s == "nonuniform") return Variant::nonuniform;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

namespace {

void check_spec(const SyntheticSpec& spec) {
    if (spec.order < 1) throw std::invalid_argument("SyntheticSpec: order must be >= 1");
    if (spec.rank < 1) throw std::invalid_argument("SyntheticSpec: rank must be >= 1");
    if (spec.size < 1) throw std::invalid_argument("SyntheticSpec: size must be >= 1");
}

// Weighted sum of rank-1 tensors: weights first, then per mode `rank` factor
// vectors, all N(0,1).
DenseTensor gen_from_shape(const std::vector<std::size_t>& shape, int rank, Rng& rng) {
    const std::size_t r = static_cast<std::size_t>(rank);
    std::vector<double> weights(r);
    for (double& w : weights) w = rng.normal();

    // vectors[mode][component][entry]
    std::vector<std::vector<std::vector<double>>> vecs(shape.size());
    for (std::size_t m = 0; m < shape.size(); ++m) {
        vecs[m].resize(r);
        for (std::size_t c = 0; c < r; ++c) {
            vecs[m][c].resize(shape[m]);
            for (double& x : vecs[m][c]) x = rng.normal();
        }
    }

    DenseTensor out = DenseTensor::zeros(shape);
    for (std::size_t c = 0; c < r; ++c) {
        std::vector<std::vector<double>> component(shape.size());
        for (std::size_t m = 0; m < shape.size(); ++m) component[m] = vecs[m][c];
        out = out + rank_one(weights[c], component);
    }
    return out;
}

}  // namespace

DenseTensor gen_uniform(const SyntheticSpec& spec, Rng& rng) {
    check_spec(spec);
    std::vector<std::size_t> shape(static_cast<std::size_t>(spec.order),
                                   static_cast<std::size_t>(spec.size));
    return gen_from_shape(shape, spec.rank, rng);
}

DenseTensor gen_nonuniform(const SyntheticSpec& spec, Rng& rng) {
    check_spec(spec);
    const std::size_t d = static_cast<std::size_t>(spec.order);
    // Upper stretch bound: min(500, size^order), computed in floating point to
    // dodge integer overflow for large grids.
    double pow_bound = std::pow(static_cast<double>(spec.size), static_cast<double>(spec.order));
    std::uint64_t hi = pow_bound >= 500.0 ? 500 : static_cast<std::uint64_t>(pow_bound);
    std::uint64_t lo = static_cast<std::uint64_t>(spec.size);
    if (hi < lo) hi = lo;

    std::size_t stretched_mode = static_cast<std::size_t>(rng.uniform_int(0, d - 1));
    std::size_t stretched_extent = static_cast<std::size_t>(rng.uniform_int(lo, hi));

    std::vector<std::size_t> shape(d, static_cast<std::size_t>(spec.size));
    shape[stretched_mode] = stretched_extent;
    return gen_from_shape(shape, spec.rank, rng);
}

DenseTensor gen_synthetic(const SyntheticSpec& spec, Rng& rng) {
    return spec.variant == Variant::uniform ? gen_uniform(spec, rng) : gen_nonuniform(spec, rng);
}

NoisyPair add_noise_to_snr(const DenseTensor& clean, double snr_db, Rng& rng) {
    double norm_clean = frobenius_norm(clean);
    if (norm_clean == 0.0) throw std::invalid_argument("add_noise_to_snr: zero clean tensor");

    std::vector<double> g(clean.size());
    for (double& x : g) x = rng.normal();
    DenseTensor noise(clean.shape(), std::move(g));
    double norm_noise = frobenius_norm(noise);
    if (norm_noise == 0.0) throw std::runtime_error("add_noise_to_snr: degenerate noise draw");

    double scale = norm_clean / (norm_noise * std::pow(10.0, snr_db / 20.0));
    DenseTensor scaled = scale * noise;
    DenseTensor noisy = clean + scaled;
    double realized = 20.0 * std::log10(norm_clean / frobenius_norm(scaled));
    return NoisyPair{clean, std::move(noisy), realized};
}

double measure_snr_db(const DenseTensor& reference, const DenseTensor& estimate) {
    if (!same_shape(reference, estimate))
        throw std::invalid_argument("measure_snr_db: shape mismatch");
    double norm_ref = frobenius_norm(reference);
    if (norm_ref == 0.0) throw std::invalid_argument("measure_snr_db: zero reference");
    double err = frobenius_norm(estimate - reference);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(norm_ref / err);
}

}  // namespace tdn
