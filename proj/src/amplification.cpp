#include "tdn/amplification.hpp"

#include <algorithm>
#include <cmath>

#include "tdn/linalg.hpp"

namespace tdn {

namespace {

// Order-3 contraction with the tensor's first mode as the index shared by the
// second and third factors: with F = flatten(T, 0) (a x bc, columns (j,k)
// with j fastest),
//   C[(j,k),(j',k')] = sum_i T[i,j,k] T[i,j',k']           (C = F^T F)
//   D[(j2,k2),(j1,k1)] = C[(j1,k2),(j2,k1)]
//   Phi_(0) = F * D.
DenseTensor phi3_front(const DenseTensor& T) {
    const std::size_t b = T.shape()[1], c = T.shape()[2];
    const std::size_t bc = b * c;
    Matrix F = flatten(T, 0);
    Matrix C = F.transpose() * F;
    Matrix D(bc, bc);
    for (std::size_t k1 = 0; k1 < c; ++k1)
        for (std::size_t j1 = 0; j1 < b; ++j1)
            for (std::size_t k2 = 0; k2 < c; ++k2)
                for (std::size_t j2 = 0; j2 < b; ++j2)
                    D(j2 + b * k2, j1 + b * k1) = C(j1 + b * k2, j2 + b * k1);
    Matrix G = F * D;
    return fold(G, T.shape(), 0);
}

// The contraction is equivariant under cyclic mode rotation, so rotate the
// largest mode to the front to keep the (N/p)^2 intermediate small.
DenseTensor phi3(const DenseTensor& T) {
    std::size_t big = 0;
    for (std::size_t m = 1; m < 3; ++m)
        if (T.shape()[m] > T.shape()[big]) big = m;
    if (big == 0) return phi3_front(T);
    auto q = cyclic_front_permutation(3, big);
    DenseTensor rotated = transpose_q(T, q);
    DenseTensor amped = phi3_front(rotated);
    return transpose_q(amped, inverse_permutation(q));
}

// Order 4 reduces to order 3 by merging the last two modes, which the
// first-index-fastest layout makes a pure reinterpretation.
DenseTensor phi4(const DenseTensor& T) {
    const auto& s = T.shape();
    DenseTensor merged({s[0], s[1], s[2] * s[3]}, T.values());
    DenseTensor amped = phi3(merged);
    return DenseTensor(s, std::move(amped.values()));
}

}  // namespace

DenseTensor phi_sigma4(const DenseTensor& T) {
    switch (T.order()) {
        case 3: return phi3(T);
        case 4: return phi4(T);
        default:
            throw std::invalid_argument("phi_sigma4: unsupported order " + std::to_string(T.order()));
    }
}

const AmplificationMap& phi_sigma4_map() {
    static const AmplificationMap map{"phi_sigma4", {3, 4}, [](const DenseTensor& T) { return phi_sigma4(T); }};
    return map;
}

DenseTensor amplify(const DenseTensor& T, const AmplificationMap& map, int m) {
    if (!map.supports(T.order()))
        throw std::invalid_argument("amplify: map '" + map.name + "' does not support order " +
                                    std::to_string(T.order()));
    if (m < 1) throw std::invalid_argument("amplify: m must be >= 1");
    DenseTensor out = T;
    for (int step = 0; step < m; ++step) {
        // The tensor constructor rejects non-finite entries; report that as
        // the magnitude overflow it is.
        try {
            out = map.evaluator(out);
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("amplify: magnitude overflow to non-finite values at step " +
                                     std::to_string(step + 1));
        }
    }
    return out;
}

std::vector<double> flattening_nuclear_norms(const DenseTensor& T) {
    std::vector<double> norms(T.order());
    for (std::size_t mode = 0; mode < T.order(); ++mode)
        norms[mode] = matrix_nuclear_norm(flatten(T, mode));
    return norms;
}

double stable_slice_rank_value(const DenseTensor& T) {
    double nrm = frobenius_norm(T);
    if (nrm == 0.0) throw std::invalid_argument("stable_slice_rank_value: zero tensor");
    double acc = 0.0;
    for (double v : flattening_nuclear_norms(T)) acc += v * v;
    return acc / (nrm * nrm);
}

}  // namespace tdn
