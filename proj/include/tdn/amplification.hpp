#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "tdn/tensor.hpp"
#include "tdn/tensor_ops.hpp"

namespace tdn {

/// A degree-3 polynomial map on tensors that boosts dominant rank-1
/// components, generalizing A -> A*A^T*A for matrices. Maps are
/// degree-3 homogeneous (Phi(cT) = c^3 Phi(T)) and rank-1 equivariant:
/// for T = u o v o w, Phi(T) = (prod of squared factor norms) * T.
struct AmplificationMap {
    std::string name;
    std::set<std::size_t> supported_orders;
    std::function<DenseTensor(const DenseTensor&)> evaluator;

    bool supports(std::size_t order) const { return supported_orders.count(order) > 0; }
};

/// Cyclic degree-3 contraction for orders 3 and 4:
///   order 3: Phi(T)_{i1 j1 k1}    = sum T_{i1 j2 k2} T_{i2 j1 k2} T_{i2 j2 k1}
///   order 4: Phi(T)_{i1 j1 k1 l1} = sum T_{i1 j2 k2 l2} T_{i2 j1 k2 l2} T_{i2 j2 k1 l1}
/// Its matrix specialization (trailing extent 1) is A*A^T*A.
DenseTensor phi_sigma4(const DenseTensor& T);

/// The phi_sigma4 map packaged with its supported orders.
const AmplificationMap& phi_sigma4_map();

/// m-fold composition Phi^m(T) with no intermediate normalization. Throws if
/// an intermediate overflows to non-finite values; callers amplifying
/// large-magnitude tensors should normalize between rounds.
DenseTensor amplify(const DenseTensor& T, const AmplificationMap& map, int m);

/// Nuclear norm of every mode flattening, in mode order.
std::vector<double> flattening_nuclear_norms(const DenseTensor& T);

/// Stable slice rank: sum_i ||T_(i)||_*^2 / ||T||^2. Scale invariant;
/// throws on the zero tensor.
double stable_slice_rank_value(const DenseTensor& T);

}  // namespace tdn
