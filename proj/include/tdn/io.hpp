#pragma once

#include <string>

#include "tdn/tensor.hpp"

namespace tdn {

/// Text tensor container: header line "order,extent_1,...,extent_d" followed
/// by the linearized values (first index fastest), one per line, written with
/// round-trip precision.
void write_tensor(const std::string& path, const DenseTensor& T);

DenseTensor read_tensor(const std::string& path);

}  // namespace tdn
