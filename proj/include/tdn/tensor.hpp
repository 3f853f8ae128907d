#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdn {

/// Dense real-valued tensor of order d >= 1, linearized first-index-fastest
/// (the column-major generalization). The shape is fixed at construction and
/// all entries are validated to be finite. Treat instances as values; all
/// operations on them are pure functions.
class DenseTensor {
public:
    DenseTensor(std::vector<std::size_t> shape, std::vector<double> values)
        : shape_(std::move(shape)), values_(std::move(values)) {
        validate();
    }

    static DenseTensor zeros(std::vector<std::size_t> shape) {
        std::size_t n = checked_element_count(shape);
        return DenseTensor(std::move(shape), std::vector<double>(n, 0.0));
    }

    std::size_t order() const { return shape_.size(); }
    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t extent(std::size_t mode) const { return shape_.at(mode); }
    std::size_t size() const { return values_.size(); }

    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Entry access by multi-index (first index fastest); for tests and
    /// small-scale code, not hot loops.
    double at(std::initializer_list<std::size_t> idx) const {
        if (idx.size() != shape_.size())
            throw std::invalid_argument("DenseTensor::at: index order mismatch");
        std::size_t lin = 0, stride = 1, k = 0;
        for (std::size_t i : idx) {
            if (i >= shape_[k]) throw std::out_of_range("DenseTensor::at: index out of range");
            lin += i * stride;
            stride *= shape_[k];
            ++k;
        }
        return values_[lin];
    }

    static std::size_t checked_element_count(const std::vector<std::size_t>& shape) {
        if (shape.empty()) throw std::invalid_argument("DenseTensor: order must be >= 1");
        std::size_t n = 1;
        for (std::size_t p : shape) {
            if (p == 0) throw std::invalid_argument("DenseTensor: extents must be positive");
            if (n > SIZE_MAX / p) throw std::invalid_argument("DenseTensor: shape overflows size_t");
            n *= p;
        }
        return n;
    }

private:
    void validate() const {
        std::size_t n = checked_element_count(shape_);
        if (n != values_.size())
            throw std::invalid_argument("DenseTensor: value count " + std::to_string(values_.size()) +
                                        " does not match shape product " + std::to_string(n));
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("DenseTensor: non-finite entry");
    }

    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

/// Strides for the first-index-fastest linearization.
inline std::vector<std::size_t> strides_of(const std::vector<std::size_t>& shape) {
    std::vector<std::size_t> s(shape.size());
    std::size_t acc = 1;
    for (std::size_t k = 0; k < shape.size(); ++k) {
        s[k] = acc;
        acc *= shape[k];
    }
    return s;
}

inline bool same_shape(const DenseTensor& a, const DenseTensor& b) {
    return a.shape() == b.shape();
}

inline DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
    if (!same_shape(a, b)) throw std::invalid_argument("tensor +: shape mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
    return DenseTensor(a.shape(), std::move(v));
}

inline DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
    if (!same_shape(a, b)) throw std::invalid_argument("tensor -: shape mismatch");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
    return DenseTensor(a.shape(), std::move(v));
}

inline DenseTensor operator*(double c, const DenseTensor& a) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a[i];
    return DenseTensor(a.shape(), std::move(v));
}

}  // namespace tdn
