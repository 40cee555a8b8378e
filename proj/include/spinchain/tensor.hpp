#pragma once
// Dense complex tensors with row-major storage, plus the three numeric
// primitives everything else is built from: pairwise contraction, truncated
// SVD, and Hermitian diagonalization.

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "spinchain/errors.hpp"

namespace spinchain {

using cxd = std::complex<double>;
using Shape = std::vector<std::size_t>;

class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<cxd> values);

    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    const Shape& shape() const { return shape_; }
    std::size_t extent(std::size_t axis) const;

    cxd* data() { return data_.data(); }
    const cxd* data() const { return data_.data(); }
    std::vector<cxd>& values() { return data_; }
    const std::vector<cxd>& values() const { return data_; }

    // Bounds-checked element access for setup/test code; hot loops should
    // index data() directly.
    template <typename... Ix>
    cxd& operator()(Ix... ix) {
        const std::size_t idx[] = {static_cast<std::size_t>(ix)...};
        return data_[flat_index(idx, sizeof...(Ix))];
    }
    template <typename... Ix>
    const cxd& operator()(Ix... ix) const {
        const std::size_t idx[] = {static_cast<std::size_t>(ix)...};
        return data_[flat_index(idx, sizeof...(Ix))];
    }

    DenseTensor permuted(const std::vector<std::size_t>& perm) const;
    DenseTensor reshaped(Shape new_shape) const&;
    DenseTensor reshaped(Shape new_shape) &&;
    DenseTensor conjugated() const;

    double norm() const;           // Frobenius
    void scale(cxd factor);
    bool all_finite() const;

private:
    std::size_t flat_index(const std::size_t* idx, std::size_t n) const;
    void require_volume(const Shape& new_shape) const;

    Shape shape_;
    std::vector<cxd> data_;
};

using AxisPairs = std::vector<std::pair<std::size_t, std::size_t>>;

// Sum over the paired axes; result carries the free axes of `a` (in order)
// followed by the free axes of `b`.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b, const AxisPairs& pairs);

struct SvdResult {
    DenseTensor u;           // rows × kept
    std::vector<double> s;   // nonincreasing
    DenseTensor vh;          // kept × cols
    double discarded_weight; // Σ(dropped s²) / Σ(all s²)
};

// Thin SVD of a matrix, truncated to chi_max values; values below cutoff·s₀
// are dropped, and values below 1e-14·s₀ are dropped unconditionally so the
// spectral measures downstream never see a numerically-zero Schmidt weight.
SvdResult svd_truncated(const DenseTensor& m, std::size_t chi_max, double cutoff);

struct EighResult {
    std::vector<double> values; // nondecreasing
    DenseTensor vectors;        // column k ↔ values[k]
};

EighResult eigh(const DenseTensor& h);

// Convenience for tests and assertions.
double max_abs_diff(const DenseTensor& a, const DenseTensor& b);

}  // namespace spinchain
