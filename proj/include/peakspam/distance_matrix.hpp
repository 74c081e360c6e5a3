#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace peakspam {

// Symmetric pairwise distances stored as the upper triangle, row-major:
// (0,1), (0,2), ..., (0,n-1), (1,2), ... The diagonal is implicitly zero.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    // Throws ShapeError if condensed.size() != n(n-1)/2 and ParamError on a
    // negative or NaN entry.
    DistanceMatrix(std::size_t n, std::vector<double> condensed);

    static constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

    std::size_t size() const { return n_; }
    std::span<const double> condensed() const { return condensed_; }

    // Position of pair (i, j), i < j, in the condensed vector.
    std::size_t index(std::size_t i, std::size_t j) const {
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        return i < j ? condensed_[index(i, j)] : condensed_[index(j, i)];
    }

    double max() const;

private:
    std::size_t n_ = 0;
    std::vector<double> condensed_;
};

}  // namespace peakspam
