#include "peakspam/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "peakspam/errors.hpp"

namespace peakspam {

DistanceMatrix::DistanceMatrix(std::size_t n, std::vector<double> condensed)
    : n_(n), condensed_(std::move(condensed)) {
    if (condensed_.size() != pair_count(n_)) {
        throw ShapeError("condensed distance vector has " + std::to_string(condensed_.size()) +
                         " entries, expected " + std::to_string(pair_count(n_)));
    }
    for (const double d : condensed_) {
        if (!(d >= 0.0)) throw ParamError("distances must be non-negative numbers");
    }
}

double DistanceMatrix::max() const {
    return condensed_.empty() ? 0.0 : *std::max_element(condensed_.begin(), condensed_.end());
}

}  // namespace peakspam
