#pragma once

#include "sham/matrix.hpp"

namespace sham {

struct PruneConfig {
    double p = 0.0; // percentile level in [0, 100)
};

// Nearest-rank percentile of the magnitude multiset {|w|}: rank max(1, ceil(p/100 * nm)).
float magnitude_percentile(const DenseMatrix& M, double p);

// Keeps entries with |w| strictly above the p-th magnitude percentile, zeroes the
// rest. Ties at the threshold are pruned.
DenseMatrix prune(const DenseMatrix& M, const PruneConfig& cfg);

} // namespace sham
