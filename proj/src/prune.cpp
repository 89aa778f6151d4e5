#include "sham/prune.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sham {

float magnitude_percentile(const DenseMatrix& M, double p) {
    validate(M);
    if (p < 0.0 || p >= 100.0)
        throw Error(Errc::invalid_argument, "percentile level must be in [0, 100)");
    std::vector<float> mags(M.size());
    for (Index i = 0; i < M.size(); ++i) mags[static_cast<std::size_t>(i)] = std::fabs(M.data()[i]);
    std::sort(mags.begin(), mags.end());
    const auto n = static_cast<double>(mags.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::max<std::size_t>(rank, 1);
    return mags[rank - 1];
}

DenseMatrix prune(const DenseMatrix& M, const PruneConfig& cfg) {
    const float wp = magnitude_percentile(M, cfg.p);
    DenseMatrix out(M.rows(), M.cols());
    for (Index i = 0; i < M.size(); ++i) {
        const float v = M.data()[i];
        out.data()[i] = std::fabs(v) > wp ? v : 0.0f;
    }
    return out;
}

} // namespace sham
