#include "sham/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace sham {

WordSize word_size_from_bits(unsigned bits) {
    switch (bits) {
        case 32: return WordSize::w32;
        case 64: return WordSize::w64;
    }
    throw Error(Errc::invalid_argument, "word size must be 32 or 64 bits");
}

void validate(const DenseMatrix& M) {
    if (M.rows() < 1 || M.cols() < 1)
        throw Error(Errc::invalid_argument, "matrix must have positive dimensions");
    if (!M.allFinite())
        throw Error(Errc::invalid_argument, "matrix contains NaN or Inf");
}

SparsityStats stats(const DenseMatrix& M) {
    validate(M);
    SparsityStats st;
    std::vector<float> vals(M.data(), M.data() + M.size());
    for (float v : vals)
        if (v != 0.0f) ++st.q;
    std::sort(vals.begin(), vals.end());
    st.k_distinct = static_cast<std::uint64_t>(
        std::unique(vals.begin(), vals.end()) - vals.begin());
    st.s = static_cast<double>(st.q) / static_cast<double>(M.size());
    return st;
}

double occupancy_ratio(double compressed_bits, Index n, Index m, WordSize b) {
    if (n < 1 || m < 1)
        throw Error(Errc::invalid_argument, "occupancy_ratio: dimensions must be positive");
    return compressed_bits /
           (static_cast<double>(word_bits(b)) * static_cast<double>(n) * static_cast<double>(m));
}

DenseMatrix uniform_matrix(Index n, Index m, float lo, float hi, Rng& rng) {
    DenseMatrix M(n, m);
    const double a = lo, w = static_cast<double>(hi) - lo;
    for (Index i = 0; i < M.size(); ++i)
        M.data()[i] = canonical(static_cast<float>(a + rng.uniform() * w));
    return M;
}

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

} // namespace sham
