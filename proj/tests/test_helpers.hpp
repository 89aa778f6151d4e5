#pragma once

#include <algorithm>
#include <vector>

#include "sham/matrix.hpp"
#include "sham/prune.hpp"
#include "sham/quantize.hpp"
#include "sham/rng.hpp"

namespace sham::test {

inline DenseMatrix matrix_from(std::initializer_list<std::initializer_list<float>> rows) {
    DenseMatrix M(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (float v : row) M(i, j++) = v;
        ++i;
    }
    return M;
}

// The 5x5 matrix used throughout the docs: 7 non-zeros, 8 distinct values.
inline DenseMatrix example2() {
    return matrix_from({{1, 0, 4, 0, 0},
                        {0, 10, 0, 0, 0},
                        {2, 3, 0, 0, 5},
                        {0, 0, 0, 0, 0},
                        {0, 0, 0, 0, 6}});
}

// Random matrix with roughly `zero_fraction` zero entries.
inline DenseMatrix random_sparse(Index n, Index m, double zero_fraction, Rng& rng) {
    DenseMatrix M(n, m);
    for (Index i = 0; i < M.size(); ++i) {
        if (rng.uniform() < zero_fraction)
            M.data()[i] = 0.0f;
        else
            M.data()[i] = canonical(static_cast<float>(rng.uniform() * 2.0 - 1.0));
    }
    return M;
}

// Prune + quantize chain used to produce realistic compressed inputs. k is
// clamped to the number of distinct eligible values.
inline DenseMatrix pruned_quantized(Index n, Index m, double p, QuantMethod method, int k,
                                    std::uint64_t seed) {
    Rng gen(seed);
    DenseMatrix M = uniform_matrix(n, m, -1.0f, 1.0f, gen);
    const bool pruned = p > 0.0;
    if (pruned) M = prune(M, PruneConfig{p});

    std::vector<float> eligible;
    for (Index i = 0; i < M.size(); ++i)
        if (!pruned || M.data()[i] != 0.0f) eligible.push_back(M.data()[i]);
    std::sort(eligible.begin(), eligible.end());
    const int distinct = static_cast<int>(
        std::unique(eligible.begin(), eligible.end()) - eligible.begin());
    const int kk = std::max(2, std::min(k, distinct));

    Rng qrng(seed ^ 0x5bd1e995u);
    switch (method) {
        case QuantMethod::cws: return quantize_cws(M, kk, qrng, pruned).W;
        case QuantMethod::pws: return quantize_pws(M, kk, qrng, pruned).W;
        case QuantMethod::uq: {
            const TuneResult t = tune_to_k(QuantMethod::uq, M, kk, seed, pruned);
            return quantize_uq(M, t.uq, pruned).W;
        }
        case QuantMethod::ecsq: {
            EcsqConfig cfg;
            cfg.lambda = 1e-4;
            cfg.k_target = kk;
            return quantize_ecsq(M, cfg, qrng, pruned).W;
        }
    }
    return M;
}

} // namespace sham::test
