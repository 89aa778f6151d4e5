#pragma once

#include <cstdint>
#include <vector>

#include "sham/matrix.hpp"
#include "sham/rng.hpp"

namespace sham {

enum class QuantMethod : std::uint8_t { cws = 1, pws = 2, uq = 3, ecsq = 4 };

const char* method_name(QuantMethod m);
QuantMethod method_from_name(const std::string& name);

// Representative values plus per-entry assignments. Entries left untouched by an
// ignore_zeros quantization carry the `pruned` sentinel and reconstruct to zero.
struct Codebook {
    static constexpr std::int32_t pruned = -1;

    Index rows = 0, cols = 0;
    std::vector<float> centers;
    std::vector<std::int32_t> assignments; // row-major rows*cols
    QuantMethod method = QuantMethod::cws;

    std::size_t k() const { return centers.size(); }
};

DenseMatrix reconstruct(const Codebook& cb);

struct UqConfig {
    double delta = 1.0; // interval size, > 0
    double d = 0.0;     // bias in [-delta/2, delta/2]
};

struct EcsqConfig {
    double lambda = 0.0; // entropy weight, >= 0
    int k_target = 2;
    int max_iters = 300;
    double tol = 1e-6; // relative cost-change stop threshold
};

struct QuantResult {
    DenseMatrix W;
    Codebook codebook;
    bool converged = true;
    std::vector<double> cost_trace; // per-iteration Lagrange cost (CWS: distortion only)
};

// k-means weight sharing: k-means++ seeding from rng, Lloyd iterations (max 300,
// relative cost tolerance 1e-6), empty clusters re-seeded from the farthest point.
QuantResult quantize_cws(const DenseMatrix& M, int k, Rng& rng, bool ignore_zeros);

// Probabilistic weight sharing over k quantile sub-intervals: extremes at the
// i/k-quantiles (linear interpolation), each entry drawn to its interval's lower
// extreme with probability (hi-w)/(hi-lo), upper otherwise. At most k+1 centers.
QuantResult quantize_pws(const DenseMatrix& M, int k, Rng& rng, bool ignore_zeros);

// Uniform quantization w = delta*round((w+d)/delta) - d, round-half-to-even.
QuantResult quantize_uq(const DenseMatrix& M, const UqConfig& cfg, bool ignore_zeros);

// Entropy-constrained scalar quantization: alternating minimization of
// distortion + lambda * entropy; empty levels are dropped. lambda = 0 follows the
// plain k-means path.
QuantResult quantize_ecsq(const DenseMatrix& M, const EcsqConfig& cfg, Rng& rng, bool ignore_zeros);

struct TuneResult {
    QuantMethod method = QuantMethod::uq;
    UqConfig uq{};
    EcsqConfig ecsq{};
    int achieved_k = 0;
    bool exact = false;
};

// Bisection search for a UqConfig (over delta) or EcsqConfig (over lambda) whose
// quantization produces exactly k distinct centers; returns the nearest achievable
// count with exact=false when k is unreachable. `seed` drives the ECSQ probes and
// must match the seed used for the final quantization.
TuneResult tune_to_k(QuantMethod method, const DenseMatrix& M, int k, std::uint64_t seed,
                     bool ignore_zeros);

// Component l is the sum of grad entries assigned to center l; sentinel entries
// are excluded.
std::vector<double> aggregate_gradient(const DenseMatrix& grad, const Codebook& cb);

// Covering codebook with one center per distinct value (no sentinels).
Codebook codebook_from_matrix(const DenseMatrix& M);

} // namespace sham
