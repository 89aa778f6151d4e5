#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sham/rng.hpp"

namespace sham {

// Weights are stored in 32-bit floats, row-major; all accumulating arithmetic
// (dot products, cluster means, cost functions) runs in double.
using DenseMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

enum class Errc {
    invalid_argument,
    dimension_mismatch,
    insufficient_distinct_values,
    corrupt_stream,
    corrupt_container,
    io_error,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

enum class WordSize : unsigned { w32 = 32, w64 = 64 };

constexpr unsigned word_bits(WordSize b) { return static_cast<unsigned>(b); }

WordSize word_size_from_bits(unsigned bits);

struct SparsityStats {
    std::uint64_t q = 0;          // non-zero count
    double s = 0.0;               // q / (n*m), exact
    std::uint64_t k_distinct = 1; // distinct values, zero included only when present
};

// Collapses -0.0f to +0.0f so that value equality and bit equality coincide
// everywhere downstream (symbol tables, round-trip checks).
inline float canonical(float v) { return v == 0.0f ? 0.0f : v; }

// Throws Errc::invalid_argument on empty shape or non-finite entries.
void validate(const DenseMatrix& M);

SparsityStats stats(const DenseMatrix& M);

// compressed_bits / (b * n * m)
double occupancy_ratio(double compressed_bits, Index n, Index m, WordSize b);

// Entries i.i.d. uniform in [lo, hi); never produces -0.0f.
DenseMatrix uniform_matrix(Index n, Index m, float lo, float hi, Rng& rng);

bool bit_equal(const DenseMatrix& a, const DenseMatrix& b);

} // namespace sham
