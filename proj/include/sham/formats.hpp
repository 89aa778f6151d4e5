#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "sham/huffman.hpp"
#include "sham/matrix.hpp"
#include "sham/quantize.hpp"

namespace sham {

// Compressed sparse column. Row indices and column boundaries are 0-based in
// memory; the 1-based view matches the presentation used in docs and tests.
struct CscMatrix {
    Index n = 0, m = 0;
    std::vector<float> nz;          // non-zero values, by column
    std::vector<std::uint32_t> ri;  // row index of each nz entry
    std::vector<std::uint64_t> cb;  // m+1 offsets, cb[m] == nz.size()
};

CscMatrix to_csc(const DenseMatrix& M);
DenseMatrix from_csc(const CscMatrix& C);
std::vector<std::uint64_t> one_based_ri(const CscMatrix& C);
std::vector<std::uint64_t> one_based_cb(const CscMatrix& C);

// Huffman address map: every entry (zeros included) Huffman-coded in column
// order into one packed bit stream.
struct HamMatrix {
    Index n = 0, m = 0;
    WordSize b = WordSize::w32;
    HuffmanCode code;
    BitStream stream;
};

HamMatrix to_ham(const DenseMatrix& M, WordSize b);
DenseMatrix from_ham(const HamMatrix& H);

// Sparse variant: the stream covers non-zeros only, zeros live in ri/cb.
struct ShamMatrix {
    Index n = 0, m = 0;
    WordSize b = WordSize::w32;
    HuffmanCode code; // over non-zero values; empty when the matrix is all zero
    BitStream stream;
    std::vector<std::uint32_t> ri;
    std::vector<std::uint64_t> cb;
};

ShamMatrix to_sham(const DenseMatrix& M, WordSize b);
DenseMatrix from_sham(const ShamMatrix& S);

// Full-precision center vector plus one small index per entry. Indices are
// byte-rounded: one byte for k <= 256, two up to 65536; larger k is rejected.
struct IndexMapMatrix {
    Index n = 0, m = 0;
    std::vector<float> centers;
    std::vector<std::uint16_t> indices; // row-major
    unsigned index_bits = 8;            // 8 or 16
};

// The codebook must reproduce M exactly; entries carrying the pruned sentinel
// are mapped to a zero center (added if missing).
IndexMapMatrix to_index_map(const DenseMatrix& M, const Codebook& cb);
DenseMatrix from_index_map(const IndexMapMatrix& I);

enum class FormatTag : std::uint8_t { ham = 1, sham = 2, csc = 3, imap = 4 };

const char* format_name(FormatTag f);
FormatTag format_from_name(const std::string& name);

using CompressedMatrix = std::variant<HamMatrix, ShamMatrix, CscMatrix, IndexMapMatrix>;

FormatTag format_of(const CompressedMatrix& W);
Index rows_of(const CompressedMatrix& W);
Index cols_of(const CompressedMatrix& W);
DenseMatrix reconstruct(const CompressedMatrix& W);

// Measured size under the bound-checking convention: packed stream bits plus
// 6kb dictionary accounting, with ri/cb charged b bits per element.
std::uint64_t accounting_bits(const CompressedMatrix& W, WordSize b);

enum class BoundHypothesis : std::uint8_t { worst_case, k_distinct };

// Theoretical size upper bounds. HAM: nm(1+log2 nm) + 6nm*b worst case,
// nm(1+log2 k) + 6kb with k distinct values. sHAM: snm(1+log2 snm) + b(7snm+m+1)
// worst case, snm(1+log2 k) + b(6k+snm+m+1) with k distinct non-zeros. CSC and
// index map have exact closed forms, returned under either hypothesis.
double bound_bits(FormatTag f, Index n, Index m, double s, std::uint64_t k, WordSize b,
                  BoundHypothesis hyp);

// Sparsity below which the sHAM size bound beats the HAM one:
// ((1+log2 k)/b - (m+1)/(nm)) / (1 + (1+log2 k)/b).
double crossover_s(std::uint64_t k, WordSize b, Index n, Index m);

struct SpaceReport {
    FormatTag format = FormatTag::ham;
    std::uint64_t actual_bits = 0;     // accounting figure the bounds compare against
    std::uint64_t serialized_bits = 0; // container bytes * 8, filled by the io layer
    double bound_bits = 0.0;
    double psi_actual = 0.0;
    double psi_bound = 0.0;
    Index n = 0, m = 0;
    double s = 0.0;
    std::uint64_t k = 0; // code symbols for HAM/sHAM, centers for imap, distinct values for CSC
    WordSize b = WordSize::w32;
};

SpaceReport make_space_report(const CompressedMatrix& W, WordSize b, const SparsityStats& st);

} // namespace sham
