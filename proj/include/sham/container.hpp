#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sham/formats.hpp"

namespace sham {

// Compression pipeline parameters recorded in the container header so that
// verification can re-derive the stored (post-quantization) matrix from the
// original input.
struct PipelineRecord {
    bool pruned = false;
    double p = 0.0;
    std::uint8_t quant = 0; // 0 = none, otherwise QuantMethod
    bool ignore_zeros = false;
    std::uint32_t k = 0;
    std::uint64_t seed = 0;
};

struct Container {
    CompressedMatrix matrix;
    WordSize b = WordSize::w32;
    PipelineRecord pipeline;
};

// .shamz layout (little-endian): magic "SHMZ", version, format tag, word size,
// shape and pipeline record, then format-specific sections: the canonical
// dictionary as (symbol f32, length u8) pairs, the packed code stream, and
// ri/cb packed at ceil(log2 n) / ceil(log2 (q+1)) bits per element.
void write_container(std::ostream& out, const Container& c);
Container read_container(std::istream& in);
void save_container(const std::string& path, const Container& c);
Container load_container(const std::string& path);
std::uint64_t container_bytes(const Container& c);

// Dense matrices travel either as raw little-endian f32 with a 16-byte header
// (magic "F32M", version, n, m) or as CSV; load_dense sniffs the magic.
DenseMatrix load_dense(const std::string& path);
void save_dense_raw(const std::string& path, const DenseMatrix& M);
void save_dense_csv(const std::string& path, const DenseMatrix& M);
void write_dense_csv(std::ostream& out, const DenseMatrix& M);

} // namespace sham
