#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sham/bits.hpp"
#include "sham/matrix.hpp"

namespace sham {

struct SymbolTable {
    std::vector<float> symbols;        // strictly ascending
    std::vector<std::uint64_t> counts; // all >= 1, aligned with symbols
    std::uint64_t total = 0;

    std::size_t size() const { return symbols.size(); }
};

SymbolTable make_symbol_table(std::span<const float> values);

// Canonical prefix-free code. Codeword lengths come from a Huffman tree with a
// deterministic tie-break (lowest weight, then earliest-created node); codewords
// are then reassigned canonically by (length, symbol value), so identical sources
// produce identical bitstreams on every platform. Decoding walks one bit at a
// time against per-length first-code/offset tables.
class HuffmanCode {
public:
    HuffmanCode() = default; // empty code (k = 0), used when there is nothing to encode

    std::size_t size() const { return symbols_.size(); }
    double entropy() const { return entropy_; }
    double avg_len() const { return avg_len_; }
    unsigned max_len() const { return max_len_; }

    // Canonical order accessors (sorted by (length, symbol value)).
    const std::vector<float>& symbols() const { return symbols_; }
    const std::vector<std::uint8_t>& lengths() const { return lengths_; }
    std::uint64_t codeword(std::size_t canonical_index) const { return codes_[canonical_index]; }

    std::size_t index_of(float symbol) const; // throws on unknown symbol
    bool contains(float symbol) const;

    // Decode one length-len prefix value; returns canonical index or -1.
    int lookup(std::uint64_t acc, unsigned len) const {
        const Level& lv = levels_[len];
        if (acc >= lv.first_code && acc - lv.first_code < lv.count)
            return static_cast<int>(lv.first_index + (acc - lv.first_code));
        return -1;
    }

    static HuffmanCode from_lengths(std::vector<float> symbols_canonical,
                                    std::vector<std::uint8_t> lengths,
                                    double entropy, double avg_len);

    friend HuffmanCode build_code(const SymbolTable& table);

private:
    struct Level {
        std::uint64_t first_code = 0;
        std::uint64_t first_index = 0;
        std::uint64_t count = 0;
    };

    void finalize(); // assign canonical codes + decode levels from lengths_

    std::vector<float> symbols_;
    std::vector<std::uint8_t> lengths_;
    std::vector<std::uint64_t> codes_;
    std::vector<Level> levels_; // indexed by length, size max_len_+1
    std::unordered_map<std::uint32_t, std::uint32_t> index_; // float bits -> canonical index
    double entropy_ = 0.0;
    double avg_len_ = 0.0;
    unsigned max_len_ = 0;
};

HuffmanCode build_code(const SymbolTable& table);

BitStream encode(std::span<const float> values, const HuffmanCode& code, WordSize b);

struct DecodeCursor {
    std::uint64_t bit = 0;
};

// Extracts the next codeword starting at the cursor, spanning word boundaries as
// needed; std::nullopt once the cursor reaches bit_len (terminal zero-padding is
// never consumed). Throws Errc::corrupt_stream when the remaining bits cannot
// complete any codeword.
std::optional<float> ncw(const BitStream& stream, DecodeCursor& cursor, const HuffmanCode& code);

std::vector<float> decode_all(const BitStream& stream, const HuffmanCode& code);

// Dictionary size accounting used by the space bounds: 3b bits per entry per
// direction, i.e. 6*k*b in total. The serialized dictionary is smaller; bound
// checks use this figure.
std::uint64_t dict_bits(std::size_t k, WordSize b);
inline std::uint64_t dict_bits(const HuffmanCode& code, WordSize b) { return dict_bits(code.size(), b); }

} // namespace sham
