#pragma once

#include <cstdint>
#include <vector>

#include "sham/matrix.hpp"

namespace sham {

// A sequence of bit_len bits packed MSB-first into b-bit words. Word i holds
// bits [i*b, (i+1)*b); inside a word, bit j of the sequence sits at position
// b-1-j from the least significant end. Padding bits past bit_len are zero.
struct BitStream {
    std::vector<std::uint64_t> words; // each value < 2^b
    std::uint64_t bit_len = 0;
    WordSize b = WordSize::w32;

    std::uint64_t word_count() const { return words.size(); }

    bool bit(std::uint64_t pos) const {
        const unsigned wb = word_bits(b);
        return (words[pos / wb] >> (wb - 1 - pos % wb)) & 1u;
    }
};

// Appends fields MSB-first. write(v, w) emits the low w bits of v.
class BitWriter {
public:
    explicit BitWriter(WordSize b) : b_(b) {}

    void write(std::uint64_t value, unsigned width) {
        const unsigned wb = word_bits(b_);
        for (unsigned i = width; i-- > 0;) {
            cur_ = (cur_ << 1) | ((value >> i) & 1u);
            if (++fill_ == wb) {
                out_.words.push_back(cur_);
                cur_ = 0;
                fill_ = 0;
            }
        }
        out_.bit_len += width;
    }

    BitStream finish() {
        const unsigned wb = word_bits(b_);
        if (fill_ > 0) {
            out_.words.push_back(cur_ << (wb - fill_)); // zero-pad the last word
            cur_ = 0;
            fill_ = 0;
        }
        out_.b = b_;
        BitStream s = std::move(out_);
        out_ = BitStream{};
        out_.b = b_;
        return s;
    }

private:
    WordSize b_;
    BitStream out_;
    std::uint64_t cur_ = 0;
    unsigned fill_ = 0;
};

// Fixed-width unsigned fields over a BitStream, for packed index vectors.
std::uint64_t read_field(const BitStream& s, std::uint64_t index, unsigned width);

} // namespace sham
