#include "sham/huffman.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <queue>

namespace sham {

namespace {

std::uint32_t float_bits(float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, sizeof u);
    return u;
}

} // namespace

std::uint64_t read_field(const BitStream& s, std::uint64_t index, unsigned width) {
    const unsigned wb = word_bits(s.b);
    std::uint64_t pos = index * width;
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i, ++pos)
        v = (v << 1) | ((s.words[pos / wb] >> (wb - 1 - pos % wb)) & 1u);
    return v;
}

SymbolTable make_symbol_table(std::span<const float> values) {
    SymbolTable t;
    std::vector<float> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        t.symbols.push_back(sorted[i]);
        t.counts.push_back(j - i);
        i = j;
    }
    t.total = values.size();
    return t;
}

void HuffmanCode::finalize() {
    max_len_ = 0;
    for (std::uint8_t l : lengths_) max_len_ = std::max<unsigned>(max_len_, l);
    if (max_len_ > 64)
        throw Error(Errc::invalid_argument, "codeword length exceeds 64 bits");

    codes_.assign(lengths_.size(), 0);
    levels_.assign(max_len_ + 1, Level{});
    std::uint64_t code = 0;
    for (std::size_t i = 0; i < lengths_.size(); ++i) {
        if (i > 0) code = (code + 1) << (lengths_[i] - lengths_[i - 1]);
        codes_[i] = code;
        Level& lv = levels_[lengths_[i]];
        if (lv.count == 0) {
            lv.first_code = code;
            lv.first_index = i;
        }
        ++lv.count;
    }

    index_.clear();
    index_.reserve(symbols_.size());
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        index_.emplace(float_bits(symbols_[i]), static_cast<std::uint32_t>(i));
}

std::size_t HuffmanCode::index_of(float symbol) const {
    auto it = index_.find(float_bits(symbol));
    if (it == index_.end())
        throw Error(Errc::invalid_argument, "symbol not present in code");
    return it->second;
}

bool HuffmanCode::contains(float symbol) const {
    return index_.find(float_bits(symbol)) != index_.end();
}

HuffmanCode HuffmanCode::from_lengths(std::vector<float> symbols_canonical,
                                      std::vector<std::uint8_t> lengths,
                                      double entropy, double avg_len) {
    if (symbols_canonical.size() != lengths.size())
        throw Error(Errc::invalid_argument, "symbol/length count mismatch");
    if (!std::is_sorted(lengths.begin(), lengths.end()))
        throw Error(Errc::corrupt_container, "dictionary lengths not in canonical order");
    unsigned __int128 kraft = 0;
    for (std::uint8_t l : lengths) {
        if (l < 1 || l > 64)
            throw Error(Errc::corrupt_container, "dictionary length out of range");
        kraft += static_cast<unsigned __int128>(1) << (64 - l);
    }
    if (!lengths.empty() && kraft > (static_cast<unsigned __int128>(1) << 64))
        throw Error(Errc::corrupt_container, "dictionary violates Kraft inequality");
    HuffmanCode c;
    c.symbols_ = std::move(symbols_canonical);
    c.lengths_ = std::move(lengths);
    c.entropy_ = entropy;
    c.avg_len_ = avg_len;
    c.finalize();
    return c;
}

HuffmanCode build_code(const SymbolTable& table) {
    const std::size_t k = table.size();
    if (k == 0)
        throw Error(Errc::invalid_argument, "cannot build a code over an empty table");

    std::vector<std::uint8_t> lengths(k, 0);
    if (k == 1) {
        lengths[0] = 1; // degenerate source still needs one bit per symbol
    } else {
        // Huffman merge with (weight, creation id) ordering: leaves are created in
        // symbol order, internal nodes afterwards, so ties resolve identically on
        // every run. Only the resulting lengths matter, codes are reassigned below.
        struct Node {
            std::uint64_t weight;
            std::uint64_t id;
            int left, right; // -1 for leaves
        };
        std::vector<Node> nodes;
        nodes.reserve(2 * k);
        auto cmp = [&](std::size_t a, std::size_t b) {
            if (nodes[a].weight != nodes[b].weight) return nodes[a].weight > nodes[b].weight;
            return nodes[a].id > nodes[b].id;
        };
        std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
        for (std::size_t i = 0; i < k; ++i) {
            nodes.push_back({table.counts[i], i, -1, -1});
            heap.push(i);
        }
        std::uint64_t next_id = k;
        while (heap.size() > 1) {
            std::size_t a = heap.top(); heap.pop();
            std::size_t b = heap.top(); heap.pop();
            nodes.push_back({nodes[a].weight + nodes[b].weight, next_id++,
                             static_cast<int>(a), static_cast<int>(b)});
            heap.push(nodes.size() - 1);
        }
        // Depth-first walk assigning depths to leaves.
        std::vector<std::pair<std::size_t, std::uint8_t>> stack{{heap.top(), 0}};
        while (!stack.empty()) {
            auto [idx, depth] = stack.back();
            stack.pop_back();
            const Node& nd = nodes[idx];
            if (nd.left < 0) {
                lengths[nd.id] = depth;
            } else {
                stack.emplace_back(nd.left, depth + 1);
                stack.emplace_back(nd.right, depth + 1);
            }
        }
    }

    double entropy = 0.0, avg = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double p = static_cast<double>(table.counts[i]) / static_cast<double>(table.total);
        if (k > 1) entropy -= p * std::log2(p);
        avg += p * lengths[i];
    }

    // Canonical order: (length, symbol value). Symbols arrive sorted by value.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });

    HuffmanCode c;
    c.symbols_.reserve(k);
    c.lengths_.reserve(k);
    for (std::size_t i : order) {
        c.symbols_.push_back(table.symbols[i]);
        c.lengths_.push_back(lengths[i]);
    }
    c.entropy_ = entropy;
    c.avg_len_ = avg;
    c.finalize();
    return c;
}

BitStream encode(std::span<const float> values, const HuffmanCode& code, WordSize b) {
    BitWriter w(b);
    for (float v : values) {
        std::size_t i = code.index_of(v);
        w.write(code.codeword(i), code.lengths()[i]);
    }
    return w.finish();
}

std::optional<float> ncw(const BitStream& stream, DecodeCursor& cursor, const HuffmanCode& code) {
    if (cursor.bit >= stream.bit_len) return std::nullopt;
    if (code.size() == 0)
        throw Error(Errc::corrupt_stream, "non-empty stream with an empty code");

    const unsigned wb = word_bits(stream.b);
    std::uint64_t pos = cursor.bit;
    std::uint64_t acc = 0;
    for (unsigned len = 1; len <= code.max_len(); ++len, ++pos) {
        if (pos >= stream.bit_len)
            throw Error(Errc::corrupt_stream, "stream ends inside a codeword");
        acc = (acc << 1) | ((stream.words[pos / wb] >> (wb - 1 - pos % wb)) & 1u);
        int idx = code.lookup(acc, len);
        if (idx >= 0) {
            cursor.bit = pos + 1;
            return code.symbols()[static_cast<std::size_t>(idx)];
        }
    }
    throw Error(Errc::corrupt_stream, "bit pattern matches no codeword");
}

std::vector<float> decode_all(const BitStream& stream, const HuffmanCode& code) {
    std::vector<float> out;
    DecodeCursor cur;
    while (auto v = ncw(stream, cur, code)) out.push_back(*v);
    return out;
}

std::uint64_t dict_bits(std::size_t k, WordSize b) {
    return 6ULL * k * word_bits(b);
}

} // namespace sham
