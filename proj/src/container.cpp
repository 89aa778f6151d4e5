#include "sham/container.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace sham {

namespace {

constexpr char kMagic[4] = {'S', 'H', 'M', 'Z'};
constexpr std::uint16_t kVersion = 1;
constexpr char kDenseMagic[4] = {'F', '3', '2', 'M'};

void put_bytes(std::ostream& out, const void* p, std::size_t len) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(len));
}

template <typename T>
void put_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i)
        buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF);
    put_bytes(out, buf, sizeof(T));
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, sizeof u);
    put_le(out, u);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    put_le(out, u);
}

void get_bytes(std::istream& in, void* p, std::size_t len) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(in.gcount()) != len)
        throw Error(Errc::corrupt_container, "corrupt container: truncated file");
}

template <typename T>
T get_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    get_bytes(in, buf, sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) v = (v << 8) | buf[i];
    return static_cast<T>(v);
}

float get_f32(std::istream& in) {
    const std::uint32_t u = get_le<std::uint32_t>(in);
    float v;
    std::memcpy(&v, &u, sizeof v);
    if (!std::isfinite(v))
        throw Error(Errc::corrupt_container, "corrupt container: non-finite value");
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t u = get_le<std::uint64_t>(in);
    double v;
    std::memcpy(&v, &u, sizeof v);
    return v;
}

unsigned width_for_max(std::uint64_t max_value) {
    const unsigned w = static_cast<unsigned>(std::bit_width(max_value));
    return w == 0 ? 1 : w;
}

void put_dict(std::ostream& out, const HuffmanCode& code) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(code.size()));
    for (std::size_t i = 0; i < code.size(); ++i) {
        put_f32(out, code.symbols()[i]);
        put_le<std::uint8_t>(out, code.lengths()[i]);
    }
}

HuffmanCode get_dict(std::istream& in) {
    const auto k = get_le<std::uint32_t>(in);
    std::vector<float> symbols(k);
    std::vector<std::uint8_t> lengths(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        symbols[i] = get_f32(in);
        lengths[i] = get_le<std::uint8_t>(in);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return HuffmanCode::from_lengths(std::move(symbols), std::move(lengths), nan, nan);
}

void put_stream(std::ostream& out, const BitStream& s) {
    put_le<std::uint64_t>(out, s.bit_len);
    if (s.b == WordSize::w32)
        for (std::uint64_t w : s.words) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    else
        for (std::uint64_t w : s.words) put_le<std::uint64_t>(out, w);
}

BitStream get_stream(std::istream& in, WordSize b) {
    BitStream s;
    s.b = b;
    s.bit_len = get_le<std::uint64_t>(in);
    const std::uint64_t n_words = (s.bit_len + word_bits(b) - 1) / word_bits(b);
    s.words.resize(n_words);
    for (std::uint64_t i = 0; i < n_words; ++i)
        s.words[i] = b == WordSize::w32 ? get_le<std::uint32_t>(in) : get_le<std::uint64_t>(in);
    return s;
}

template <typename T>
void put_packed(std::ostream& out, const std::vector<T>& values, std::uint64_t max_value) {
    const unsigned width = width_for_max(max_value);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(width));
    BitWriter w(WordSize::w64);
    for (T v : values) w.write(static_cast<std::uint64_t>(v), width);
    const BitStream s = w.finish();
    for (std::uint64_t word : s.words) put_le<std::uint64_t>(out, word);
}

template <typename T>
std::vector<T> get_packed(std::istream& in, std::uint64_t count, std::uint64_t max_value) {
    const auto width = get_le<std::uint8_t>(in);
    if (width < 1 || width > 64 || width != width_for_max(max_value))
        throw Error(Errc::corrupt_container, "corrupt container: bad packed width");
    BitStream s;
    s.b = WordSize::w64;
    s.bit_len = count * width;
    s.words.resize((s.bit_len + 63) / 64);
    for (auto& w : s.words) w = get_le<std::uint64_t>(in);
    std::vector<T> out(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t v = read_field(s, i, width);
        if (v > max_value)
            throw Error(Errc::corrupt_container, "corrupt container: packed value out of range");
        out[i] = static_cast<T>(v);
    }
    return out;
}

std::uint64_t nonzeros_of(const CompressedMatrix& W) {
    switch (format_of(W)) {
        case FormatTag::sham: return std::get<ShamMatrix>(W).ri.size();
        case FormatTag::csc: return std::get<CscMatrix>(W).nz.size();
        default: return 0; // ham/imap do not need q for their payloads
    }
}

// Header k: code symbols (HAM/sHAM), centers (index map), distinct values (CSC).
std::uint64_t symbols_of(const CompressedMatrix& W) {
    return std::visit(
        [](const auto& w) -> std::uint64_t {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix> || std::is_same_v<T, ShamMatrix>) {
                return w.code.size();
            } else if constexpr (std::is_same_v<T, CscMatrix>) {
                std::vector<float> vals = w.nz;
                std::sort(vals.begin(), vals.end());
                const auto distinct = static_cast<std::uint64_t>(
                    std::unique(vals.begin(), vals.end()) - vals.begin());
                const bool has_zero =
                    vals.size() < static_cast<std::size_t>(w.n) * static_cast<std::size_t>(w.m);
                return distinct + (has_zero ? 1 : 0);
            } else {
                return w.centers.size();
            }
        },
        W);
}

} // namespace

void write_container(std::ostream& out, const Container& c) {
    const FormatTag tag = format_of(c.matrix);
    put_bytes(out, kMagic, 4);
    put_le<std::uint16_t>(out, kVersion);
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(tag));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(word_bits(c.b)));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(rows_of(c.matrix)));
    put_le<std::uint64_t>(out, static_cast<std::uint64_t>(cols_of(c.matrix)));
    put_le<std::uint64_t>(out, nonzeros_of(c.matrix));
    put_le<std::uint64_t>(out, symbols_of(c.matrix));
    put_le<std::uint8_t>(out, c.pipeline.pruned ? 1 : 0);
    put_f64(out, c.pipeline.p);
    put_le<std::uint8_t>(out, c.pipeline.quant);
    put_le<std::uint8_t>(out, c.pipeline.ignore_zeros ? 1 : 0);
    put_le<std::uint32_t>(out, c.pipeline.k);
    put_le<std::uint64_t>(out, c.pipeline.seed);

    std::visit(
        [&](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix>) {
                put_dict(out, w.code);
                put_stream(out, w.stream);
            } else if constexpr (std::is_same_v<T, ShamMatrix>) {
                put_dict(out, w.code);
                put_stream(out, w.stream);
                put_packed(out, w.ri, static_cast<std::uint64_t>(w.n) - 1);
                put_packed(out, w.cb, w.ri.size());
            } else if constexpr (std::is_same_v<T, CscMatrix>) {
                for (float v : w.nz) put_f32(out, v);
                put_packed(out, w.ri, static_cast<std::uint64_t>(w.n) - 1);
                put_packed(out, w.cb, w.nz.size());
            } else {
                put_le<std::uint32_t>(out, static_cast<std::uint32_t>(w.centers.size()));
                for (float v : w.centers) put_f32(out, v);
                if (w.index_bits == 8)
                    for (std::uint16_t idx : w.indices)
                        put_le<std::uint8_t>(out, static_cast<std::uint8_t>(idx));
                else
                    for (std::uint16_t idx : w.indices) put_le<std::uint16_t>(out, idx);
            }
        },
        c.matrix);
    if (!out)
        throw Error(Errc::io_error, "failed to write container");
}

Container read_container(std::istream& in) {
    char magic[4];
    get_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw Error(Errc::corrupt_container, "corrupt container: bad magic");
    if (get_le<std::uint16_t>(in) != kVersion)
        throw Error(Errc::corrupt_container, "corrupt container: unsupported version");
    const auto tag_raw = get_le<std::uint8_t>(in);
    if (tag_raw < 1 || tag_raw > 4)
        throw Error(Errc::corrupt_container, "corrupt container: unknown format tag");
    const auto tag = static_cast<FormatTag>(tag_raw);
    const WordSize b = word_size_from_bits(get_le<std::uint8_t>(in));
    const auto n = static_cast<Index>(get_le<std::uint64_t>(in));
    const auto m = static_cast<Index>(get_le<std::uint64_t>(in));
    const auto q = get_le<std::uint64_t>(in);
    const auto k = get_le<std::uint64_t>(in);
    if (n < 1 || m < 1 || q > static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m) ||
        static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m) > (1ULL << 36))
        throw Error(Errc::corrupt_container, "corrupt container: bad shape");

    Container c;
    c.b = b;
    c.pipeline.pruned = get_le<std::uint8_t>(in) != 0;
    c.pipeline.p = get_f64(in);
    c.pipeline.quant = get_le<std::uint8_t>(in);
    c.pipeline.ignore_zeros = get_le<std::uint8_t>(in) != 0;
    c.pipeline.k = get_le<std::uint32_t>(in);
    c.pipeline.seed = get_le<std::uint64_t>(in);

    switch (tag) {
        case FormatTag::ham: {
            HamMatrix H;
            H.n = n;
            H.m = m;
            H.b = b;
            H.code = get_dict(in);
            if (H.code.size() != k)
                throw Error(Errc::corrupt_container, "corrupt container: k/dictionary mismatch");
            H.stream = get_stream(in, b);
            c.matrix = std::move(H);
            break;
        }
        case FormatTag::sham: {
            ShamMatrix S;
            S.n = n;
            S.m = m;
            S.b = b;
            S.code = get_dict(in);
            if (S.code.size() != k)
                throw Error(Errc::corrupt_container, "corrupt container: k/dictionary mismatch");
            S.stream = get_stream(in, b);
            S.ri = get_packed<std::uint32_t>(in, q, static_cast<std::uint64_t>(n) - 1);
            S.cb = get_packed<std::uint64_t>(in, static_cast<std::uint64_t>(m) + 1, q);
            c.matrix = std::move(S);
            break;
        }
        case FormatTag::csc: {
            CscMatrix C;
            C.n = n;
            C.m = m;
            C.nz.resize(q);
            for (auto& v : C.nz) v = get_f32(in);
            C.ri = get_packed<std::uint32_t>(in, q, static_cast<std::uint64_t>(n) - 1);
            C.cb = get_packed<std::uint64_t>(in, static_cast<std::uint64_t>(m) + 1, q);
            c.matrix = std::move(C);
            break;
        }
        case FormatTag::imap: {
            IndexMapMatrix I;
            I.n = n;
            I.m = m;
            const auto centers = get_le<std::uint32_t>(in);
            if (centers < 1 || centers > 65536 || centers != k)
                throw Error(Errc::corrupt_container, "corrupt container: bad center count");
            I.centers.resize(centers);
            for (auto& v : I.centers) v = get_f32(in);
            I.index_bits = centers <= 256 ? 8 : 16;
            I.indices.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(m));
            for (auto& idx : I.indices)
                idx = I.index_bits == 8 ? get_le<std::uint8_t>(in) : get_le<std::uint16_t>(in);
            c.matrix = std::move(I);
            break;
        }
    }
    return c;
}

void save_container(const std::string& path, const Container& c) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    write_container(out, c);
}

Container load_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open: " + path);
    return read_container(in);
}

std::uint64_t container_bytes(const Container& c) {
    std::ostringstream os(std::ios::binary);
    write_container(os, c);
    return static_cast<std::uint64_t>(os.str().size());
}

DenseMatrix load_dense(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_error, "cannot open: " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kDenseMagic, 4) == 0) {
        if (get_le<std::uint32_t>(in) != 1)
            throw Error(Errc::corrupt_container, "unsupported dense matrix version");
        const auto n = static_cast<Index>(get_le<std::uint32_t>(in));
        const auto m = static_cast<Index>(get_le<std::uint32_t>(in));
        if (n < 1 || m < 1)
            throw Error(Errc::corrupt_container, "dense matrix header has empty shape");
        DenseMatrix M(n, m);
        for (Index i = 0; i < M.size(); ++i) M.data()[i] = canonical(get_f32(in));
        return M;
    }

    // CSV fallback: one row per line, comma-separated.
    in.clear();
    in.seekg(0);
    std::vector<std::vector<float>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<float> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(canonical(std::stof(cell)));
            } catch (const std::exception&) {
                throw Error(Errc::io_error, "cannot parse CSV cell: " + cell);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(Errc::io_error, "ragged CSV rows");
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(Errc::io_error, "empty matrix file: " + path);
    DenseMatrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j)
            M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    validate(M);
    return M;
}

void save_dense_raw(const std::string& path, const DenseMatrix& M) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    put_bytes(out, kDenseMagic, 4);
    put_le<std::uint32_t>(out, 1);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(M.rows()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(M.cols()));
    for (Index i = 0; i < M.size(); ++i) put_f32(out, M.data()[i]);
    if (!out) throw Error(Errc::io_error, "failed to write: " + path);
}

void write_dense_csv(std::ostream& out, const DenseMatrix& M) {
    out.precision(9); // round-trips any float32
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out << ',';
            out << M(i, j);
        }
        out << '\n';
    }
}

void save_dense_csv(const std::string& path, const DenseMatrix& M) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path);
    write_dense_csv(out, M);
    if (!out) throw Error(Errc::io_error, "failed to write: " + path);
}

} // namespace sham
