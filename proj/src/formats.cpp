#include "sham/formats.hpp"

#include <algorithm>
#include <cmath>

namespace sham {

namespace {

std::vector<float> column_order_values(const DenseMatrix& M) {
    std::vector<float> v;
    v.reserve(static_cast<std::size_t>(M.size()));
    for (Index j = 0; j < M.cols(); ++j)
        for (Index i = 0; i < M.rows(); ++i) v.push_back(M(i, j));
    return v;
}

void check_csc_shape(Index n, Index m, const std::vector<std::uint32_t>& ri,
                     const std::vector<std::uint64_t>& cb) {
    if (n < 1 || m < 1 || cb.size() != static_cast<std::size_t>(m) + 1 || cb.front() != 0 ||
        cb.back() != ri.size() || !std::is_sorted(cb.begin(), cb.end()))
        throw Error(Errc::corrupt_container, "inconsistent ri/cb index vectors");
    for (std::uint32_t r : ri)
        if (r >= static_cast<std::uint64_t>(n))
            throw Error(Errc::corrupt_container, "row index out of range");
}

} // namespace

CscMatrix to_csc(const DenseMatrix& M) {
    validate(M);
    CscMatrix C;
    C.n = M.rows();
    C.m = M.cols();
    C.cb.assign(static_cast<std::size_t>(M.cols()) + 1, 0);
    for (Index j = 0; j < M.cols(); ++j) {
        for (Index i = 0; i < M.rows(); ++i) {
            const float v = M(i, j);
            if (v != 0.0f) {
                C.nz.push_back(v);
                C.ri.push_back(static_cast<std::uint32_t>(i));
            }
        }
        C.cb[static_cast<std::size_t>(j) + 1] = C.nz.size();
    }
    return C;
}

DenseMatrix from_csc(const CscMatrix& C) {
    check_csc_shape(C.n, C.m, C.ri, C.cb);
    if (C.nz.size() != C.ri.size())
        throw Error(Errc::corrupt_container, "nz/ri length mismatch");
    DenseMatrix M = DenseMatrix::Zero(C.n, C.m);
    for (Index j = 0; j < C.m; ++j)
        for (std::uint64_t p = C.cb[static_cast<std::size_t>(j)];
             p < C.cb[static_cast<std::size_t>(j) + 1]; ++p)
            M(static_cast<Index>(C.ri[p]), j) = C.nz[p];
    return M;
}

std::vector<std::uint64_t> one_based_ri(const CscMatrix& C) {
    std::vector<std::uint64_t> out(C.ri.size());
    for (std::size_t i = 0; i < C.ri.size(); ++i) out[i] = static_cast<std::uint64_t>(C.ri[i]) + 1;
    return out;
}

std::vector<std::uint64_t> one_based_cb(const CscMatrix& C) {
    std::vector<std::uint64_t> out(C.cb.size());
    for (std::size_t i = 0; i < C.cb.size(); ++i) out[i] = C.cb[i] + 1;
    return out;
}

HamMatrix to_ham(const DenseMatrix& M, WordSize b) {
    validate(M);
    HamMatrix H;
    H.n = M.rows();
    H.m = M.cols();
    H.b = b;
    const std::vector<float> seq = column_order_values(M);
    H.code = build_code(make_symbol_table(seq));
    H.stream = encode(seq, H.code, b);
    return H;
}

DenseMatrix from_ham(const HamMatrix& H) {
    const std::vector<float> seq = decode_all(H.stream, H.code);
    if (seq.size() != static_cast<std::size_t>(H.n) * static_cast<std::size_t>(H.m))
        throw Error(Errc::corrupt_stream, "decoded symbol count does not match the shape");
    DenseMatrix M(H.n, H.m);
    std::size_t p = 0;
    for (Index j = 0; j < H.m; ++j)
        for (Index i = 0; i < H.n; ++i) M(i, j) = seq[p++];
    return M;
}

ShamMatrix to_sham(const DenseMatrix& M, WordSize b) {
    CscMatrix C = to_csc(M);
    ShamMatrix S;
    S.n = C.n;
    S.m = C.m;
    S.b = b;
    S.ri = std::move(C.ri);
    S.cb = std::move(C.cb);
    if (!C.nz.empty()) {
        S.code = build_code(make_symbol_table(C.nz));
        S.stream = encode(C.nz, S.code, b);
    } else {
        S.stream.b = b; // all-zero matrix: empty stream, empty code
    }
    return S;
}

DenseMatrix from_sham(const ShamMatrix& S) {
    check_csc_shape(S.n, S.m, S.ri, S.cb);
    const std::vector<float> nz = decode_all(S.stream, S.code);
    if (nz.size() != S.ri.size())
        throw Error(Errc::corrupt_stream, "decoded symbol count does not match ri");
    DenseMatrix M = DenseMatrix::Zero(S.n, S.m);
    for (Index j = 0; j < S.m; ++j)
        for (std::uint64_t p = S.cb[static_cast<std::size_t>(j)];
             p < S.cb[static_cast<std::size_t>(j) + 1]; ++p)
            M(static_cast<Index>(S.ri[p]), j) = nz[p];
    return M;
}

IndexMapMatrix to_index_map(const DenseMatrix& M, const Codebook& cb) {
    validate(M);
    if (cb.rows != M.rows() || cb.cols != M.cols())
        throw Error(Errc::dimension_mismatch, "codebook shape does not match the matrix");
    if (!bit_equal(reconstruct(cb), M))
        throw Error(Errc::invalid_argument, "codebook does not reproduce the matrix");

    IndexMapMatrix I;
    I.n = M.rows();
    I.m = M.cols();
    I.centers = cb.centers;

    std::int32_t zero_center = -1;
    const bool has_sentinel =
        std::any_of(cb.assignments.begin(), cb.assignments.end(),
                    [](std::int32_t a) { return a < 0; });
    if (has_sentinel) {
        for (std::size_t i = 0; i < I.centers.size(); ++i)
            if (I.centers[i] == 0.0f) { zero_center = static_cast<std::int32_t>(i); break; }
        if (zero_center < 0) {
            zero_center = static_cast<std::int32_t>(I.centers.size());
            I.centers.push_back(0.0f);
        }
    }
    if (I.centers.size() > 65536)
        throw Error(Errc::invalid_argument, "index map supports at most 65536 centers");

    I.index_bits = I.centers.size() <= 256 ? 8 : 16;
    I.indices.resize(static_cast<std::size_t>(M.size()));
    for (Index i = 0; i < M.size(); ++i) {
        const std::int32_t a = cb.assignments[static_cast<std::size_t>(i)];
        I.indices[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(a >= 0 ? a : zero_center);
    }
    return I;
}

DenseMatrix from_index_map(const IndexMapMatrix& I) {
    if (I.n < 1 || I.m < 1 ||
        I.indices.size() != static_cast<std::size_t>(I.n) * static_cast<std::size_t>(I.m))
        throw Error(Errc::corrupt_container, "index map shape mismatch");
    DenseMatrix M(I.n, I.m);
    for (Index i = 0; i < M.size(); ++i) {
        const std::uint16_t idx = I.indices[static_cast<std::size_t>(i)];
        if (idx >= I.centers.size())
            throw Error(Errc::corrupt_container, "index out of center range");
        M.data()[i] = I.centers[idx];
    }
    return M;
}

const char* format_name(FormatTag f) {
    switch (f) {
        case FormatTag::ham: return "ham";
        case FormatTag::sham: return "sham";
        case FormatTag::csc: return "csc";
        case FormatTag::imap: return "imap";
    }
    return "?";
}

FormatTag format_from_name(const std::string& name) {
    if (name == "ham") return FormatTag::ham;
    if (name == "sham") return FormatTag::sham;
    if (name == "csc") return FormatTag::csc;
    if (name == "imap") return FormatTag::imap;
    throw Error(Errc::invalid_argument, "unknown format: " + name);
}

FormatTag format_of(const CompressedMatrix& W) {
    return std::visit(
        [](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix>) return FormatTag::ham;
            else if constexpr (std::is_same_v<T, ShamMatrix>) return FormatTag::sham;
            else if constexpr (std::is_same_v<T, CscMatrix>) return FormatTag::csc;
            else return FormatTag::imap;
        },
        W);
}

Index rows_of(const CompressedMatrix& W) {
    return std::visit([](const auto& w) { return w.n; }, W);
}

Index cols_of(const CompressedMatrix& W) {
    return std::visit([](const auto& w) { return w.m; }, W);
}

DenseMatrix reconstruct(const CompressedMatrix& W) {
    return std::visit(
        [](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix>) return from_ham(w);
            else if constexpr (std::is_same_v<T, ShamMatrix>) return from_sham(w);
            else if constexpr (std::is_same_v<T, CscMatrix>) return from_csc(w);
            else return from_index_map(w);
        },
        W);
}

std::uint64_t accounting_bits(const CompressedMatrix& W, WordSize b) {
    const std::uint64_t wb = word_bits(b);
    return std::visit(
        [&](const auto& w) -> std::uint64_t {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix>) {
                return w.stream.bit_len + dict_bits(w.code, b);
            } else if constexpr (std::is_same_v<T, ShamMatrix>) {
                const std::uint64_t q = w.ri.size();
                return w.stream.bit_len + dict_bits(w.code, b) +
                       wb * (q + static_cast<std::uint64_t>(w.m) + 1);
            } else if constexpr (std::is_same_v<T, CscMatrix>) {
                const std::uint64_t q = w.nz.size();
                return wb * (2 * q + static_cast<std::uint64_t>(w.m) + 1);
            } else {
                return static_cast<std::uint64_t>(w.index_bits) *
                           static_cast<std::uint64_t>(w.n) * static_cast<std::uint64_t>(w.m) +
                       wb * w.centers.size();
            }
        },
        W);
}

double bound_bits(FormatTag f, Index n, Index m, double s, std::uint64_t k, WordSize b,
                  BoundHypothesis hyp) {
    if (n < 1 || m < 1 || s < 0.0 || s > 1.0 || k < 1)
        throw Error(Errc::invalid_argument, "bound_bits: inconsistent parameters");
    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double bb = static_cast<double>(word_bits(b));
    const double kk = static_cast<double>(k);
    switch (f) {
        case FormatTag::ham:
            if (hyp == BoundHypothesis::worst_case)
                return nm * (1.0 + std::log2(nm)) + 6.0 * nm * bb;
            return nm * (1.0 + std::log2(kk)) + 6.0 * kk * bb;
        case FormatTag::sham: {
            const double snm = s * nm;
            if (hyp == BoundHypothesis::worst_case) {
                const double stream = snm > 0.0 ? snm * (1.0 + std::log2(snm)) : 0.0;
                return stream + bb * (7.0 * snm + static_cast<double>(m) + 1.0);
            }
            return snm * (1.0 + std::log2(kk)) +
                   bb * (6.0 * kk + snm + static_cast<double>(m) + 1.0);
        }
        case FormatTag::csc:
            return bb * (2.0 * s * nm + static_cast<double>(m) + 1.0);
        case FormatTag::imap:
            return (kk <= 256.0 ? 8.0 : 16.0) * nm + kk * bb;
    }
    throw Error(Errc::invalid_argument, "bound_bits: unknown format");
}

double crossover_s(std::uint64_t k, WordSize b, Index n, Index m) {
    if (k < 1 || n < 1 || m < 1)
        throw Error(Errc::invalid_argument, "crossover_s: parameters must be positive");
    const double nm = static_cast<double>(n) * static_cast<double>(m);
    const double t = (1.0 + std::log2(static_cast<double>(k))) / word_bits(b);
    return (t - (static_cast<double>(m) + 1.0) / nm) / (1.0 + t);
}

SpaceReport make_space_report(const CompressedMatrix& W, WordSize b, const SparsityStats& st) {
    SpaceReport r;
    r.format = format_of(W);
    r.n = rows_of(W);
    r.m = cols_of(W);
    r.b = b;
    r.s = st.s;
    r.actual_bits = accounting_bits(W, b);

    const auto nm = static_cast<std::uint64_t>(r.n) * static_cast<std::uint64_t>(r.m);
    switch (r.format) {
        case FormatTag::ham: r.k = std::get<HamMatrix>(W).code.size(); break;
        case FormatTag::sham: r.k = std::get<ShamMatrix>(W).code.size(); break;
        case FormatTag::csc: r.k = st.k_distinct; break;
        case FormatTag::imap: r.k = std::get<IndexMapMatrix>(W).centers.size(); break;
    }

    if (r.k >= 1) {
        const BoundHypothesis hyp =
            r.k < nm ? BoundHypothesis::k_distinct : BoundHypothesis::worst_case;
        r.bound_bits = bound_bits(r.format, r.n, r.m, r.s, r.k, b, hyp);
    } else {
        r.bound_bits = bound_bits(r.format, r.n, r.m, r.s, 1, b, BoundHypothesis::k_distinct);
    }
    r.psi_actual = occupancy_ratio(static_cast<double>(r.actual_bits), r.n, r.m, b);
    r.psi_bound = occupancy_ratio(r.bound_bits, r.n, r.m, b);
    return r;
}

} // namespace sham
