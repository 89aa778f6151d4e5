#include "sham/kernels.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace sham {

Eigen::VectorXd dot_dense(const Eigen::VectorXd& x, const DenseMatrix& M) {
    if (x.size() != M.rows())
        throw Error(Errc::dimension_mismatch, "dot_dense: vector length != rows");
    return (x.transpose() * M.cast<double>()).transpose();
}

DotResult dot_ham(const Eigen::VectorXd& x, const HamMatrix& H) {
    if (x.size() != H.n)
        throw Error(Errc::dimension_mismatch, "dot_ham: vector length != rows");
    DotResult r;
    r.out = Eigen::VectorXd::Zero(H.m);
    Index row = 0, col = 0;
    double sum = 0.0;
    DecodeCursor cur;
    while (auto z = ncw(H.stream, cur, H.code)) {
        if (col >= H.m)
            throw Error(Errc::corrupt_stream, "dot_ham: stream longer than the matrix");
        sum += x[row] * static_cast<double>(*z);
        ++r.decoded_symbols;
        if (++row == H.n) {
            r.out[col++] = sum;
            sum = 0.0;
            row = 0;
        }
    }
    if (col != H.m || row != 0)
        throw Error(Errc::corrupt_stream, "dot_ham: stream shorter than the matrix");
    return r;
}

DotResult dot_sham(const Eigen::VectorXd& x, const ShamMatrix& S) {
    if (x.size() != S.n)
        throw Error(Errc::dimension_mismatch, "dot_sham: vector length != rows");
    if (S.cb.size() != static_cast<std::size_t>(S.m) + 1 || S.cb.back() != S.ri.size())
        throw Error(Errc::corrupt_stream, "dot_sham: inconsistent ri/cb");
    DotResult r;
    r.out = Eigen::VectorXd::Zero(S.m);
    std::uint64_t pos = 0;
    Index col = 0;
    double sum = 0.0;
    DecodeCursor cur;
    while (auto z = ncw(S.stream, cur, S.code)) {
        if (pos >= S.ri.size())
            throw Error(Errc::corrupt_stream, "dot_sham: stream longer than ri");
        while (col < S.m && S.cb[static_cast<std::size_t>(col) + 1] <= pos) ++col; // empty columns stay zero
        const std::uint32_t row = S.ri[pos];
        if (row >= static_cast<std::uint64_t>(S.n))
            throw Error(Errc::corrupt_stream, "dot_sham: row index out of range");
        sum += x[static_cast<Index>(row)] * static_cast<double>(*z);
        ++r.decoded_symbols;
        ++pos;
        if (col < S.m && S.cb[static_cast<std::size_t>(col) + 1] == pos) {
            r.out[col++] = sum;
            sum = 0.0;
        }
    }
    if (pos != S.ri.size())
        throw Error(Errc::corrupt_stream, "dot_sham: stream shorter than ri");
    return r;
}

DotResult dot_csc(const Eigen::VectorXd& x, const CscMatrix& C) {
    if (x.size() != C.n)
        throw Error(Errc::dimension_mismatch, "dot_csc: vector length != rows");
    DotResult r;
    r.out = Eigen::VectorXd::Zero(C.m);
    for (Index j = 0; j < C.m; ++j) {
        double sum = 0.0;
        for (std::uint64_t p = C.cb[static_cast<std::size_t>(j)];
             p < C.cb[static_cast<std::size_t>(j) + 1]; ++p)
            sum += x[static_cast<Index>(C.ri[p])] * static_cast<double>(C.nz[p]);
        r.out[j] = sum;
    }
    r.decoded_symbols = C.nz.size();
    return r;
}

DotResult dot_index_map(const Eigen::VectorXd& x, const IndexMapMatrix& I) {
    if (x.size() != I.n)
        throw Error(Errc::dimension_mismatch, "dot_index_map: vector length != rows");
    DotResult r;
    r.out = Eigen::VectorXd::Zero(I.m);
    for (Index j = 0; j < I.m; ++j) {
        double sum = 0.0;
        for (Index i = 0; i < I.n; ++i) {
            const std::uint16_t idx = I.indices[static_cast<std::size_t>(i * I.m + j)];
            sum += x[i] * static_cast<double>(I.centers[idx]); // index then center lookup
        }
        r.out[j] = sum;
    }
    r.decoded_symbols = static_cast<std::uint64_t>(I.n) * static_cast<std::uint64_t>(I.m);
    return r;
}

Eigen::VectorXd dot_any(const Eigen::VectorXd& x, const CompressedMatrix& W) {
    return std::visit(
        [&](const auto& w) {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, HamMatrix>) return dot_ham(x, w).out;
            else if constexpr (std::is_same_v<T, ShamMatrix>) return dot_sham(x, w).out;
            else if constexpr (std::is_same_v<T, CscMatrix>) return dot_csc(x, w).out;
            else return dot_index_map(x, w).out;
        },
        W);
}

Eigen::MatrixXd pardot(const Eigen::MatrixXd& X, const CompressedMatrix& W, int workers) {
    if (workers < 1)
        throw Error(Errc::invalid_argument, "pardot: worker count must be >= 1");
    if (X.cols() != rows_of(W))
        throw Error(Errc::dimension_mismatch, "pardot: X columns != matrix rows");
    const Index r = X.rows();
    if (r == 0) return Eigen::MatrixXd(0, cols_of(W));
    const Index q = std::min<Index>(workers, r);
    const Index chunk = (r + q - 1) / q;

    Eigen::MatrixXd out(r, cols_of(W));
    auto run = [&](Index lo, Index hi) {
        for (Index i = lo; i < hi; ++i) {
            const Eigen::VectorXd x = X.row(i).transpose();
            out.row(i) = dot_any(x, W).transpose();
        }
    };
    if (q == 1) {
        run(0, r);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(q));
    for (Index c = 0; c < q; ++c) {
        const Index lo = c * chunk;
        const Index hi = std::min(r, lo + chunk);
        pool.emplace_back(run, lo, hi);
    }
    for (auto& t : pool) t.join();
    return out;
}

} // namespace sham
