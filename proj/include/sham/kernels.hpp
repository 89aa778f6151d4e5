#pragma once

#include <Eigen/Core>

#include "sham/formats.hpp"

namespace sham {

// Reference product x^T W with 64-bit accumulation.
Eigen::VectorXd dot_dense(const Eigen::VectorXd& x, const DenseMatrix& M);

struct DotResult {
    Eigen::VectorXd out;                // length m
    std::uint64_t decoded_symbols = 0;  // codewords pulled from the stream
};

// Streams the column-order codewords through the next-code-word scanner,
// keeping row/column/sum state; only one decoded weight is live at a time.
DotResult dot_ham(const Eigen::VectorXd& x, const HamMatrix& H);

// Decodes exactly q codewords, skipping empty columns through cb and gathering
// x entries through ri.
DotResult dot_sham(const Eigen::VectorXd& x, const ShamMatrix& S);

DotResult dot_csc(const Eigen::VectorXd& x, const CscMatrix& C);
DotResult dot_index_map(const Eigen::VectorXd& x, const IndexMapMatrix& I);
Eigen::VectorXd dot_any(const Eigen::VectorXd& x, const CompressedMatrix& W);

// Batched product: row i of X times W, rows split into ceil(r/q) chunks across q
// workers. Each row's accumulation order is independent of q, so the result is
// bit-identical to the sequential run.
Eigen::MatrixXd pardot(const Eigen::MatrixXd& X, const CompressedMatrix& W, int workers);

} // namespace sham
