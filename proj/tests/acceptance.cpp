// Acceptance suite: end-to-end checks of the compression formats, bounds,
// kernels and sweep orderings. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sham/kernels.hpp"
#include "sham/pipeline.hpp"

using namespace sham;

namespace {

struct CheckFailure {
    std::string message;
};

void require(bool cond, const std::string& msg) {
    if (!cond) throw CheckFailure{msg};
}

Eigen::VectorXd random_vector(Index n, Rng& rng) {
    Eigen::VectorXd x(n);
    for (Index i = 0; i < n; ++i) x[i] = rng.uniform() * 2.0 - 1.0;
    return x;
}

DenseMatrix example2() {
    DenseMatrix M(5, 5);
    M << 1, 0, 4, 0, 0,
         0, 10, 0, 0, 0,
         2, 3, 0, 0, 5,
         0, 0, 0, 0, 0,
         0, 0, 0, 0, 6;
    return M;
}

// ---------------------------------------------------------------------------
// Shared corpus for criteria 2-4: 1000 randomized pruned/quantized matrices.
// ---------------------------------------------------------------------------

struct CorpusCase {
    DenseMatrix W;
    double p;
    QuantMethod method;
    int k_requested;
};

const std::vector<CorpusCase>& corpus() {
    static const std::vector<CorpusCase> cases = [] {
        constexpr double p_grid[4] = {0.0, 50.0, 90.0, 99.0};
        constexpr QuantMethod methods[4] = {QuantMethod::cws, QuantMethod::pws, QuantMethod::uq,
                                            QuantMethod::ecsq};
        constexpr int k_grid[3] = {2, 32, 256};
        std::vector<CorpusCase> out;
        out.reserve(1000);
        for (int i = 0; i < 1000; ++i) {
            Rng rng(0xC0FFEE + static_cast<std::uint64_t>(i));
            const Index n = 2 + static_cast<Index>(rng.next_below(255));
            const Index m = 2 + static_cast<Index>(rng.next_below(255));
            const double p = p_grid[i % 4];
            const QuantMethod method = methods[(i / 4) % 4];
            const int k = k_grid[(i / 16) % 3];

            DenseMatrix W = uniform_matrix(n, m, -1.0f, 1.0f, rng);
            const bool pruned = p > 0.0;
            if (pruned) W = prune(W, PruneConfig{p});

            std::vector<float> eligible;
            for (Index j = 0; j < W.size(); ++j)
                if (!pruned || W.data()[j] != 0.0f) eligible.push_back(W.data()[j]);
            std::sort(eligible.begin(), eligible.end());
            const int distinct = static_cast<int>(
                std::unique(eligible.begin(), eligible.end()) - eligible.begin());

            if (distinct >= 1) { // an all-zero pruning result stays unquantized
                const int kk = std::min(k, distinct);
                const std::uint64_t seed = 0xABCD + static_cast<std::uint64_t>(i);
                Rng qrng(seed);
                switch (method) {
                    case QuantMethod::cws:
                        W = quantize_cws(W, kk, qrng, pruned).W;
                        break;
                    case QuantMethod::pws:
                        W = quantize_pws(W, std::max(2, kk), qrng, pruned).W;
                        break;
                    case QuantMethod::uq:
                        if (distinct >= 2) {
                            const TuneResult t =
                                tune_to_k(QuantMethod::uq, W, std::max(2, kk), seed, pruned);
                            W = quantize_uq(W, t.uq, pruned).W;
                        }
                        break;
                    case QuantMethod::ecsq: {
                        EcsqConfig cfg;
                        cfg.lambda = 1e-4;
                        cfg.k_target = kk;
                        W = quantize_ecsq(W, cfg, qrng, pruned).W;
                        break;
                    }
                }
            }
            out.push_back({std::move(W), p, method, k});
        }
        return out;
    }();
    return cases;
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

void criterion_csc_golden() {
    const CscMatrix C = to_csc(example2());
    require(C.nz == std::vector<float>{1, 2, 10, 3, 4, 5, 6}, "nz mismatch");
    require(one_based_ri(C) == std::vector<std::uint64_t>{1, 3, 2, 3, 1, 3, 5}, "ri mismatch");
    require(one_based_cb(C) == std::vector<std::uint64_t>{1, 3, 5, 6, 6, 8}, "cb mismatch");
}

void criterion_lossless_roundtrip() {
    std::size_t idx = 0;
    for (const CorpusCase& c : corpus()) {
        const WordSize b = idx % 10 == 0 ? WordSize::w64 : WordSize::w32;
        const std::string tag = " (case " + std::to_string(idx) + ")";
        require(bit_equal(from_ham(to_ham(c.W, b)), c.W), "ham round-trip" + tag);
        require(bit_equal(from_sham(to_sham(c.W, b)), c.W), "sham round-trip" + tag);
        require(bit_equal(from_csc(to_csc(c.W)), c.W), "csc round-trip" + tag);
        require(bit_equal(from_index_map(to_index_map(c.W, codebook_from_matrix(c.W))), c.W),
                "index map round-trip" + tag);
        ++idx;
    }
}

void criterion_bound_satisfaction() {
    const WordSize b = WordSize::w32;
    std::size_t idx = 0;
    for (const CorpusCase& c : corpus()) {
        const SparsityStats st = stats(c.W);
        const std::string tag = " (case " + std::to_string(idx++) + ")";

        const HamMatrix H = to_ham(c.W, b);
        const SpaceReport hr = make_space_report(CompressedMatrix{H}, b, st);
        require(static_cast<double>(hr.actual_bits) <= std::ceil(hr.bound_bits),
                "ham bound violated" + tag);
        if (H.code.size() >= 2)
            require(static_cast<double>(hr.actual_bits) < hr.bound_bits,
                    "ham bound not strict" + tag);

        if (st.q >= 1) {
            const ShamMatrix S = to_sham(c.W, b);
            const SpaceReport sr = make_space_report(CompressedMatrix{S}, b, st);
            require(static_cast<double>(sr.actual_bits) <= std::ceil(sr.bound_bits),
                    "sham bound violated" + tag);
            if (S.code.size() >= 2)
                require(static_cast<double>(sr.actual_bits) < sr.bound_bits,
                        "sham bound not strict" + tag);
        }
    }

    // Zipf-distributed 512x512 with 32 distinct values: the measured HAM size
    // must undercut the equal-frequency bound by at least 10%.
    const Index n = 512, m = 512;
    const std::size_t nm = static_cast<std::size_t>(n) * m;
    double hsum = 0.0;
    for (int j = 1; j <= 32; ++j) hsum += 1.0 / j;
    std::vector<float> values;
    values.reserve(nm);
    for (int j = 1; j <= 32 && values.size() < nm; ++j) {
        const auto cnt = static_cast<std::size_t>(static_cast<double>(nm) / (j * hsum));
        for (std::size_t t = 0; t < cnt && values.size() < nm; ++t)
            values.push_back(0.1f * static_cast<float>(j));
    }
    while (values.size() < nm) values.push_back(0.1f);
    DenseMatrix Z(n, m);
    std::copy(values.begin(), values.end(), Z.data());
    const SpaceReport zr = make_space_report(CompressedMatrix{to_ham(Z, b)}, b, stats(Z));
    require(zr.k == 32, "zipf instance should have 32 symbols");
    const double ratio = static_cast<double>(zr.actual_bits) / zr.bound_bits;
    require(ratio <= 0.9, "zipf measured/bound ratio " + std::to_string(ratio) + " > 0.9");
}

void criterion_kernel_oracle() {
    const double rtol = 1e-5, atol = 1e-7;
    auto check_close = [&](const Eigen::VectorXd& got, const Eigen::VectorXd& ref,
                           const std::string& what) {
        require(got.size() == ref.size(), what + ": size");
        for (Index i = 0; i < got.size(); ++i)
            require(std::fabs(got[i] - ref[i]) <= rtol * std::fabs(ref[i]) + atol,
                    what + ": component " + std::to_string(i));
    };

    std::size_t idx = 0;
    for (const CorpusCase& c : corpus()) {
        Rng rng(0xD07 + static_cast<std::uint64_t>(idx));
        const std::string tag = "case " + std::to_string(idx++);
        const Eigen::VectorXd x = random_vector(c.W.rows(), rng);
        const Eigen::VectorXd ref = dot_dense(x, c.W);
        check_close(dot_ham(x, to_ham(c.W, WordSize::w32)).out, ref, "ham " + tag);
        check_close(dot_sham(x, to_sham(c.W, WordSize::w32)).out, ref, "sham " + tag);
        check_close(dot_csc(x, to_csc(c.W)).out, ref, "csc " + tag);
        check_close(dot_index_map(x, to_index_map(c.W, codebook_from_matrix(c.W))).out, ref,
                    "imap " + tag);
    }

    const DenseMatrix E = example2();
    const HamMatrix H = to_ham(E, WordSize::w32);
    const ShamMatrix S = to_sham(E, WordSize::w32);
    const CscMatrix C = to_csc(E);
    const IndexMapMatrix I = to_index_map(E, codebook_from_matrix(E));
    Rng rng(0xE2);
    for (int t = 0; t < 100; ++t) {
        const Eigen::VectorXd x = random_vector(5, rng);
        const Eigen::VectorXd ref = dot_dense(x, E);
        const std::string tag = "example2 vec " + std::to_string(t);
        check_close(dot_ham(x, H).out, ref, "ham " + tag);
        check_close(dot_sham(x, S).out, ref, "sham " + tag);
        check_close(dot_csc(x, C).out, ref, "csc " + tag);
        check_close(dot_index_map(x, I).out, ref, "imap " + tag);
    }
}

void criterion_parallel_determinism() {
    Rng gen(0xFACE);
    DenseMatrix M = uniform_matrix(512, 512, -1.0f, 1.0f, gen);
    M = prune(M, PruneConfig{90.0});
    Rng qrng(7);
    M = quantize_cws(M, 32, qrng, true).W;
    const CompressedMatrix S = to_sham(M, WordSize::w32);

    Eigen::MatrixXd X(1000, 512);
    for (Index i = 0; i < X.size(); ++i) X.data()[i] = gen.uniform() * 2.0 - 1.0;

    const Eigen::MatrixXd base = pardot(X, S, 1);
    for (const int q : {2, 3, 8}) {
        const Eigen::MatrixXd out = pardot(X, S, q);
        require(std::memcmp(out.data(), base.data(),
                            sizeof(double) * static_cast<std::size_t>(out.size())) == 0,
                "pardot output differs at q=" + std::to_string(q));
    }
}

void criterion_huffman_sandwich() {
    Rng rng(0x5EED);
    for (int trial = 0; trial < 500; ++trial) {
        const int k = 2 + static_cast<int>(rng.next_below(60));
        std::vector<float> pool;
        for (int i = 0; i < k; ++i) {
            const int cnt = 1 + static_cast<int>(rng.next_below(400));
            for (int t = 0; t < cnt; ++t) pool.push_back(static_cast<float>(i) * 0.5f - 7.0f);
        }
        const HuffmanCode code = build_code(make_symbol_table(pool));
        const std::string tag = " (source " + std::to_string(trial) + ")";

        require(code.entropy() <= code.avg_len() + 1e-9, "H > avg_len" + tag);
        require(code.avg_len() <= code.entropy() + 1.0 + 1e-9, "avg_len > H+1" + tag);

        unsigned __int128 kraft = 0;
        for (std::uint8_t l : code.lengths())
            kraft += static_cast<unsigned __int128>(1) << (64 - l);
        require(kraft == static_cast<unsigned __int128>(1) << 64, "kraft sum != 1" + tag);

        for (std::size_t i = 0; i < code.size(); ++i)
            for (std::size_t j = 0; j < code.size(); ++j) {
                if (i == j) continue;
                const unsigned li = code.lengths()[i], lj = code.lengths()[j];
                if (li <= lj && (code.codeword(j) >> (lj - li)) == code.codeword(i))
                    require(false, "prefix violation" + tag);
            }
    }

    const HuffmanCode equal4 = build_code(
        make_symbol_table(std::vector<float>{1, 1, 2, 2, 3, 3, 4, 4}));
    require(equal4.avg_len() == 2.0, "equal-frequency 4-symbol source must average 2 bits");
}

void criterion_pws_unbiased() {
    Rng gen(0xB1A5);
    const DenseMatrix M = uniform_matrix(64, 64, -1.0f, 1.0f, gen);
    const int seeds = 200;

    // Interval extremes re-derived from the definition (linear-interpolation
    // quantiles at i/k); the per-entry draw is two-valued on the interval ends,
    // so its exact standard error is width * sqrt(p(1-p)/seeds).
    std::vector<double> sorted(M.data(), M.data() + M.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t ne = sorted.size();

    for (const int k : {2, 8}) {
        std::vector<double> chi(static_cast<std::size_t>(k) + 1);
        std::vector<double> chi_f(chi.size());
        for (std::size_t i = 0; i < chi.size(); ++i) {
            const double h = static_cast<double>(i) / k * static_cast<double>(ne - 1);
            const auto lo = static_cast<std::size_t>(h);
            const double frac = h - static_cast<double>(lo);
            double v = sorted[lo];
            if (frac > 0.0 && lo + 1 < ne) v += frac * (sorted[lo + 1] - sorted[lo]);
            chi[i] = v;
            chi_f[i] = static_cast<double>(static_cast<float>(v));
        }

        Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(64, 64);
        for (int t = 0; t < seeds; ++t) {
            Rng rng(40000 + static_cast<std::uint64_t>(k) * 1000 + t);
            sum += quantize_pws(M, k, rng, false).W.cast<double>();
        }

        int ok = 0;
        for (Index i = 0; i < M.size(); ++i) {
            const double w = M.reshaped()[i];
            const std::size_t j = static_cast<std::size_t>(
                std::upper_bound(chi.begin() + 1, chi.end() - 1, w) - (chi.begin() + 1));
            const double lo = chi[j], hi = chi[j + 1];
            const double p = hi > lo ? std::clamp((w - lo) / (hi - lo), 0.0, 1.0) : 0.0;
            const double width = chi_f[j + 1] - chi_f[j];
            const double se = std::sqrt(std::max(0.0, width * width * p * (1.0 - p) / seeds));
            const double mean = sum.reshaped()[i] / seeds;
            // 1e-6 covers the float cast of the interval extremes when se ~ 0
            if (std::fabs(mean - w) <= 3.0 * se + 1e-6) ++ok;
        }
        const double frac = static_cast<double>(ok) / static_cast<double>(M.size());
        require(frac >= 0.99, "k=" + std::to_string(k) + ": only " + std::to_string(frac) +
                                  " of entries within 3 standard errors");
    }
}

void criterion_ecsq() {
    Rng gen(0xECC);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 8 + static_cast<Index>(gen.next_below(40));
        const Index m = 8 + static_cast<Index>(gen.next_below(40));
        const DenseMatrix M = uniform_matrix(n, m, -1.0f, 1.0f, gen);
        const int k = 2 + static_cast<int>(gen.next_below(7));
        const std::string tag = " (instance " + std::to_string(trial) + ")";

        EcsqConfig cfg;
        cfg.lambda = std::pow(10.0, -4.0 + 3.0 * gen.uniform());
        cfg.k_target = k;
        Rng r1(7000 + trial);
        const QuantResult qr = quantize_ecsq(M, cfg, r1, false);
        require(!qr.cost_trace.empty(), "empty cost trace" + tag);
        for (std::size_t i = 1; i < qr.cost_trace.size(); ++i)
            require(qr.cost_trace[i] <=
                        qr.cost_trace[i - 1] + 1e-9 * (1.0 + std::fabs(qr.cost_trace[i - 1])),
                    "cost increased" + tag);

        Rng r2(7000 + trial), r3(7000 + trial);
        EcsqConfig zero = cfg;
        zero.lambda = 0.0;
        const QuantResult ecsq0 = quantize_ecsq(M, zero, r2, false);
        const QuantResult cws = quantize_cws(M, k, r3, false);
        require(bit_equal(ecsq0.W, cws.W), "lambda=0 output differs from cws" + tag);
        require(ecsq0.codebook.centers == cws.codebook.centers,
                "lambda=0 centers differ from cws" + tag);
    }
}

void criterion_sweep_ordering() {
    std::stringstream spec_text(
        "size = 512x4096\n"
        "p = 60, 70, 80, 90, 95, 99\n"
        "k = 32\n"
        "method = cws\n"
        "format = ham, sham, csc, imap\n"
        "seed = 424242\n"
        "bench = 0\n");
    const SweepSpec spec = parse_sweep_spec(spec_text);
    std::ostringstream sink;
    const BenchReport report = run_sweep(spec, sink);
    require(report.rows.size() == 24, "expected 24 sweep rows");

    auto bits = [&](double p, const std::string& fmt) -> std::uint64_t {
        for (const BenchRow& r : report.rows)
            if (r.p == p && r.format == fmt) {
                require(r.status == "ok", fmt + " cell failed at p=" + std::to_string(p));
                return r.actual_bits;
            }
        require(false, "missing row " + fmt + " p=" + std::to_string(p));
        return 0;
    };

    const std::vector<double> ps = {60, 70, 80, 90, 95, 99};
    for (std::size_t i = 1; i < ps.size(); ++i)
        require(bits(ps[i], "sham") < bits(ps[i - 1], "sham"),
                "sham size not strictly decreasing at p=" + std::to_string(ps[i]));

    require(bits(99, "sham") < bits(99, "csc"), "sham !< csc at p=99");
    require(bits(99, "csc") < bits(99, "imap"), "csc !< imap at p=99");

    for (const double p : {60.0, 70.0})
        require(bits(p, "imap") < bits(p, "csc"), "imap !< csc at p=" + std::to_string(p));

    for (const double p : ps)
        require(bits(p, "ham") < bits(p, "imap"), "ham !< imap at p=" + std::to_string(p));

    // index map ignores sparsity: its size is flat across the pruning grid
    for (const double p : ps)
        require(bits(p, "imap") == bits(60, "imap"),
                "imap size varies with p=" + std::to_string(p));

    const double ratio90 =
        (32.0 * 512.0 * 4096.0) / static_cast<double>(bits(90, "ham"));
    require(ratio90 >= 10.0 && ratio90 <= 80.0,
            "ham compression ratio at p=90 is " + std::to_string(ratio90) +
                ", outside the [10, 80] sanity band");
}

void criterion_crossover_predicate() {
    Rng rng(0xC705);
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.next_below(5000));
        const Index m = 2 + static_cast<Index>(rng.next_below(5000));
        const std::uint64_t k = 1 + rng.next_below(1024);
        const WordSize b = rng.next_below(2) ? WordSize::w32 : WordSize::w64;
        const double s = rng.uniform();
        const double bnm = static_cast<double>(word_bits(b)) * static_cast<double>(n) * m;
        const double psi_ham =
            bound_bits(FormatTag::ham, n, m, s, k, b, BoundHypothesis::k_distinct) / bnm;
        const double psi_sham =
            bound_bits(FormatTag::sham, n, m, s, k, b, BoundHypothesis::k_distinct) / bnm;
        require((psi_sham < psi_ham) == (s < crossover_s(k, b, n, m)),
                "crossover predicate mismatch (trial " + std::to_string(trial) + ")");
    }
}

struct Criterion {
    int id;
    const char* name;
    std::function<void()> fn;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "CSC golden vector", criterion_csc_golden},
        {2, "Lossless round-trip suite (1000 matrices)", criterion_lossless_roundtrip},
        {3, "Bound satisfaction + Zipf slack", criterion_bound_satisfaction},
        {4, "Kernel oracle equivalence", criterion_kernel_oracle},
        {5, "Parallel determinism", criterion_parallel_determinism},
        {6, "Huffman sandwich", criterion_huffman_sandwich},
        {7, "PWS unbiasedness", criterion_pws_unbiased},
        {8, "ECSQ monotonicity + lambda=0 degeneracy", criterion_ecsq},
        {9, "Sweep ordering", criterion_sweep_ordering},
        {10, "Crossover predicate", criterion_crossover_predicate},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            c.fn();
        } catch (const CheckFailure& f) {
            pass = false;
            detail = f.message;
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%2d] %-45s %s (%.2f s)%s%s\n", c.id, c.name, pass ? "PASS" : "FAIL", secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
