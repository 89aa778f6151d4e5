#include "sham/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace sham {

namespace {

QuantResult apply_quant(const DenseMatrix& W, QuantMethod method, int k, std::uint64_t seed,
                        bool ignore_zeros) {
    Rng rng(seed);
    switch (method) {
        case QuantMethod::cws: return quantize_cws(W, k, rng, ignore_zeros);
        case QuantMethod::pws: return quantize_pws(W, k, rng, ignore_zeros);
        case QuantMethod::uq: {
            const TuneResult t = tune_to_k(QuantMethod::uq, W, k, seed, ignore_zeros);
            return quantize_uq(W, t.uq, ignore_zeros);
        }
        case QuantMethod::ecsq: {
            const TuneResult t = tune_to_k(QuantMethod::ecsq, W, k, seed, ignore_zeros);
            Rng fresh(seed); // the tuner probed with this exact stream
            return quantize_ecsq(W, t.ecsq, fresh, ignore_zeros);
        }
    }
    throw Error(Errc::invalid_argument, "unknown quantization method");
}

CompressedMatrix build_format(const DenseMatrix& W, FormatTag tag, WordSize b,
                              const Codebook* cb) {
    switch (tag) {
        case FormatTag::ham: return to_ham(W, b);
        case FormatTag::sham: return to_sham(W, b);
        case FormatTag::csc: return to_csc(W);
        case FormatTag::imap: {
            if (cb) return to_index_map(W, *cb);
            return to_index_map(W, codebook_from_matrix(W));
        }
    }
    throw Error(Errc::invalid_argument, "unknown format");
}

} // namespace

FormatChoice format_choice_from_name(const std::string& name) {
    if (name == "auto") return FormatChoice::auto_select;
    switch (format_from_name(name)) {
        case FormatTag::ham: return FormatChoice::ham;
        case FormatTag::sham: return FormatChoice::sham;
        case FormatTag::csc: return FormatChoice::csc;
        case FormatTag::imap: return FormatChoice::imap;
    }
    throw Error(Errc::invalid_argument, "unknown format: " + name);
}

const char* format_choice_name(FormatChoice f) {
    switch (f) {
        case FormatChoice::ham: return "ham";
        case FormatChoice::sham: return "sham";
        case FormatChoice::csc: return "csc";
        case FormatChoice::imap: return "imap";
        case FormatChoice::auto_select: return "auto";
    }
    return "?";
}

PipelineOutput run_pipeline(const DenseMatrix& M, const PipelineSpec& spec) {
    validate(M);
    PipelineOutput out;
    out.container.b = spec.b;
    PipelineRecord& rec = out.container.pipeline;
    rec.seed = spec.seed;

    out.W = M;
    if (spec.prune) {
        out.W = prune(out.W, *spec.prune);
        rec.pruned = true;
        rec.p = spec.prune->p;
    }

    std::optional<Codebook> cb;
    if (spec.quant) {
        const bool ignore_zeros = spec.prune.has_value(); // share only surviving weights
        QuantResult qr =
            apply_quant(out.W, spec.quant->method, spec.quant->k, spec.seed, ignore_zeros);
        out.W = std::move(qr.W);
        cb = std::move(qr.codebook);
        rec.quant = static_cast<std::uint8_t>(spec.quant->method);
        rec.k = static_cast<std::uint32_t>(spec.quant->k);
        rec.ignore_zeros = ignore_zeros;
    }

    out.st = stats(out.W);

    FormatTag tag = FormatTag::ham;
    switch (spec.format) {
        case FormatChoice::ham: tag = FormatTag::ham; break;
        case FormatChoice::sham: tag = FormatTag::sham; break;
        case FormatChoice::csc: tag = FormatTag::csc; break;
        case FormatChoice::imap: tag = FormatTag::imap; break;
        case FormatChoice::auto_select:
            tag = out.st.s < crossover_s(out.st.k_distinct, spec.b, out.W.rows(), out.W.cols())
                      ? FormatTag::sham
                      : FormatTag::ham;
            break;
    }

    out.container.matrix = build_format(out.W, tag, spec.b, cb ? &*cb : nullptr);
    out.report = make_space_report(out.container.matrix, spec.b, out.st);
    out.report.serialized_bits = container_bytes(out.container) * 8;
    return out;
}

DenseMatrix apply_record(const DenseMatrix& M, const PipelineRecord& rec) {
    DenseMatrix W = M;
    if (rec.pruned) W = prune(W, PruneConfig{rec.p});
    if (rec.quant != 0)
        W = apply_quant(W, static_cast<QuantMethod>(rec.quant), static_cast<int>(rec.k), rec.seed,
                        rec.ignore_zeros)
                .W;
    return W;
}

namespace {

void print_report(std::ostream& log, const SpaceReport& r) {
    const double dense_kb = static_cast<double>(word_bits(r.b)) * r.n * r.m / 8000.0;
    log << "format=" << format_name(r.format) << " n=" << r.n << " m=" << r.m
        << " b=" << word_bits(r.b) << " s=" << r.s << " k=" << r.k << '\n'
        << "actual_bits=" << r.actual_bits << " bound_bits=" << r.bound_bits
        << " serialized_bits=" << r.serialized_bits << '\n'
        << "size_kb=" << static_cast<double>(r.actual_bits) / 8000.0 << " bound_kb="
        << r.bound_bits / 8000.0 << " dense_kb=" << dense_kb << '\n'
        << "psi_actual=" << r.psi_actual << " psi_bound=" << r.psi_bound << '\n';
}

void print_vec(std::ostream& log, const char* name, const std::vector<std::uint64_t>& v) {
    log << name << "=(";
    for (std::size_t i = 0; i < v.size(); ++i) log << (i ? "," : "") << v[i];
    log << ")\n";
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

SpaceReport cmd_compress(const std::string& input_path, const PipelineSpec& spec,
                         const std::string& output_path, std::ostream& log) {
    const DenseMatrix M = load_dense(input_path);
    PipelineOutput out = run_pipeline(M, spec);
    save_container(output_path, out.container);
    print_report(log, out.report);
    if (out.report.format == FormatTag::csc && M.size() <= 64) {
        const auto& C = std::get<CscMatrix>(out.container.matrix);
        log << "nz=(";
        for (std::size_t i = 0; i < C.nz.size(); ++i) log << (i ? "," : "") << C.nz[i];
        log << ")\n";
        print_vec(log, "ri", one_based_ri(C));
        print_vec(log, "cb", one_based_cb(C));
    }
    return out.report;
}

DenseMatrix cmd_decompress(const std::string& container_path, const std::string& output_path,
                           std::ostream& log) {
    const Container c = load_container(container_path);
    DenseMatrix W = reconstruct(c.matrix);
    if (ends_with(output_path, ".csv"))
        save_dense_csv(output_path, W);
    else
        save_dense_raw(output_path, W);
    log << "decompressed " << W.rows() << "x" << W.cols() << " -> " << output_path << '\n';
    return W;
}

bool cmd_verify(const std::string& container_path, const std::string& original_path,
                std::ostream& log) {
    const Container c = load_container(container_path);
    const DenseMatrix stored = reconstruct(c.matrix);
    const DenseMatrix original = load_dense(original_path);
    if (original.rows() != stored.rows() || original.cols() != stored.cols()) {
        log << "verify: FAIL shape " << stored.rows() << "x" << stored.cols() << " vs "
            << original.rows() << "x" << original.cols() << '\n';
        return false;
    }
    const DenseMatrix expected = apply_record(original, c.pipeline);
    for (Index i = 0; i < stored.rows(); ++i)
        for (Index j = 0; j < stored.cols(); ++j)
            if (stored(i, j) != expected(i, j)) {
                log << "verify: FAIL first mismatch at (" << i << "," << j << "): stored "
                    << stored(i, j) << " expected " << expected(i, j) << '\n';
                return false;
            }
    log << "verify: OK (" << stored.rows() << "x" << stored.cols() << ")\n";
    return true;
}

Eigen::MatrixXd cmd_dot(const std::string& container_path, const std::string& x_path, int threads,
                        int bench_runs, const std::string& output_path, std::ostream& log) {
    const Container c = load_container(container_path);
    const Index n = rows_of(c.matrix);
    DenseMatrix Xf = load_dense(x_path);
    // A single vector may arrive as n x 1 or 1 x n; batches are r x n.
    if (Xf.cols() == 1 && Xf.rows() == n && n != 1) Xf = Xf.transpose().eval();
    if (Xf.cols() != n)
        throw Error(Errc::dimension_mismatch, "dot: operand columns do not match matrix rows");
    const Eigen::MatrixXd X = Xf.cast<double>();

    Eigen::MatrixXd out;
    std::vector<double> times;
    const int runs = std::max(1, bench_runs);
    for (int r = 0; r <= runs; ++r) { // one warm-up plus timed runs
        const auto t0 = std::chrono::steady_clock::now();
        out = pardot(X, c.matrix, threads);
        const auto t1 = std::chrono::steady_clock::now();
        if (r > 0)
            times.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    log << "dot: " << X.rows() << "x" << n << " * " << n << "x" << cols_of(c.matrix)
        << " median " << median_of(times) / 1e6 << " ms over " << runs << " runs (threads="
        << threads << ")\n";

    if (!output_path.empty()) {
        const DenseMatrix Yf = out.cast<float>();
        if (ends_with(output_path, ".csv"))
            save_dense_csv(output_path, Yf);
        else
            save_dense_raw(output_path, Yf);
    } else {
        write_dense_csv(log, out.cast<float>());
    }
    return out;
}

void cmd_stats(const std::string& input_path, std::ostream& log) {
    const DenseMatrix M = load_dense(input_path);
    const SparsityStats st = stats(M);
    log << "n=" << M.rows() << " m=" << M.cols() << " q=" << st.q << " s=" << st.s
        << " k_distinct=" << st.k_distinct << '\n';
}

void cmd_bounds(Index n, Index m, double s, std::uint64_t k, WordSize b, std::ostream& log) {
    const double bnm = static_cast<double>(word_bits(b)) * static_cast<double>(n) * m;
    auto line = [&](const char* name, double bits) {
        log << name << ": bits=" << bits << " psi=" << bits / bnm << '\n';
    };
    line("ham_worst", bound_bits(FormatTag::ham, n, m, s, k, b, BoundHypothesis::worst_case));
    line("ham_k", bound_bits(FormatTag::ham, n, m, s, k, b, BoundHypothesis::k_distinct));
    line("sham_worst", bound_bits(FormatTag::sham, n, m, s, k, b, BoundHypothesis::worst_case));
    line("sham_k", bound_bits(FormatTag::sham, n, m, s, k, b, BoundHypothesis::k_distinct));
    line("csc", bound_bits(FormatTag::csc, n, m, s, k, b, BoundHypothesis::k_distinct));
    line("imap", bound_bits(FormatTag::imap, n, m, s, k, b, BoundHypothesis::k_distinct));
    log << "crossover_s=" << crossover_s(k, b, n, m) << " (s=" << s
        << (s < crossover_s(k, b, n, m) ? " -> sham" : " -> ham") << ")\n";
}

} // namespace sham
