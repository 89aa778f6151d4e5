// Command-line front end: compress / decompress / verify / dot / bounds / stats / sweep.
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 data corruption.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "sham/pipeline.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SHAM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "warning: ignoring unparsable SHAM_SEED\n";
        }
    }
    return 0;
}

int exit_code_for(const sham::Error& e) {
    switch (e.code()) {
        case sham::Errc::corrupt_stream:
        case sham::Errc::corrupt_container: return 3;
        default: return 2;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed weight-matrix toolkit (HAM / sHAM / CSC / index map)"};
    app.require_subcommand(1);

    std::string input, output, original, xpath, spec_path, report_kinds = "csv,json";
    double prune_p = -1.0;
    std::string quant, format = "auto";
    int k = 32;
    std::uint64_t seed = default_seed();
    unsigned bits = 32;
    int threads = 1, runs = 5;
    double s = 0.0;
    std::uint64_t bn = 0, bm = 0, bk = 1;

    auto* compress = app.add_subcommand("compress", "prune/quantize a matrix and write a container");
    compress->add_option("input", input, "dense matrix (raw f32 or CSV)")->required();
    compress->add_option("--out", output, "output container path")->required();
    compress->add_option("--prune-p", prune_p, "magnitude-pruning percentile in [0,100)");
    compress->add_option("--quant", quant, "quantizer: cws|pws|uq|ecsq");
    compress->add_option("--k", k, "target number of shared weights");
    compress->add_option("--seed", seed, "rng seed (default from SHAM_SEED)");
    compress->add_option("--format", format, "ham|sham|csc|imap|auto");
    compress->add_option("--word-bits", bits, "memory word size: 32|64");

    auto* decompress = app.add_subcommand("decompress", "expand a container to a dense matrix");
    decompress->add_option("input", input, "container path")->required();
    decompress->add_option("--out", output, "output matrix (.csv or raw)")->required();

    auto* verify = app.add_subcommand("verify", "check a container against the original matrix");
    verify->add_option("container", input, "container path")->required();
    verify->add_option("original", original, "original dense matrix")->required();

    auto* dot = app.add_subcommand("dot", "multiply vectors/rows against a compressed matrix");
    dot->add_option("container", input, "container path")->required();
    dot->add_option("x", xpath, "vector (n) or batch (r x n) operand")->required();
    dot->add_option("--threads", threads, "worker count for batched products");
    dot->add_option("--runs", runs, "timed repetitions (after one warm-up)");
    dot->add_option("--out", output, "result path (.csv or raw); stdout CSV when omitted");

    auto* bounds = app.add_subcommand("bounds", "print size bounds and the crossover sparsity");
    bounds->add_option("--n", bn, "rows")->required();
    bounds->add_option("--m", bm, "columns")->required();
    bounds->add_option("--s", s, "non-zero ratio")->required();
    bounds->add_option("--k", bk, "distinct values")->required();
    bounds->add_option("--word-bits", bits, "memory word size: 32|64");

    auto* stats_cmd = app.add_subcommand("stats", "print sparsity statistics of a dense matrix");
    stats_cmd->add_option("input", input, "dense matrix (raw f32 or CSV)")->required();

    auto* sweep = app.add_subcommand("sweep", "run a compression/benchmark grid from a spec file");
    sweep->add_option("spec", spec_path, "flat key=value spec file")->required();
    sweep->add_option("--out", output, "report base path (default: sweep_report)");
    sweep->add_option("--report", report_kinds, "csv|json|csv,json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (compress->parsed()) {
            sham::PipelineSpec spec;
            if (prune_p >= 0.0) spec.prune = sham::PruneConfig{prune_p};
            if (!quant.empty()) spec.quant = sham::QuantSpec{sham::method_from_name(quant), k};
            spec.format = sham::format_choice_from_name(format);
            spec.b = sham::word_size_from_bits(bits);
            spec.seed = seed;
            sham::cmd_compress(input, spec, output, std::cout);
        } else if (decompress->parsed()) {
            sham::cmd_decompress(input, output, std::cout);
        } else if (verify->parsed()) {
            if (!sham::cmd_verify(input, original, std::cout)) return 1;
        } else if (dot->parsed()) {
            sham::cmd_dot(input, xpath, threads, runs, output, std::cout);
        } else if (bounds->parsed()) {
            sham::cmd_bounds(static_cast<sham::Index>(bn), static_cast<sham::Index>(bm), s, bk,
                             sham::word_size_from_bits(bits), std::cout);
        } else if (stats_cmd->parsed()) {
            sham::cmd_stats(input, std::cout);
        } else if (sweep->parsed()) {
            const sham::SweepSpec sw = sham::load_sweep_spec(spec_path);
            const sham::BenchReport report = sham::run_sweep(sw, std::cout);
            const std::string base = output.empty() ? "sweep_report" : output;
            if (report_kinds.find("csv") != std::string::npos) {
                std::ofstream out(base + ".csv");
                sham::write_report_csv(out, report);
                std::cout << "wrote " << base << ".csv\n";
            }
            if (report_kinds.find("json") != std::string::npos) {
                std::ofstream out(base + ".json");
                sham::write_report_json(out, report);
                std::cout << "wrote " << base << ".json\n";
            }
        }
    } catch (const sham::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
