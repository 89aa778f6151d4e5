#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sham/container.hpp"
#include "sham/kernels.hpp"
#include "sham/prune.hpp"

namespace sham {

enum class FormatChoice : std::uint8_t { ham, sham, csc, imap, auto_select };

FormatChoice format_choice_from_name(const std::string& name);
const char* format_choice_name(FormatChoice f);

struct QuantSpec {
    QuantMethod method = QuantMethod::cws;
    int k = 2;
};

struct PipelineSpec {
    std::optional<PruneConfig> prune;
    std::optional<QuantSpec> quant;
    FormatChoice format = FormatChoice::auto_select; // auto: sHAM iff s < crossover_s
    WordSize b = WordSize::w32;
    std::uint64_t seed = 0;
};

struct PipelineOutput {
    DenseMatrix W; // post prune/quant matrix, exactly what the container stores
    Container container;
    SpaceReport report;
    SparsityStats st;
};

PipelineOutput run_pipeline(const DenseMatrix& M, const PipelineSpec& spec);

// Re-derives the stored matrix from the original input using the recorded
// pipeline parameters; deterministic for a fixed seed.
DenseMatrix apply_record(const DenseMatrix& M, const PipelineRecord& rec);

SpaceReport cmd_compress(const std::string& input_path, const PipelineSpec& spec,
                         const std::string& output_path, std::ostream& log);
DenseMatrix cmd_decompress(const std::string& container_path, const std::string& output_path,
                           std::ostream& log);
// true = contents match; diagnostics (with the first mismatching position) go to log.
bool cmd_verify(const std::string& container_path, const std::string& original_path,
                std::ostream& log);
Eigen::MatrixXd cmd_dot(const std::string& container_path, const std::string& x_path, int threads,
                        int bench_runs, const std::string& output_path, std::ostream& log);
void cmd_stats(const std::string& input_path, std::ostream& log);
void cmd_bounds(Index n, Index m, double s, std::uint64_t k, WordSize b, std::ostream& log);

// Sweep runner: a flat key=value spec (size, p, k, method, format, word_bits,
// threads, seed, vectors, runs, bench) expands to a grid of compression cells.
struct SweepSpec {
    std::vector<std::pair<Index, Index>> sizes;
    std::vector<double> p_grid; // negative value = no pruning
    std::vector<int> k_grid;
    std::vector<QuantMethod> methods;
    std::vector<FormatChoice> formats;
    WordSize b = WordSize::w32;
    int threads = 1;
    std::uint64_t seed = 0;
    int bench_vectors = 8;
    int bench_runs = 5;
    bool bench = true;
};

SweepSpec parse_sweep_spec(std::istream& in);
SweepSpec load_sweep_spec(const std::string& path);

struct BenchRow {
    Index n = 0, m = 0;
    double p = -1.0; // negative = no pruning
    int k = 0;
    std::string method;
    std::string format;
    int threads = 1;
    double s = 0.0;
    std::uint64_t k_distinct = 0;
    std::uint64_t actual_bits = 0;
    std::uint64_t serialized_bits = 0;
    double bound_bits = 0.0;
    double psi_actual = 0.0;
    double psi_bound = 0.0;
    std::uint64_t dense_bits = 0;
    double ratio = 0.0; // dense_bits / actual_bits
    double dot_ns_median = 0.0;
    double dense_dot_ns_median = 0.0;
    std::string status = "ok";
};

struct BenchReport {
    std::vector<BenchRow> rows;
};

BenchReport run_sweep(const SweepSpec& spec, std::ostream& log);
void write_report_csv(std::ostream& out, const BenchReport& report);
void write_report_json(std::ostream& out, const BenchReport& report);

} // namespace sham
