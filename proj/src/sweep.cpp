#include "sham/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sham {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double median_time_ns(int runs_requested, F&& body) {
    const int runs = std::max(1, runs_requested);
    body(); // warm-up
    std::vector<double> times;
    times.reserve(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    return median_of(std::move(times));
}

} // namespace

SweepSpec parse_sweep_spec(std::istream& in) {
    SweepSpec spec;
    spec.p_grid = {-1.0};
    spec.methods = {QuantMethod::cws};
    spec.k_grid = {32};
    spec.formats = {FormatChoice::ham, FormatChoice::sham, FormatChoice::csc, FormatChoice::imap};

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::invalid_argument,
                        "sweep spec line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::vector<std::string> items = split_list(value);
        try {
            if (key == "size") {
                spec.sizes.clear();
                for (const auto& it : items) {
                    const auto x = it.find('x');
                    if (x == std::string::npos)
                        throw Error(Errc::invalid_argument, "size entries look like 512x4096");
                    spec.sizes.emplace_back(std::stoll(it.substr(0, x)),
                                            std::stoll(it.substr(x + 1)));
                }
            } else if (key == "p") {
                spec.p_grid.clear();
                for (const auto& it : items)
                    spec.p_grid.push_back(it == "none" ? -1.0 : std::stod(it));
            } else if (key == "k") {
                spec.k_grid.clear();
                for (const auto& it : items) spec.k_grid.push_back(std::stoi(it));
            } else if (key == "method") {
                spec.methods.clear();
                for (const auto& it : items) spec.methods.push_back(method_from_name(it));
            } else if (key == "format") {
                spec.formats.clear();
                for (const auto& it : items) spec.formats.push_back(format_choice_from_name(it));
            } else if (key == "word_bits") {
                spec.b = word_size_from_bits(static_cast<unsigned>(std::stoul(value)));
            } else if (key == "threads") {
                spec.threads = std::stoi(value);
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else if (key == "vectors") {
                spec.bench_vectors = std::stoi(value);
            } else if (key == "runs") {
                spec.bench_runs = std::stoi(value);
            } else if (key == "bench") {
                spec.bench = std::stoi(value) != 0;
            } else {
                throw Error(Errc::invalid_argument, "unknown sweep spec key: " + key);
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw Error(Errc::invalid_argument,
                        "sweep spec line " + std::to_string(lineno) + ": cannot parse '" + value +
                            "'");
        }
    }
    return spec;
}

SweepSpec load_sweep_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot open sweep spec: " + path);
    return parse_sweep_spec(in);
}

BenchReport run_sweep(const SweepSpec& spec, std::ostream& log) {
    BenchReport report;
    for (const auto& [n, m] : spec.sizes) {
        Rng mat_rng(spec.seed);
        const DenseMatrix M = uniform_matrix(n, m, -1.0f, 1.0f, mat_rng);
        const std::uint64_t dense_bits = static_cast<std::uint64_t>(word_bits(spec.b)) *
                                         static_cast<std::uint64_t>(n) *
                                         static_cast<std::uint64_t>(m);

        Eigen::MatrixXd X;
        double dense_ns = 0.0;
        if (spec.bench) {
            Rng vec_rng = mat_rng.split();
            DenseMatrix Xf = uniform_matrix(std::max(1, spec.bench_vectors), n, 0.0f, 1.0f, vec_rng);
            X = Xf.cast<double>();
            const Eigen::MatrixXd Md = M.cast<double>();
            dense_ns = median_time_ns(spec.bench_runs, [&] {
                volatile double sink = (X * Md).sum();
                (void)sink;
            });
        }

        for (double p : spec.p_grid)
            for (QuantMethod method : spec.methods)
                for (int k : spec.k_grid)
                    for (FormatChoice format : spec.formats) {
                        BenchRow row;
                        row.n = n;
                        row.m = m;
                        row.p = p;
                        row.k = k;
                        row.method = method_name(method);
                        row.format = format_choice_name(format);
                        row.threads = spec.threads;
                        row.dense_bits = dense_bits;
                        row.dense_dot_ns_median = dense_ns;
                        try {
                            PipelineSpec ps;
                            if (p >= 0.0) ps.prune = PruneConfig{p};
                            ps.quant = QuantSpec{method, k};
                            ps.format = format;
                            ps.b = spec.b;
                            ps.seed = spec.seed;
                            PipelineOutput out = run_pipeline(M, ps);
                            row.format = format_name(out.report.format); // resolve "auto"
                            row.s = out.st.s;
                            row.k_distinct = out.st.k_distinct;
                            row.actual_bits = out.report.actual_bits;
                            row.serialized_bits = out.report.serialized_bits;
                            row.bound_bits = out.report.bound_bits;
                            row.psi_actual = out.report.psi_actual;
                            row.psi_bound = out.report.psi_bound;
                            row.ratio = static_cast<double>(dense_bits) /
                                        static_cast<double>(out.report.actual_bits);
                            if (spec.bench)
                                row.dot_ns_median = median_time_ns(spec.bench_runs, [&] {
                                    volatile double sink =
                                        pardot(X, out.container.matrix, spec.threads).sum();
                                    (void)sink;
                                });
                        } catch (const std::exception& e) {
                            row.status = e.what();
                        }
                        report.rows.push_back(std::move(row));
                        const BenchRow& r = report.rows.back();
                        log << "sweep " << r.n << "x" << r.m << " p=" << r.p << " " << r.method
                            << " k=" << r.k << " " << r.format << ": "
                            << (r.status == "ok" ? "psi=" + std::to_string(r.psi_actual)
                                                 : r.status)
                            << '\n';
                    }
    }
    return report;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
    out << "n,m,p,k,method,format,threads,s,k_distinct,actual_bits,serialized_bits,bound_bits,"
           "psi_actual,psi_bound,dense_bits,ratio,dot_ns_median,dense_dot_ns_median,status\n";
    for (const BenchRow& r : report.rows) {
        out << r.n << ',' << r.m << ',' << r.p << ',' << r.k << ',' << r.method << ',' << r.format
            << ',' << r.threads << ',' << r.s << ',' << r.k_distinct << ',' << r.actual_bits << ','
            << r.serialized_bits << ',' << r.bound_bits << ',' << r.psi_actual << ',' << r.psi_bound
            << ',' << r.dense_bits << ',' << r.ratio << ',' << r.dot_ns_median << ','
            << r.dense_dot_ns_median << ',' << r.status << '\n';
    }
}

void write_report_json(std::ostream& out, const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRow& r : report.rows) {
        rows.push_back({{"n", r.n},
                        {"m", r.m},
                        {"p", r.p},
                        {"k", r.k},
                        {"method", r.method},
                        {"format", r.format},
                        {"threads", r.threads},
                        {"s", r.s},
                        {"k_distinct", r.k_distinct},
                        {"actual_bits", r.actual_bits},
                        {"serialized_bits", r.serialized_bits},
                        {"bound_bits", r.bound_bits},
                        {"psi_actual", r.psi_actual},
                        {"psi_bound", r.psi_bound},
                        {"dense_bits", r.dense_bits},
                        {"ratio", r.ratio},
                        {"dot_ns_median", r.dot_ns_median},
                        {"dense_dot_ns_median", r.dense_dot_ns_median},
                        {"status", r.status}});
    }
    out << rows.dump(2) << '\n';
}

} // namespace sham
