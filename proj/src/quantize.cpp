#include "sham/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sham {

namespace {

struct Eligible {
    std::vector<float> values;    // eligible entries, row-major order
    std::vector<Index> positions; // flat index of each eligible entry
};

Eligible gather(const DenseMatrix& M, bool ignore_zeros) {
    Eligible e;
    e.values.reserve(static_cast<std::size_t>(M.size()));
    e.positions.reserve(static_cast<std::size_t>(M.size()));
    for (Index i = 0; i < M.size(); ++i) {
        const float v = M.data()[i];
        if (ignore_zeros && v == 0.0f) continue;
        e.values.push_back(v);
        e.positions.push_back(i);
    }
    return e;
}

std::size_t distinct_count(std::vector<float> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

struct LloydOptions {
    double lambda = 0.0;
    int max_iters = 300;
    double tol = 1e-6;
    bool reseed_empty = true; // k-means keeps k clusters alive; ECSQ drops empty levels
};

struct LloydResult {
    std::vector<double> centers;
    std::vector<std::int32_t> assign; // per input point, index into centers
    std::vector<double> cost_trace;
    bool converged = false;
};

// One segment of the assignment envelope: level at `w` with additive penalty `c`
// wins on [x_start, next.x_start).
struct ActiveLine {
    double w, c;
    std::size_t src;
    double x_start;
};

// x above which the line at (wb, cb) beats line a; curvatures are equal so the
// cost difference is linear in x.
double crossing(const ActiveLine& a, double wb, double cb) {
    return 0.5 * (a.w + wb) + (cb - a.c) / (2.0 * (wb - a.w));
}

// Alternating minimization of (1/n) sum (x - w_i)^2 + lambda * H(p) over levels
// and assignments, on sorted 1-D data. Assignment is a lower-envelope sweep, so
// an iteration costs O(n + k log k) and the reduction order is fixed.
LloydResult lloyd_1d(const std::vector<float>& pts, int k, Rng& rng, const LloydOptions& opt) {
    const std::size_t n = pts.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a] != pts[b]) return pts[a] < pts[b];
        return a < b;
    });
    std::vector<double> sv(n);
    for (std::size_t r = 0; r < n; ++r) sv[r] = pts[order[r]];

    // k-means++ seeding; points at distance zero carry no sampling mass, so with
    // >= k distinct values the seeds are k distinct values.
    std::vector<double> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(sv[rng.next_below(n)]);
    std::vector<double> dist2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = sv[i] - centers[0];
        dist2[i] = d * d;
    }
    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (double d : dist2) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += dist2[i];
                if (cum > r) { pick = i; break; }
            }
            if (pick == n)
                for (std::size_t i = n; i-- > 0;)
                    if (dist2[i] > 0.0) { pick = i; break; }
        }
        if (pick == n) pick = rng.next_below(n);
        const double c = sv[pick];
        centers.push_back(c);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sv[i] - c;
            dist2[i] = std::min(dist2[i], d * d);
        }
    }

    std::vector<double> pmass(centers.size(), 1.0 / static_cast<double>(centers.size()));
    std::vector<std::int32_t> assign_sorted(n, 0);
    LloydResult res;
    double prev_cost = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        // Keep (center, mass) pairs sorted by center value.
        std::vector<std::size_t> cidx(centers.size());
        std::iota(cidx.begin(), cidx.end(), 0);
        std::sort(cidx.begin(), cidx.end(), [&](std::size_t a, std::size_t b) {
            if (centers[a] != centers[b]) return centers[a] < centers[b];
            return pmass[a] > pmass[b];
        });
        std::vector<double> cw(centers.size()), cm(centers.size());
        for (std::size_t i = 0; i < cidx.size(); ++i) {
            cw[i] = centers[cidx[i]];
            cm[i] = pmass[cidx[i]];
        }

        const double inf = std::numeric_limits<double>::infinity();
        std::vector<ActiveLine> active;
        for (std::size_t j = 0; j < cw.size(); ++j) {
            const double w = cw[j];
            double c = 0.0;
            if (opt.lambda > 0.0)
                c = cm[j] > 0.0 ? -opt.lambda * std::log2(cm[j]) : inf;
            if (c == inf) continue; // a level nobody uses cannot win a point
            if (!active.empty() && active.back().w == w) {
                if (c >= active.back().c) continue;
                active.pop_back();
            }
            double xs = -inf;
            while (!active.empty()) {
                xs = crossing(active.back(), w, c);
                if (xs <= active.back().x_start)
                    active.pop_back();
                else
                    break;
            }
            if (active.empty()) xs = -inf;
            active.push_back({w, c, j, xs});
        }

        std::size_t t = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (t + 1 < active.size() && sv[i] > active[t + 1].x_start) ++t;
            assign_sorted[i] = static_cast<std::int32_t>(active[t].src);
        }

        const std::size_t kc = cw.size();
        std::vector<double> sum(kc, 0.0);
        std::vector<std::uint64_t> cnt(kc, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[static_cast<std::size_t>(assign_sorted[i])] += sv[i];
            ++cnt[static_cast<std::size_t>(assign_sorted[i])];
        }

        bool reseeded = false;
        std::vector<double> next_centers;
        std::vector<double> next_mass;
        std::vector<std::int32_t> remap(kc, -1);
        for (std::size_t j = 0; j < kc; ++j) {
            if (cnt[j] > 0) {
                remap[j] = static_cast<std::int32_t>(next_centers.size());
                next_centers.push_back(sum[j] / static_cast<double>(cnt[j]));
                next_mass.push_back(static_cast<double>(cnt[j]) / static_cast<double>(n));
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            assign_sorted[i] = remap[static_cast<std::size_t>(assign_sorted[i])];

        if (opt.reseed_empty && next_centers.size() < static_cast<std::size_t>(k)) {
            // Re-seed each missing cluster from the point currently farthest from
            // its center; that point keeps its assignment until the next sweep.
            std::vector<double> d2(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = sv[i] - next_centers[static_cast<std::size_t>(assign_sorted[i])];
                d2[i] = d * d;
            }
            while (next_centers.size() < static_cast<std::size_t>(k)) {
                std::size_t far = 0;
                for (std::size_t i = 1; i < n; ++i)
                    if (d2[i] > d2[far]) far = i;
                if (d2[far] <= 0.0) break; // all points sit on centers already
                next_centers.push_back(sv[far]);
                next_mass.push_back(0.0);
                d2[far] = 0.0;
                reseeded = true;
            }
        }

        centers = std::move(next_centers);
        pmass = std::move(next_mass);

        double sse = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = sv[i] - centers[static_cast<std::size_t>(assign_sorted[i])];
            sse += d * d;
        }
        double entropy = 0.0;
        if (opt.lambda > 0.0)
            for (double p : pmass)
                if (p > 0.0) entropy -= p * std::log2(p);
        const double cost = sse / static_cast<double>(n) + opt.lambda * entropy;
        res.cost_trace.push_back(cost);

        if (!reseeded && std::isfinite(prev_cost) &&
            prev_cost - cost <= opt.tol * std::max(prev_cost, 1e-300)) {
            res.converged = true;
            break;
        }
        prev_cost = cost;
    }

    res.assign.assign(n, 0);
    for (std::size_t r = 0; r < n; ++r) res.assign[order[r]] = assign_sorted[r];
    res.centers = std::move(centers);
    return res;
}

QuantResult assemble(const DenseMatrix& M, const Eligible& e, const std::vector<float>& centers,
                     const std::vector<std::int32_t>& assign, QuantMethod method) {
    QuantResult r;
    r.W = M;
    r.codebook.rows = M.rows();
    r.codebook.cols = M.cols();
    r.codebook.method = method;
    r.codebook.centers = centers;
    r.codebook.assignments.assign(static_cast<std::size_t>(M.size()), Codebook::pruned);
    for (std::size_t i = 0; i < e.positions.size(); ++i) {
        r.codebook.assignments[static_cast<std::size_t>(e.positions[i])] = assign[i];
        r.W.data()[e.positions[i]] = centers[static_cast<std::size_t>(assign[i])];
    }
    return r;
}

// Deduplicated float values with a lookup from value to index.
struct CenterSet {
    std::vector<float> values;

    std::int32_t index_of(float v) const {
        auto it = std::lower_bound(values.begin(), values.end(), v);
        return static_cast<std::int32_t>(it - values.begin());
    }
};

CenterSet dedup_centers(std::vector<float> vals) {
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return CenterSet{std::move(vals)};
}

} // namespace

const char* method_name(QuantMethod m) {
    switch (m) {
        case QuantMethod::cws: return "cws";
        case QuantMethod::pws: return "pws";
        case QuantMethod::uq: return "uq";
        case QuantMethod::ecsq: return "ecsq";
    }
    return "?";
}

QuantMethod method_from_name(const std::string& name) {
    if (name == "cws") return QuantMethod::cws;
    if (name == "pws") return QuantMethod::pws;
    if (name == "uq") return QuantMethod::uq;
    if (name == "ecsq") return QuantMethod::ecsq;
    throw Error(Errc::invalid_argument, "unknown quantization method: " + name);
}

DenseMatrix reconstruct(const Codebook& cb) {
    DenseMatrix W(cb.rows, cb.cols);
    for (Index i = 0; i < W.size(); ++i) {
        const std::int32_t a = cb.assignments[static_cast<std::size_t>(i)];
        W.data()[i] = a < 0 ? 0.0f : cb.centers[static_cast<std::size_t>(a)];
    }
    return W;
}

QuantResult quantize_cws(const DenseMatrix& M, int k, Rng& rng, bool ignore_zeros) {
    validate(M);
    if (k < 1) throw Error(Errc::invalid_argument, "cws: k must be >= 1");
    Eligible e = gather(M, ignore_zeros);
    if (distinct_count(e.values) < static_cast<std::size_t>(k))
        throw Error(Errc::insufficient_distinct_values, "insufficient distinct values");
    LloydResult L = lloyd_1d(e.values, k, rng, LloydOptions{0.0, 300, 1e-6, true});
    std::vector<float> centers(L.centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        centers[i] = canonical(static_cast<float>(L.centers[i]));
    QuantResult r = assemble(M, e, centers, L.assign, QuantMethod::cws);
    r.converged = L.converged;
    r.cost_trace = std::move(L.cost_trace);
    return r;
}

QuantResult quantize_ecsq(const DenseMatrix& M, const EcsqConfig& cfg, Rng& rng, bool ignore_zeros) {
    validate(M);
    if (cfg.lambda < 0.0 || cfg.k_target < 1 || cfg.max_iters < 1 || cfg.tol <= 0.0)
        throw Error(Errc::invalid_argument, "ecsq: invalid config");
    Eligible e = gather(M, ignore_zeros);
    if (distinct_count(e.values) < static_cast<std::size_t>(cfg.k_target))
        throw Error(Errc::insufficient_distinct_values, "insufficient distinct values");
    LloydResult L = lloyd_1d(e.values, cfg.k_target, rng,
                             LloydOptions{cfg.lambda, cfg.max_iters, cfg.tol, false});
    std::vector<float> centers(L.centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        centers[i] = canonical(static_cast<float>(L.centers[i]));
    QuantResult r = assemble(M, e, centers, L.assign, QuantMethod::ecsq);
    r.converged = L.converged;
    r.cost_trace = std::move(L.cost_trace);
    return r;
}

QuantResult quantize_pws(const DenseMatrix& M, int k, Rng& rng, bool ignore_zeros) {
    validate(M);
    if (k < 2) throw Error(Errc::invalid_argument, "pws: k must be >= 2");
    Eligible e = gather(M, ignore_zeros);
    if (e.values.empty()) throw Error(Errc::invalid_argument, "pws: no eligible entries");

    std::vector<float> sorted = e.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t ne = sorted.size();

    // Interval extremes at the i/k-quantiles, linear interpolation.
    std::vector<double> chi(static_cast<std::size_t>(k) + 1);
    std::vector<float> chi_f(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i) {
        const double h = static_cast<double>(i) / k * static_cast<double>(ne - 1);
        const auto lo = static_cast<std::size_t>(h);
        const double frac = h - static_cast<double>(lo);
        double v = sorted[lo];
        if (frac > 0.0 && lo + 1 < ne) v += frac * (static_cast<double>(sorted[lo + 1]) - sorted[lo]);
        chi[i] = v;
        chi_f[i] = canonical(static_cast<float>(v));
    }

    CenterSet cs = dedup_centers(chi_f);
    std::vector<std::int32_t> assign(e.values.size());
    QuantResult r;
    {
        std::vector<float> produced(e.values.size());
        for (std::size_t i = 0; i < e.values.size(); ++i) {
            const double w = e.values[i];
            // Left-closed intervals: boundary values fall into the interval that
            // starts at them; the last interval is closed at the maximum.
            const std::size_t j = static_cast<std::size_t>(
                std::upper_bound(chi.begin() + 1, chi.end() - 1, w) - (chi.begin() + 1));
            const double lo = chi[j], hi = chi[j + 1];
            float v;
            if (hi <= lo) {
                v = chi_f[j];
            } else {
                double p_up = (w - lo) / (hi - lo);
                p_up = std::clamp(p_up, 0.0, 1.0);
                v = rng.uniform() < p_up ? chi_f[j + 1] : chi_f[j];
            }
            produced[i] = v;
            assign[i] = cs.index_of(v);
        }
        r = assemble(M, e, cs.values, assign, QuantMethod::pws);
        for (std::size_t i = 0; i < e.positions.size(); ++i)
            r.W.data()[e.positions[i]] = produced[i];
    }
    return r;
}

QuantResult quantize_uq(const DenseMatrix& M, const UqConfig& cfg, bool ignore_zeros) {
    validate(M);
    if (!(cfg.delta > 0.0) || std::fabs(cfg.d) > cfg.delta / 2.0)
        throw Error(Errc::invalid_argument, "uq: need delta > 0 and |d| <= delta/2");
    Eligible e = gather(M, ignore_zeros);

    std::vector<float> produced(e.values.size());
    for (std::size_t i = 0; i < e.values.size(); ++i) {
        const double w = e.values[i];
        const double y = cfg.delta * std::nearbyint((w + cfg.d) / cfg.delta) - cfg.d;
        produced[i] = canonical(static_cast<float>(y));
    }
    CenterSet cs = dedup_centers(produced);
    std::vector<std::int32_t> assign(produced.size());
    for (std::size_t i = 0; i < produced.size(); ++i) assign[i] = cs.index_of(produced[i]);
    return assemble(M, e, cs.values, assign, QuantMethod::uq);
}

Codebook codebook_from_matrix(const DenseMatrix& M) {
    validate(M);
    std::vector<float> vals(M.data(), M.data() + M.size());
    CenterSet cs = dedup_centers(std::move(vals));
    Codebook cb;
    cb.rows = M.rows();
    cb.cols = M.cols();
    cb.centers = cs.values;
    cb.assignments.resize(static_cast<std::size_t>(M.size()));
    for (Index i = 0; i < M.size(); ++i)
        cb.assignments[static_cast<std::size_t>(i)] = cs.index_of(M.data()[i]);
    return cb;
}

std::vector<double> aggregate_gradient(const DenseMatrix& grad, const Codebook& cb) {
    if (grad.rows() != cb.rows || grad.cols() != cb.cols)
        throw Error(Errc::dimension_mismatch, "aggregate_gradient: shape mismatch");
    std::vector<double> out(cb.k(), 0.0);
    for (Index i = 0; i < grad.size(); ++i) {
        const std::int32_t a = cb.assignments[static_cast<std::size_t>(i)];
        if (a >= 0) out[static_cast<std::size_t>(a)] += grad.data()[i];
    }
    return out;
}

namespace {

std::size_t uq_level_count(const std::vector<float>& eligible, double delta, double d) {
    std::vector<float> produced(eligible.size());
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        const double y = delta * std::nearbyint((static_cast<double>(eligible[i]) + d) / delta) - d;
        produced[i] = canonical(static_cast<float>(y));
    }
    return distinct_count(std::move(produced));
}

std::size_t ecsq_level_count(const std::vector<float>& eligible, const EcsqConfig& cfg,
                             std::uint64_t seed) {
    Rng rng(seed);
    LloydResult L = lloyd_1d(eligible, cfg.k_target, rng,
                             LloydOptions{cfg.lambda, cfg.max_iters, cfg.tol, false});
    std::vector<float> centers(L.centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i)
        centers[i] = canonical(static_cast<float>(L.centers[i]));
    return distinct_count(std::move(centers));
}

} // namespace

TuneResult tune_to_k(QuantMethod method, const DenseMatrix& M, int k, std::uint64_t seed,
                     bool ignore_zeros) {
    validate(M);
    if (k < 2) throw Error(Errc::invalid_argument, "tune_to_k: target k must be >= 2");
    Eligible e = gather(M, ignore_zeros);
    if (e.values.empty()) throw Error(Errc::invalid_argument, "tune_to_k: no eligible entries");
    const std::size_t distinct = distinct_count(e.values);
    const auto target = static_cast<std::size_t>(k);

    TuneResult best;
    best.method = method;

    if (method == QuantMethod::uq) {
        const auto [mn, mx] = std::minmax_element(e.values.begin(), e.values.end());
        const double range = static_cast<double>(*mx) - static_cast<double>(*mn);
        if (range <= 0.0) { // constant source: one level, whatever delta
            best.uq = UqConfig{1.0, 0.0};
            best.achieved_k = 1;
            best.exact = false;
            return best;
        }
        std::size_t best_gap = std::numeric_limits<std::size_t>::max();
        auto consider = [&](double delta, double d, std::size_t levels) {
            const std::size_t gap =
                levels > target ? levels - target : target - levels;
            // On equal gap prefer the larger interval: the boundary delta is the
            // natural grid size of the source.
            if (gap < best_gap || (gap == best_gap && delta > best.uq.delta)) {
                best_gap = gap;
                best.uq = UqConfig{delta, d};
                best.achieved_k = static_cast<int>(levels);
                best.exact = gap == 0;
            }
        };
        for (const bool half_bias : {false, true}) {
            auto probe = [&](double delta) {
                const double d = half_bias ? delta / 2.0 : 0.0;
                const std::size_t c = uq_level_count(e.values, delta, d);
                consider(delta, d, c);
                return c;
            };
            double lo = range / (4.0 * static_cast<double>(k));
            for (int i = 0; i < 48 && probe(lo) < target; ++i) lo /= 2.0;
            double hi = 2.0 * range;
            probe(hi);
            for (int i = 0; i < 64; ++i) {
                const double mid = std::sqrt(lo * hi); // delta spans orders of magnitude
                if (probe(mid) >= target)
                    lo = mid;
                else
                    hi = mid;
            }
            probe(lo);
            if (best_gap == 0) break;
        }
        return best;
    }

    if (method == QuantMethod::ecsq) {
        EcsqConfig base;
        base.max_iters = 120;
        base.tol = 1e-5;
        if (distinct <= target) {
            base.lambda = 0.0;
            base.k_target = static_cast<int>(distinct);
            best.ecsq = base;
            best.achieved_k = static_cast<int>(ecsq_level_count(e.values, base, seed));
            best.exact = static_cast<std::size_t>(best.achieved_k) == target;
            return best;
        }
        base.k_target = static_cast<int>(std::min<std::size_t>(4 * target, distinct));
        std::size_t best_gap = std::numeric_limits<std::size_t>::max();
        auto probe = [&](double lambda) {
            EcsqConfig cfg = base;
            cfg.lambda = lambda;
            const std::size_t c = ecsq_level_count(e.values, cfg, seed);
            const std::size_t gap = c > target ? c - target : target - c;
            if (gap < best_gap) {
                best_gap = gap;
                best.ecsq = cfg;
                best.achieved_k = static_cast<int>(c);
                best.exact = gap == 0;
            }
            return c;
        };
        if (probe(0.0) <= target) return best; // lambda cannot raise the level count
        double hi = 1e-6;
        int doublings = 0;
        while (probe(hi) > target && doublings++ < 60 && best_gap != 0) hi *= 2.0;
        double lo = 0.0;
        for (int i = 0; i < 64 && best_gap != 0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (probe(mid) > target)
                lo = mid;
            else
                hi = mid;
        }
        return best;
    }

    throw Error(Errc::invalid_argument, "tune_to_k applies to UQ and ECSQ only");
}

} // namespace sham
