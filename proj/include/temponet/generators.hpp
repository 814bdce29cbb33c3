#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "temponet/errors.hpp"
#include "temponet/random.hpp"
#include "temponet/temporal_graph.hpp"

namespace temponet {

// ---------------------------------------------------------------------------
// Growth schedules
// ---------------------------------------------------------------------------

/// Number of vertices added in each generator iteration.
struct GrowthSchedule {
    std::vector<std::size_t> sizes;

    GrowthSchedule() = default;
    explicit GrowthSchedule(std::vector<std::size_t> s) : sizes(std::move(s)) {
        if (std::find(sizes.begin(), sizes.end(), std::size_t{0}) != sizes.end())
            throw std::invalid_argument("schedule entries must be positive");
    }

    std::size_t iterations() const noexcept { return sizes.size(); }
    std::size_t total() const noexcept { return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); }

    friend bool operator==(const GrowthSchedule&, const GrowthSchedule&) = default;
};

struct LinearGrowth {
    std::size_t step;
    std::size_t iterations;
};

// coef * x^2 for x = 1 .. max_x_exclusive - 1.
struct PolynomialGrowth {
    std::size_t coef;
    std::size_t max_x_exclusive;
};

// The polynomial sequence in reverse order.
struct SigmoidalGrowth {
    std::size_t coef;
    std::size_t max_x_exclusive;
};

using ScheduleKind = std::variant<LinearGrowth, PolynomialGrowth, SigmoidalGrowth>;

inline GrowthSchedule make_schedule(const ScheduleKind& kind) {
    auto polynomial = [](std::size_t coef, std::size_t max_x) {
        if (coef == 0) throw std::invalid_argument("schedule coefficient must be positive");
        if (max_x <= 1) throw std::invalid_argument("max_x_exclusive must exceed 1");
        std::vector<std::size_t> sizes;
        for (std::size_t x = 1; x < max_x; ++x) sizes.push_back(coef * x * x);
        return sizes;
    };
    return std::visit(
        [&](const auto& k) -> GrowthSchedule {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, LinearGrowth>) {
                if (k.step == 0 || k.iterations == 0)
                    throw std::invalid_argument("linear schedule arguments must be positive");
                return GrowthSchedule(std::vector<std::size_t>(k.iterations, k.step));
            } else if constexpr (std::is_same_v<K, PolynomialGrowth>) {
                return GrowthSchedule(polynomial(k.coef, k.max_x_exclusive));
            } else {
                auto sizes = polynomial(k.coef, k.max_x_exclusive);
                std::reverse(sizes.begin(), sizes.end());
                return GrowthSchedule(std::move(sizes));
            }
        },
        kind);
}

// ---------------------------------------------------------------------------
// Time-difference weight functions
// ---------------------------------------------------------------------------

/// Relative probability of linking two time groups as a function of their
/// index difference. Always non-increasing, valued in [0, 1], positive at 0.
class TimeDiffFn {
public:
    enum class Form { exp_base, geometric, tabulated };

    // f(t) = base^(-1 - t)
    static TimeDiffFn exp_base(double base) {
        if (!(base >= 1.0)) throw std::invalid_argument("exp_base requires base >= 1");
        TimeDiffFn f(Form::exp_base);
        f.a_ = base;
        return f;
    }

    // f(t) = scale * ratio^t
    static TimeDiffFn geometric(double scale, double ratio) {
        if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("geometric scale must be in (0, 1]");
        if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("geometric ratio must be in [0, 1]");
        TimeDiffFn f(Form::geometric);
        f.a_ = scale;
        f.r_ = ratio;
        return f;
    }

    // f(t) = values[t], 0 past the end of the table.
    static TimeDiffFn tabulated(std::vector<double> values) {
        if (values.empty() || !(values.front() > 0.0))
            throw std::invalid_argument("tabulated f must start with a positive value");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] >= 0.0 && values[i] <= 1.0))
                throw std::invalid_argument("tabulated f values must lie in [0, 1]");
            if (i > 0 && values[i] > values[i - 1])
                throw std::invalid_argument("tabulated f must be non-increasing");
        }
        TimeDiffFn f(Form::tabulated);
        f.table_ = std::move(values);
        return f;
    }

    double operator()(std::size_t t) const {
        switch (form_) {
            case Form::exp_base: return std::pow(a_, -1.0 - static_cast<double>(t));
            case Form::geometric: return a_ * std::pow(r_, static_cast<double>(t));
            case Form::tabulated: return t < table_.size() ? table_[t] : 0.0;
        }
        return 0.0;
    }

    Form form() const noexcept { return form_; }
    double base() const noexcept { return a_; }
    double scale() const noexcept { return a_; }
    double ratio() const noexcept { return r_; }
    const std::vector<double>& table() const noexcept { return table_; }

private:
    explicit TimeDiffFn(Form form) : form_(form) {}

    Form form_;
    double a_ = 0.0;
    double r_ = 0.0;
    std::vector<double> table_;
};

/// Probability of drawing each existing time group 0..current_group for a
/// vertex of group current_group: f(current_group - j), normalized.
inline std::vector<double> group_probabilities(const TimeDiffFn& f, std::size_t current_group) {
    std::vector<double> p(current_group + 1);
    double total = 0.0;
    for (std::size_t j = 0; j <= current_group; ++j) {
        p[j] = f(current_group - j);
        total += p[j];
    }
    if (!(total > 0.0)) throw degenerate_distribution_error("time-difference weights are all zero");
    for (auto& x : p) x /= total;
    return p;
}

// ---------------------------------------------------------------------------
// Temporal preferential attachment
// ---------------------------------------------------------------------------

struct TpaParams {
    std::size_t m = 1;
    GrowthSchedule schedule;
    TimeDiffFn f = TimeDiffFn::exp_base(2.0);
    std::uint64_t seed = 0;
    std::size_t retry_limit = 100;
};

struct GeneratedGraph {
    TemporalGraph graph;
    // Edge attempts abandoned after retry_limit unsuccessful target draws.
    std::size_t skipped_edges = 0;
};

namespace detail {

inline std::size_t sample_cumulative(const std::vector<double>& cumulative, Rng& rng) {
    const double u = rng.uniform() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    auto idx = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(idx, cumulative.size() - 1);
}

} // namespace detail

/// Grows an undirected graph one time group per schedule entry. Vertices of
/// iteration i (0-based) join at time i + 1, so time 0 is the empty network.
///
/// Each joining vertex makes m attachment attempts. An attempt draws a time
/// group with group_probabilities, then a member of that group with
/// probability proportional to degree + 1; a draw hitting the vertex itself
/// or an existing neighbour is repeated, up to retry_limit draws. All of an
/// iteration's vertices are placed in their group before any of them attach,
/// and degrees update after every edge.
inline GeneratedGraph tpa_generate(const TpaParams& params) {
    if (params.m == 0) throw std::invalid_argument("m must be positive");
    if (params.retry_limit == 0) throw std::invalid_argument("retry_limit must be positive");
    if (params.schedule.sizes.empty()) throw std::invalid_argument("schedule must not be empty");

    Rng rng(params.seed);
    GraphBuilder builder(Directedness::undirected, false, true);
    GeneratedGraph out;

    // Each member appears once, plus once per incident edge: a uniform draw
    // from the pool is a draw proportional to degree + 1.
    std::vector<std::vector<VertexId>> pools;
    std::vector<std::size_t> group_of;

    for (std::size_t group = 0; group < params.schedule.sizes.size(); ++group) {
        const auto t = static_cast<TimeStamp>(group + 1);
        const auto first = static_cast<VertexId>(builder.vertex_count());
        auto& pool = pools.emplace_back();
        for (std::size_t j = 0; j < params.schedule.sizes[group]; ++j) {
            pool.push_back(builder.add_vertex(t));
            group_of.push_back(group);
        }
        const auto last = static_cast<VertexId>(builder.vertex_count());

        auto cumulative = group_probabilities(params.f, group);
        std::partial_sum(cumulative.begin(), cumulative.end(), cumulative.begin());

        for (VertexId v = first; v < last; ++v) {
            for (std::size_t e = 0; e < params.m; ++e) {
                const auto& target_pool = pools[detail::sample_cumulative(cumulative, rng)];
                bool attached = false;
                for (std::size_t attempt = 0; attempt < params.retry_limit; ++attempt) {
                    const VertexId u = target_pool[rng.below(target_pool.size())];
                    if (u == v || builder.has_edge(v, u)) continue;
                    builder.add_edge(v, u, t);
                    pools[group_of[u]].push_back(u);
                    pools[group].push_back(v);
                    attached = true;
                    break;
                }
                if (!attached) ++out.skipped_edges;
            }
        }
    }
    out.graph = std::move(builder).build();
    return out;
}

// ---------------------------------------------------------------------------
// Baseline models
// ---------------------------------------------------------------------------

struct BarabasiAlbert {
    std::size_t m;
};
struct WattsStrogatz {
    std::size_t k;
    double p;
};
struct NewmanWatts {
    std::size_t k;
    double p;
};
struct HolmeKim {
    std::size_t m;
    double p_triangle;
};
struct ForestFire {
    double p_forward;
    double backward_factor = 0.0;
    std::size_t ambassadors = 1;
};

using BaselineModel = std::variant<BarabasiAlbert, WattsStrogatz, NewmanWatts, HolmeKim, ForestFire>;

namespace detail {

// Distinct elements drawn uniformly (with repetition) from seq until `count`
// have been found, in draw order.
inline std::vector<VertexId> random_subset(const std::vector<VertexId>& seq, std::size_t count, Rng& rng) {
    std::vector<VertexId> out;
    std::set<VertexId> seen;
    while (out.size() < count) {
        const VertexId x = seq[rng.below(seq.size())];
        if (seen.insert(x).second) out.push_back(x);
    }
    return out;
}

inline void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
}

inline TemporalGraph from_adjacency_sets(const std::vector<std::set<VertexId>>& adj) {
    GraphBuilder builder;
    for (std::size_t v = 0; v < adj.size(); ++v) builder.add_vertex(0);
    for (VertexId u = 0; u < adj.size(); ++u)
        for (VertexId w : adj[u])
            if (u < w) builder.add_edge(u, w, 0);
    return std::move(builder).build();
}

inline std::vector<std::set<VertexId>> ring_lattice(std::size_t n, std::size_t k) {
    std::vector<std::set<VertexId>> adj(n);
    for (std::size_t j = 1; j <= k / 2; ++j)
        for (std::size_t u = 0; u < n; ++u) {
            const auto w = static_cast<VertexId>((u + j) % n);
            adj[u].insert(w);
            adj[w].insert(static_cast<VertexId>(u));
        }
    return adj;
}

inline void check_lattice(std::size_t n, std::size_t k, double p) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("lattice degree k must be even and >= 2");
    if (k >= n) throw std::invalid_argument("lattice degree k must be smaller than n");
    check_probability(p, "p");
}

inline TemporalGraph barabasi_albert(std::size_t m, std::size_t n, Rng& rng) {
    if (m == 0 || m >= n) throw std::invalid_argument("BA requires 1 <= m < n");
    GraphBuilder builder;
    for (std::size_t v = 0; v < n; ++v) builder.add_vertex(static_cast<TimeStamp>(v + 1));
    std::vector<VertexId> targets(m);
    std::iota(targets.begin(), targets.end(), VertexId{0});
    std::vector<VertexId> repeated;
    for (auto source = static_cast<VertexId>(m); source < n; ++source) {
        for (VertexId t : targets) builder.add_edge(source, t, source + 1);
        repeated.insert(repeated.end(), targets.begin(), targets.end());
        repeated.insert(repeated.end(), m, source);
        targets = random_subset(repeated, m, rng);
    }
    return std::move(builder).build();
}

inline TemporalGraph watts_strogatz(std::size_t k, double p, std::size_t n, Rng& rng) {
    check_lattice(n, k, p);
    auto adj = ring_lattice(n, k);
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
            if (!rng.bernoulli(p)) continue;
            const auto v = static_cast<VertexId>((u + j) % n);
            if (adj[u].size() >= n - 1) continue;
            VertexId w;
            do {
                w = static_cast<VertexId>(rng.below(n));
            } while (w == u || adj[u].contains(w));
            adj[u].erase(v);
            adj[v].erase(static_cast<VertexId>(u));
            adj[u].insert(w);
            adj[w].insert(static_cast<VertexId>(u));
        }
    }
    return from_adjacency_sets(adj);
}

inline TemporalGraph newman_watts(std::size_t k, double p, std::size_t n, Rng& rng) {
    check_lattice(n, k, p);
    auto adj = ring_lattice(n, k);
    for (std::size_t j = 1; j <= k / 2; ++j) {
        for (std::size_t u = 0; u < n; ++u) {
            if (!rng.bernoulli(p)) continue;
            if (adj[u].size() >= n - 1) continue;
            VertexId w;
            do {
                w = static_cast<VertexId>(rng.below(n));
            } while (w == u || adj[u].contains(w));
            adj[u].insert(w);
            adj[w].insert(static_cast<VertexId>(u));
        }
    }
    return from_adjacency_sets(adj);
}

inline TemporalGraph holme_kim(std::size_t m, double p_triangle, std::size_t n, Rng& rng) {
    if (m == 0 || m >= n) throw std::invalid_argument("HK requires 1 <= m < n");
    check_probability(p_triangle, "p_triangle");
    GraphBuilder builder;
    std::vector<std::vector<VertexId>> adj(n);
    for (std::size_t v = 0; v < n; ++v) builder.add_vertex(static_cast<TimeStamp>(v + 1));
    auto link = [&](VertexId a, VertexId b, TimeStamp t) {
        if (builder.add_edge(a, b, t)) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    };

    std::vector<VertexId> repeated(m);
    std::iota(repeated.begin(), repeated.end(), VertexId{0});
    for (auto source = static_cast<VertexId>(m); source < n; ++source) {
        const TimeStamp t = source + 1;
        auto candidates = random_subset(repeated, m, rng);
        VertexId target = candidates.back();
        candidates.pop_back();
        link(source, target, t);
        repeated.push_back(target);
        std::size_t count = 1;
        while (count < m) {
            if (rng.bernoulli(p_triangle)) {
                std::vector<VertexId> closing;
                for (VertexId w : adj[target])
                    if (w != source && !builder.has_edge(source, w)) closing.push_back(w);
                if (!closing.empty()) {
                    const VertexId w = closing[rng.below(closing.size())];
                    link(source, w, t);
                    repeated.push_back(w);
                    ++count;
                    continue;
                }
            }
            target = candidates.back();
            candidates.pop_back();
            link(source, target, t);
            repeated.push_back(target);
            ++count;
        }
        repeated.insert(repeated.end(), m, source);
    }
    return std::move(builder).build();
}

inline TemporalGraph forest_fire(const ForestFire& model, std::size_t n, Rng& rng) {
    if (!(model.p_forward >= 0.0 && model.p_forward < 1.0))
        throw std::invalid_argument("forward probability must lie in [0, 1)");
    if (!(model.backward_factor >= 0.0 && model.backward_factor * model.p_forward < 1.0))
        throw std::invalid_argument("backward burning probability must lie in [0, 1)");
    if (model.ambassadors == 0) throw std::invalid_argument("at least one ambassador is required");
    if (n == 0) throw std::invalid_argument("n must be positive");

    GraphBuilder builder;
    for (std::size_t v = 0; v < n; ++v) builder.add_vertex(static_cast<TimeStamp>(v + 1));
    // out_links[v]: vertices v linked to when it joined; in_links the reverse.
    std::vector<std::vector<VertexId>> out_links(n), in_links(n);
    std::vector<std::size_t> visited_by(n, SIZE_MAX);
    const double p_out_stop = 1.0 - model.p_forward;
    const double p_in_stop = 1.0 - model.p_forward * model.backward_factor;

    for (VertexId v = 1; v < n; ++v) {
        const TimeStamp t = v + 1;
        visited_by[v] = v;
        std::vector<VertexId> queue;
        auto burn = [&](VertexId w) {
            visited_by[w] = v;
            builder.add_edge(v, w, t);
            out_links[v].push_back(w);
            in_links[w].push_back(v);
            queue.push_back(w);
        };
        for (std::size_t a = 0; a < model.ambassadors; ++a) {
            const auto w = static_cast<VertexId>(rng.below(v));
            if (visited_by[w] != v) burn(w);
        }
        auto spread = [&](const std::vector<VertexId>& links, std::uint64_t budget) {
            std::vector<VertexId> fresh;
            for (VertexId w : links)
                if (visited_by[w] != v) fresh.push_back(w);
            for (std::size_t i = 0; i < fresh.size() && budget > 0; ++i, --budget) {
                std::swap(fresh[i], fresh[i + rng.below(fresh.size() - i)]);
                burn(fresh[i]);
            }
        };
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const VertexId w = queue[head];
            spread(std::vector<VertexId>(out_links[w]), rng.geometric(p_out_stop));
            spread(std::vector<VertexId>(in_links[w]), rng.geometric(p_in_stop));
        }
    }
    return std::move(builder).build();
}

} // namespace detail

/// Static models (WS, NW) stamp every vertex and edge with time 0; growing
/// models stamp vertex i (0-based insertion order) and its edges with i + 1.
inline TemporalGraph baseline_generate(const BaselineModel& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    return std::visit(
        [&](const auto& mdl) -> TemporalGraph {
            using M = std::decay_t<decltype(mdl)>;
            if constexpr (std::is_same_v<M, BarabasiAlbert>) return detail::barabasi_albert(mdl.m, n, rng);
            else if constexpr (std::is_same_v<M, WattsStrogatz>) return detail::watts_strogatz(mdl.k, mdl.p, n, rng);
            else if constexpr (std::is_same_v<M, NewmanWatts>) return detail::newman_watts(mdl.k, mdl.p, n, rng);
            else if constexpr (std::is_same_v<M, HolmeKim>) return detail::holme_kim(mdl.m, mdl.p_triangle, n, rng);
            else return detail::forest_fire(mdl, n, rng);
        },
        model);
}

} // namespace temponet
