#pragma once

// Brute-force reference implementations. Deliberately naive: adjacency
// matrices, Floyd-Warshall, full sorts, explicit pair enumeration. None of
// them call into the library's algorithms; they only read raw edges and join
// times off a TemporalGraph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "temponet/temporal_graph.hpp"

namespace oracle {

using temponet::TemporalGraph;
using temponet::TimeStamp;
using temponet::VertexId;

struct View {
    std::size_t n = 0;
    std::vector<std::vector<bool>> adj;  // undirected projection, no loops
    std::vector<bool> loop;
    std::set<std::pair<VertexId, VertexId>> arcs;  // ordered pairs, loops as (v, v)
};

inline View view(const TemporalGraph& g, TimeStamp t) {
    View v;
    for (auto j : g.join_times())
        if (j <= t) ++v.n;
    v.adj.assign(v.n, std::vector<bool>(v.n, false));
    v.loop.assign(v.n, false);
    for (const auto& e : g.edges()) {
        if (e.created > t) continue;
        if (e.source == e.target) {
            v.loop[e.source] = true;
            v.arcs.insert({e.source, e.source});
            continue;
        }
        v.adj[e.source][e.target] = v.adj[e.target][e.source] = true;
        v.arcs.insert({e.source, e.target});
        if (!g.directed()) v.arcs.insert({e.target, e.source});
    }
    return v;
}

inline std::optional<double> density(const View& v) {
    if (v.n < 2) return std::nullopt;
    return static_cast<double>(v.arcs.size()) / static_cast<double>(v.n * (v.n - 1));
}

inline std::size_t degree(const View& v, VertexId x) {
    std::size_t d = v.loop[x] ? 1 : 0;
    for (std::size_t y = 0; y < v.n; ++y) d += v.adj[x][y] ? 1 : 0;
    return d;
}

// Triad enumeration over every (u, w) pair of neighbours.
inline double avg_clustering(const View& v) {
    if (v.n == 0) return 0.0;
    double sum = 0.0;
    for (std::size_t x = 0; x < v.n; ++x) {
        std::size_t k = 0, closed = 0;
        for (std::size_t u = 0; u < v.n; ++u) k += v.adj[x][u] ? 1 : 0;
        if (k < 2) continue;
        for (std::size_t u = 0; u < v.n; ++u)
            for (std::size_t w = u + 1; w < v.n; ++w)
                if (v.adj[x][u] && v.adj[x][w] && v.adj[u][w]) ++closed;
        sum += 2.0 * static_cast<double>(closed) / static_cast<double>(k * (k - 1));
    }
    return sum / static_cast<double>(v.n);
}

// Floyd-Warshall, then the largest component (ties: smallest member id).
inline std::optional<double> avg_shortest_path(const View& v) {
    constexpr auto inf = std::numeric_limits<std::size_t>::max() / 4;
    std::vector<std::vector<std::size_t>> d(v.n, std::vector<std::size_t>(v.n, inf));
    for (std::size_t i = 0; i < v.n; ++i) {
        d[i][i] = 0;
        for (std::size_t j = 0; j < v.n; ++j)
            if (v.adj[i][j]) d[i][j] = 1;
    }
    for (std::size_t k = 0; k < v.n; ++k)
        for (std::size_t i = 0; i < v.n; ++i)
            for (std::size_t j = 0; j < v.n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);

    std::vector<std::size_t> best;
    std::vector<bool> done(v.n, false);
    for (std::size_t i = 0; i < v.n; ++i) {
        if (done[i]) continue;
        std::vector<std::size_t> comp;
        for (std::size_t j = 0; j < v.n; ++j)
            if (d[i][j] < inf) {
                comp.push_back(j);
                done[j] = true;
            }
        if (comp.size() > best.size()) best = comp;
    }
    if (best.size() < 2) return std::nullopt;
    double sum = 0.0;
    for (auto a : best)
        for (auto b : best)
            if (a != b) sum += static_cast<double>(d[a][b]);
    return sum / static_cast<double>(best.size() * (best.size() - 1));
}

// Full sort with the (degree desc, join asc, id asc) key.
inline std::vector<VertexId> k_stars_set(const TemporalGraph& g, TimeStamp t, std::size_t k) {
    const auto v = view(g, t);
    std::vector<std::tuple<long long, TimeStamp, VertexId>> keys;
    for (VertexId x = 0; x < v.n; ++x)
        keys.emplace_back(-static_cast<long long>(degree(v, x)), g.join_times()[x], x);
    std::sort(keys.begin(), keys.end());
    std::vector<VertexId> out;
    for (std::size_t i = 0; i < std::min(k, keys.size()); ++i) out.push_back(std::get<2>(keys[i]));
    return out;
}

// Set differences against the union of all earlier star sets, t_0 = 0 included.
inline std::vector<std::size_t> k_stars_vector(const TemporalGraph& g, const std::vector<TimeStamp>& horizons,
                                               std::size_t k) {
    std::set<VertexId> seen;
    for (auto x : k_stars_set(g, 0, k)) seen.insert(x);
    std::vector<std::size_t> out;
    for (auto t : horizons) {
        std::set<VertexId> now;
        for (auto x : k_stars_set(g, t, k)) now.insert(x);
        std::vector<VertexId> fresh;
        std::set_difference(now.begin(), now.end(), seen.begin(), seen.end(), std::back_inserter(fresh));
        out.push_back(fresh.size());
        seen.insert(now.begin(), now.end());
    }
    return out;
}

// Rank = 1 + #smaller + (#equal - 1) / 2, by counting.
inline std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<double> r;
    for (double x : xs) {
        double less = 0, equal = 0;
        for (double y : xs) {
            less += y < x ? 1 : 0;
            equal += y == x ? 1 : 0;
        }
        r.push_back(1.0 + less + (equal - 1.0) / 2.0);
    }
    return r;
}

inline std::optional<double> spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    const auto rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx < 1e-12 || dy < 1e-12) return std::nullopt;
    return num / std::sqrt(dx * dy);
}

inline TimeStamp w_max_time(const std::vector<TimeStamp>& t_max, std::size_t w) {
    auto sorted = t_max;
    std::sort(sorted.rbegin(), sorted.rend());
    return sorted[w - 1];
}

struct Aggregate {
    std::vector<std::size_t> total;
    std::vector<double> avg;
    std::vector<double> norm_avg;
};

// Spreadsheet-style: one row per network, one column per horizon.
inline Aggregate stars_aggregate(const std::vector<TemporalGraph>& nets, std::size_t k,
                                 const std::vector<TimeStamp>& horizons) {
    const std::size_t m = horizons.size();
    std::vector<std::vector<std::optional<std::size_t>>> table;
    for (const auto& g : nets) {
        const auto v = k_stars_vector(g, horizons, k);
        std::vector<std::optional<std::size_t>> row(m);
        for (std::size_t i = 0; i < m; ++i)
            if (horizons[i] <= g.t_max()) row[i] = v[i];
        table.push_back(row);
    }
    Aggregate out{std::vector<std::size_t>(m, 0), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0)};
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t active = 0, normed = 0;
        double norm_sum = 0;
        for (const auto& row : table) {
            if (!row[i]) continue;
            ++active;
            out.total[i] += *row[i];
            std::size_t number = 0;
            for (const auto& c : row)
                if (c) number += *c;
            if (number > 0) {
                ++normed;
                norm_sum += static_cast<double>(*row[i]) / static_cast<double>(number);
            }
        }
        if (active) out.avg[i] = static_cast<double>(out.total[i]) / static_cast<double>(active);
        if (normed) out.norm_avg[i] = norm_sum / static_cast<double>(normed);
    }
    return out;
}

struct PairCount {
    std::uint64_t connected = 0;
    std::uint64_t eligible = 0;
};

// Every unordered vertex pair, binned by |join difference| / width.
inline std::map<TimeStamp, PairCount> time_diff_pairs(const TemporalGraph& g, TimeStamp width) {
    const auto v = view(g, std::numeric_limits<TimeStamp>::max());
    std::map<TimeStamp, PairCount> out;
    const auto joins = g.join_times();
    for (std::size_t a = 0; a < v.n; ++a)
        for (std::size_t b = a + 1; b < v.n; ++b) {
            auto& p = out[std::abs(joins[b] - joins[a]) / width];
            ++p.eligible;
            if (v.adj[a][b]) ++p.connected;
        }
    return out;
}

// Random graph on at most max_n vertices, join times in [0, 5].
inline TemporalGraph random_graph(std::mt19937_64& rng, std::size_t max_n = 8, bool allow_directed = true) {
    std::uniform_int_distribution<std::size_t> size(0, max_n);
    std::bernoulli_distribution coin(0.5);
    const auto n = size(rng);
    const bool directed = allow_directed && coin(rng);
    const bool loops = coin(rng);
    temponet::GraphBuilder b(directed ? temponet::Directedness::directed : temponet::Directedness::undirected, loops);
    std::vector<TimeStamp> joins;
    for (std::size_t i = 0; i < n; ++i) joins.push_back(std::uniform_int_distribution<TimeStamp>(0, 5)(rng));
    std::sort(joins.begin(), joins.end());
    for (auto j : joins) b.add_vertex(j);
    const double p = std::uniform_real_distribution<double>(0.1, 0.8)(rng);
    std::bernoulli_distribution edge(p);
    for (VertexId s = 0; s < n; ++s)
        for (VertexId t = 0; t < n; ++t) {
            if (s == t && !loops) continue;
            if (!directed && t < s) continue;
            if (!edge(rng)) continue;
            const auto start = std::max(joins[s], joins[t]);
            b.add_edge(s, t, start + std::uniform_int_distribution<TimeStamp>(0, 3)(rng));
        }
    return std::move(b).build();
}

} // namespace oracle
