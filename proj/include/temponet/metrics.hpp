#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "temponet/temporal_graph.hpp"

namespace temponet {

// Undefined metric values are represented as std::nullopt and serialize as null.
using Metric = std::optional<double>;

/// Arcs over ordered vertex pairs. Undirected edges count in both directions.
inline Metric density(const Snapshot& s) {
    const auto n = static_cast<double>(s.vertex_count());
    if (s.vertex_count() < 2) return std::nullopt;
    double arcs = 0.0;
    for (const auto& e : s.edges()) arcs += (s.directed() || e.is_loop()) ? 1.0 : 2.0;
    return arcs / (n * (n - 1.0));
}

/// Mean local clustering over every vertex of the undirected projection;
/// vertices with fewer than two neighbours contribute 0.
inline double avg_clustering(const Adjacency& adj) {
    if (adj.size() == 0) return 0.0;
    double total = 0.0;
    for (VertexId v = 0; v < adj.size(); ++v) {
        const auto& nv = adj.neighbors[v];
        const std::size_t k = nv.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (VertexId a : nv) {
            const auto& na = adj.neighbors[a];
            auto i = nv.begin();
            auto j = na.begin();
            while (i != nv.end() && j != na.end()) {
                if (*i < *j) ++i;
                else if (*j < *i) ++j;
                else {
                    ++links;
                    ++i;
                    ++j;
                }
            }
        }
        total += static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
    return total / static_cast<double>(adj.size());
}

inline double avg_clustering(const Snapshot& s) { return avg_clustering(s.adjacency()); }

/// Vertices of the largest connected component of the undirected
/// projection. Ties go to the component holding the smallest vertex id.
inline std::vector<VertexId> largest_component(const Adjacency& adj) {
    std::vector<bool> seen(adj.size(), false);
    std::vector<VertexId> best;
    for (VertexId root = 0; root < adj.size(); ++root) {
        if (seen[root]) continue;
        std::vector<VertexId> comp{root};
        seen[root] = true;
        for (std::size_t head = 0; head < comp.size(); ++head)
            for (VertexId w : adj.neighbors[comp[head]])
                if (!seen[w]) {
                    seen[w] = true;
                    comp.push_back(w);
                }
        if (comp.size() > best.size()) best = std::move(comp);
    }
    return best;
}

/// Mean distance over ordered pairs of distinct vertices in the largest
/// connected component of the undirected projection.
inline Metric avg_shortest_path(const Adjacency& adj) {
    const auto comp = largest_component(adj);
    if (comp.size() < 2) return std::nullopt;
    std::vector<std::int64_t> dist(adj.size(), -1);
    std::vector<VertexId> frontier;
    double total = 0.0;
    for (VertexId source : comp) {
        for (VertexId v : comp) dist[v] = -1;
        frontier.assign(1, source);
        dist[source] = 0;
        for (std::size_t head = 0; head < frontier.size(); ++head) {
            const VertexId u = frontier[head];
            for (VertexId w : adj.neighbors[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    total += static_cast<double>(dist[w]);
                    frontier.push_back(w);
                }
        }
    }
    const auto c = static_cast<double>(comp.size());
    return total / (c * (c - 1.0));
}

inline Metric avg_shortest_path(const Snapshot& s) { return avg_shortest_path(s.adjacency()); }

// ---------------------------------------------------------------------------
// K-Stars
// ---------------------------------------------------------------------------

/// Top-k vertices among ids [0, degrees.size()) by degree, ties broken by
/// earlier join time, then smaller id. Returned in rank order.
inline std::vector<VertexId> k_stars_set(std::span<const std::size_t> degrees,
                                         std::span<const TimeStamp> join_times, std::size_t k) {
    std::vector<VertexId> order(degrees.size());
    std::iota(order.begin(), order.end(), VertexId{0});
    const std::size_t take = std::min(k, order.size());
    auto ranks_before = [&](VertexId a, VertexId b) {
        if (degrees[a] != degrees[b]) return degrees[a] > degrees[b];
        if (join_times[a] != join_times[b]) return join_times[a] < join_times[b];
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), ranks_before);
    order.resize(take);
    return order;
}

inline std::vector<VertexId> k_stars_set(const Snapshot& s, std::size_t k) {
    const auto degrees = s.degrees();
    return k_stars_set(degrees, s.graph().join_times().first(s.vertex_count()), k);
}

struct StarsVector {
    std::vector<std::size_t> counts;

    friend bool operator==(const StarsVector&, const StarsVector&) = default;
};

/// Entry i counts the vertices in the top-k at horizons[i] that were not in
/// the top-k at time 0 or at any earlier horizon.
inline StarsVector k_stars_vector(const TemporalGraph& g, std::span<const TimeStamp> horizons, std::size_t k) {
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (horizons[i] <= horizons[i - 1]) throw std::invalid_argument("horizons must be strictly increasing");

    DegreeTracker tracker(g);
    std::unordered_set<VertexId> seen;
    auto stars_at = [&](TimeStamp t) {
        tracker.advance_to(t);
        const auto n = g.vertices_until(t);
        return k_stars_set(tracker.degrees().first(n), g.join_times().first(n), k);
    };

    // The star set at activation (t = 0) is part of the union but not counted.
    if (horizons.empty() || horizons.front() >= 0)
        for (VertexId v : stars_at(0)) seen.insert(v);

    StarsVector out;
    out.counts.reserve(horizons.size());
    for (TimeStamp t : horizons) {
        std::size_t fresh = 0;
        for (VertexId v : stars_at(std::max<TimeStamp>(t, 0)))
            if (seen.insert(v).second) ++fresh;
        out.counts.push_back(fresh);
    }
    return out;
}

inline std::size_t k_stars_number(const StarsVector& v) {
    return std::accumulate(v.counts.begin(), v.counts.end(), std::size_t{0});
}

// ---------------------------------------------------------------------------
// Degree distribution
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMinPowerLawSamples = 50;

/// Maximum-likelihood exponent of a discrete power law above x_min, using the
/// continuous approximation 1 + n / sum(ln(d / (x_min - 1/2))).
inline Metric power_law_gamma(std::span<const std::size_t> degrees, std::size_t x_min) {
    if (x_min == 0) throw std::invalid_argument("x_min must be positive");
    const double shift = static_cast<double>(x_min) - 0.5;
    std::size_t n = 0;
    double log_sum = 0.0;
    std::optional<std::size_t> first;
    bool varied = false;
    for (std::size_t d : degrees) {
        if (d < x_min) continue;
        if (!first) first = d;
        else if (d != *first) varied = true;
        ++n;
        log_sum += std::log(static_cast<double>(d) / shift);
    }
    // A single repeated value carries no information about the tail exponent.
    if (n < kMinPowerLawSamples || !varied || !(log_sum > 0.0)) return std::nullopt;
    return 1.0 + static_cast<double>(n) / log_sum;
}

// ---------------------------------------------------------------------------
// Feature vector
// ---------------------------------------------------------------------------

struct FeatureVector {
    TimeStamp horizon = 0;
    std::size_t vertices = 0;
    std::size_t edges = 0;
    Metric density;
    double avg_clustering = 0.0;
    Metric avg_shortest_path;
    std::size_t max_degree = 0;
    Metric gamma;
};

struct FeatureOptions {
    std::size_t gamma_x_min = 1;
    bool shortest_paths = true;
};

inline FeatureVector compute_features(const Snapshot& s, const FeatureOptions& opts = {}) {
    const auto adj = s.adjacency();
    FeatureVector f;
    f.horizon = s.horizon();
    f.vertices = s.vertex_count();
    f.edges = s.edge_count();
    f.density = density(s);
    f.avg_clustering = avg_clustering(adj);
    if (opts.shortest_paths) f.avg_shortest_path = avg_shortest_path(adj);
    std::vector<std::size_t> degrees(adj.size());
    for (VertexId v = 0; v < adj.size(); ++v) degrees[v] = adj.degree(v);
    f.max_degree = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
    f.gamma = power_law_gamma(degrees, opts.gamma_x_min);
    return f;
}

inline nlohmann::json metric_json(const Metric& m) { return m ? nlohmann::json(*m) : nlohmann::json(nullptr); }

inline nlohmann::json to_json(const FeatureVector& f) {
    return {{"t", f.horizon},
            {"vertices", f.vertices},
            {"edges", f.edges},
            {"density", metric_json(f.density)},
            {"avg_clustering", f.avg_clustering},
            {"avg_shortest_path", metric_json(f.avg_shortest_path)},
            {"max_degree", f.max_degree},
            {"gamma", metric_json(f.gamma)}};
}

} // namespace temponet
