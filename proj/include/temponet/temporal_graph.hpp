#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "temponet/errors.hpp"

namespace temponet {

using VertexId = std::uint32_t;
// Opaque caller-defined time unit. 0 is the activation instant of a network.
using TimeStamp = std::int64_t;

enum class Directedness { directed, undirected };

struct Edge {
    VertexId source = 0;
    VertexId target = 0;
    TimeStamp created = 0;

    bool is_loop() const noexcept { return source == target; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

namespace detail {

inline std::uint64_t pair_key(VertexId a, VertexId b) noexcept {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

inline bool edge_order(const Edge& a, const Edge& b) noexcept {
    if (a.created != b.created) return a.created < b.created;
    if (a.source != b.source) return a.source < b.source;
    return a.target < b.target;
}

} // namespace detail

class GraphBuilder;

/// A growing network: vertices carry join times, edges carry creation times.
///
/// Vertex ids are dense and assigned in join order, so the vertices present
/// at any horizon form a prefix of the id range. Edges are kept sorted by
/// (created, source, target); undirected edges are stored with
/// source <= target. Instances are immutable once built.
class TemporalGraph {
public:
    TemporalGraph() = default;

    bool directed() const noexcept { return directed_; }
    bool allow_self_loops() const noexcept { return allow_self_loops_; }
    bool simple() const noexcept { return simple_; }
    const std::string& time_unit_label() const noexcept { return time_unit_label_; }

    std::size_t vertex_count() const noexcept { return join_times_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return join_times_.empty(); }
    bool contains(VertexId v) const noexcept { return v < join_times_.size(); }

    std::span<const TimeStamp> join_times() const noexcept { return join_times_; }
    std::span<const Edge> edges() const noexcept { return edges_; }

    TimeStamp join_time(VertexId v) const {
        if (!contains(v)) throw not_found_error("unknown vertex " + std::to_string(v));
        return join_times_[v];
    }

    // Time at which the last vertex joined; 0 for an empty graph.
    TimeStamp t_max() const noexcept { return join_times_.empty() ? 0 : join_times_.back(); }

    std::size_t vertices_until(TimeStamp t) const noexcept {
        return static_cast<std::size_t>(
            std::upper_bound(join_times_.begin(), join_times_.end(), t) - join_times_.begin());
    }

    std::size_t edges_until(TimeStamp t) const noexcept {
        return static_cast<std::size_t>(
            std::upper_bound(edges_.begin(), edges_.end(), t,
                             [](TimeStamp value, const Edge& e) { return value < e.created; }) -
            edges_.begin());
    }

    // Copy with every time shifted by -offset. Used by normalization.
    TemporalGraph shifted(TimeStamp offset) const {
        TemporalGraph out = *this;
        for (auto& t : out.join_times_) t -= offset;
        for (auto& e : out.edges_) e.created -= offset;
        return out;
    }

    friend bool operator==(const TemporalGraph&, const TemporalGraph&) = default;

private:
    friend class GraphBuilder;

    bool directed_ = false;
    bool allow_self_loops_ = false;
    bool simple_ = true;
    std::string time_unit_label_;
    std::vector<TimeStamp> join_times_;
    std::vector<Edge> edges_;
};

/// Single-writer construction of a TemporalGraph.
///
/// In simple mode a repeated (source, target) pair collapses into one edge
/// stamped with the earliest creation time seen. Undirected graphs treat
/// (a, b) and (b, a) as the same pair.
class GraphBuilder {
public:
    explicit GraphBuilder(Directedness directedness = Directedness::undirected,
                          bool allow_self_loops = false, bool simple = true) {
        graph_.directed_ = directedness == Directedness::directed;
        graph_.allow_self_loops_ = allow_self_loops;
        graph_.simple_ = simple;
    }

    GraphBuilder& time_unit_label(std::string label) {
        graph_.time_unit_label_ = std::move(label);
        return *this;
    }

    // Join times must be non-negative and non-decreasing in call order.
    VertexId add_vertex(TimeStamp join_time) {
        if (join_time < 0) throw std::invalid_argument("join time must be non-negative");
        if (!graph_.join_times_.empty() && join_time < graph_.join_times_.back())
            throw std::invalid_argument("vertices must be added in join order");
        graph_.join_times_.push_back(join_time);
        return static_cast<VertexId>(graph_.join_times_.size() - 1);
    }

    // Returns false when the edge collapsed into an existing one.
    bool add_edge(VertexId source, VertexId target, TimeStamp created) {
        if (!graph_.contains(source) || !graph_.contains(target))
            throw not_found_error("edge endpoint is not a vertex");
        if (source == target && !graph_.allow_self_loops_)
            throw std::invalid_argument("self-loops are not allowed in this graph");
        if (created < graph_.join_times_[source] || created < graph_.join_times_[target])
            throw std::invalid_argument("edge created before one of its endpoints joined");
        if (!graph_.directed_ && source > target) std::swap(source, target);

        if (graph_.simple_) {
            const auto key = detail::pair_key(source, target);
            auto [it, inserted] = index_.try_emplace(key, graph_.edges_.size());
            if (!inserted) {
                auto& existing = graph_.edges_[it->second];
                existing.created = std::min(existing.created, created);
                return false;
            }
        }
        graph_.edges_.push_back({source, target, created});
        return true;
    }

    bool has_edge(VertexId source, VertexId target) const {
        if (!graph_.directed_ && source > target) std::swap(source, target);
        if (graph_.simple_) return index_.contains(detail::pair_key(source, target));
        return std::any_of(graph_.edges_.begin(), graph_.edges_.end(), [&](const Edge& e) {
            return e.source == source && e.target == target;
        });
    }

    std::size_t vertex_count() const noexcept { return graph_.join_times_.size(); }
    std::size_t edge_count() const noexcept { return graph_.edges_.size(); }

    TemporalGraph build() && {
        std::stable_sort(graph_.edges_.begin(), graph_.edges_.end(), detail::edge_order);
        index_.clear();
        return std::move(graph_);
    }

private:
    TemporalGraph graph_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// Undirected projection of a snapshot: sorted distinct neighbours with
/// self-loops removed, plus a per-vertex self-loop flag.
struct Adjacency {
    std::vector<std::vector<VertexId>> neighbors;
    std::vector<bool> has_loop;

    std::size_t size() const noexcept { return neighbors.size(); }

    // Distinct connecting vertices; a self-loop counts v itself once.
    std::size_t degree(VertexId v) const { return neighbors[v].size() + (has_loop[v] ? 1 : 0); }
};

/// The graph restricted to vertices joined and edges created up to a horizon.
/// A cheap view; the parent graph must outlive it.
class Snapshot {
public:
    Snapshot(const TemporalGraph& graph, TimeStamp horizon)
        : graph_(&graph),
          horizon_(horizon),
          vertex_count_(graph.vertices_until(horizon)),
          edge_count_(graph.edges_until(horizon)) {}

    const TemporalGraph& graph() const noexcept { return *graph_; }
    TimeStamp horizon() const noexcept { return horizon_; }
    std::size_t vertex_count() const noexcept { return vertex_count_; }
    std::size_t edge_count() const noexcept { return edge_count_; }
    bool directed() const noexcept { return graph_->directed(); }
    std::span<const Edge> edges() const noexcept { return graph_->edges().first(edge_count_); }

    Adjacency adjacency() const {
        Adjacency adj;
        adj.neighbors.resize(vertex_count_);
        adj.has_loop.assign(vertex_count_, false);
        for (const auto& e : edges()) {
            if (e.is_loop()) {
                adj.has_loop[e.source] = true;
                continue;
            }
            adj.neighbors[e.source].push_back(e.target);
            adj.neighbors[e.target].push_back(e.source);
        }
        for (auto& list : adj.neighbors) {
            std::sort(list.begin(), list.end());
            list.erase(std::unique(list.begin(), list.end()), list.end());
        }
        return adj;
    }

    std::vector<std::size_t> degrees() const {
        const auto adj = adjacency();
        std::vector<std::size_t> out(vertex_count_);
        for (VertexId v = 0; v < vertex_count_; ++v) out[v] = adj.degree(v);
        return out;
    }

private:
    const TemporalGraph* graph_;
    TimeStamp horizon_;
    std::size_t vertex_count_;
    std::size_t edge_count_;
};

inline Snapshot snapshot_at(const TemporalGraph& g, TimeStamp t) { return Snapshot(g, t); }

// interval, 2*interval, ... below t_max, then t_max itself.
inline std::vector<TimeStamp> series_horizons(TimeStamp t_max, TimeStamp interval) {
    if (interval <= 0) throw std::invalid_argument("interval must be positive");
    std::vector<TimeStamp> out;
    for (TimeStamp t = interval; t < t_max; t += interval) out.push_back(t);
    out.push_back(t_max);
    return out;
}

inline std::vector<Snapshot> snapshot_series(const TemporalGraph& g, TimeStamp interval) {
    std::vector<Snapshot> out;
    for (TimeStamp t : series_horizons(g.t_max(), interval)) out.emplace_back(g, t);
    return out;
}

inline std::size_t degree_at(const TemporalGraph& g, VertexId v, TimeStamp t) {
    if (!g.contains(v)) throw not_found_error("unknown vertex " + std::to_string(v));
    std::unordered_set<VertexId> seen;
    for (const auto& e : g.edges().first(g.edges_until(t))) {
        if (e.source == v) seen.insert(e.target);
        else if (e.target == v) seen.insert(e.source);
    }
    return seen.size();
}

/// Degrees under the distinct-neighbour definition, advanced edge by edge in
/// creation order. Lets horizon sweeps avoid rebuilding adjacency.
class DegreeTracker {
public:
    explicit DegreeTracker(const TemporalGraph& g) : graph_(&g), degrees_(g.vertex_count(), 0) {}

    void advance_to(TimeStamp t) {
        const auto edges = graph_->edges();
        while (cursor_ < edges.size() && edges[cursor_].created <= t) {
            const auto& e = edges[cursor_++];
            const auto key = detail::pair_key(std::min(e.source, e.target), std::max(e.source, e.target));
            if (!seen_.insert(key).second) continue;
            ++degrees_[e.source];
            if (!e.is_loop()) ++degrees_[e.target];
        }
    }

    std::span<const std::size_t> degrees() const noexcept { return degrees_; }

private:
    const TemporalGraph* graph_;
    std::vector<std::size_t> degrees_;
    std::unordered_set<std::uint64_t> seen_;
    std::size_t cursor_ = 0;
};

} // namespace temponet
