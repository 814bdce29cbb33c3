#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "temponet/errors.hpp"
#include "temponet/io.hpp"
#include "temponet/temporal_graph.hpp"

namespace temponet {

struct IngestConfig {
    bool directed = false;
    bool allow_self_loops = false;
    // Collapse repeated pairs into one edge stamped with the earliest time.
    bool dedupe = true;
    std::size_t min_edges = 0;
    std::size_t min_vertices = 0;
    // Drop ids whose distinct-neighbour count exceeds this (bot-like hubs).
    std::optional<std::size_t> max_degree;
    std::string time_unit_label;
};

/// Builds a graph from a `source target timestamp` stream in any order.
///
/// A vertex joins at the earliest timestamp of any record naming it. Stream
/// ids are renumbered densely by (join time, stream id); pass external_ids to
/// receive the stream id of every vertex. Self-loop records keep their
/// vertex even when loops are disallowed and the edge is dropped.
inline TemporalGraph read_edge_stream(std::istream& in, const IngestConfig& config = {},
                                      std::vector<std::uint64_t>* external_ids = nullptr) {
    std::vector<EdgeRecord> records;
    for_each_record(in, [&](const EdgeRecord& r, std::size_t) { records.push_back(r); });
    if (records.empty()) throw std::invalid_argument("edge stream contains no records");

    if (config.max_degree) {
        std::unordered_map<std::uint64_t, std::unordered_set<std::uint64_t>> neighbours;
        for (const auto& r : records) {
            neighbours[r.source].insert(r.target);
            neighbours[r.target].insert(r.source);
        }
        std::erase_if(records, [&](const EdgeRecord& r) {
            return neighbours[r.source].size() > *config.max_degree ||
                   neighbours[r.target].size() > *config.max_degree;
        });
        if (records.empty()) throw rejected_graph_error("every record was removed by the max-degree filter");
    }

    std::unordered_map<std::uint64_t, TimeStamp> first_seen;
    for (const auto& r : records) {
        for (auto id : {r.source, r.target}) {
            auto [it, inserted] = first_seen.try_emplace(id, r.timestamp);
            if (!inserted) it->second = std::min(it->second, r.timestamp);
        }
    }
    std::vector<std::pair<TimeStamp, std::uint64_t>> order;
    order.reserve(first_seen.size());
    for (const auto& [id, t] : first_seen) order.emplace_back(t, id);
    std::sort(order.begin(), order.end());

    GraphBuilder builder(config.directed ? Directedness::directed : Directedness::undirected,
                         config.allow_self_loops, config.dedupe);
    builder.time_unit_label(config.time_unit_label);
    std::unordered_map<std::uint64_t, VertexId> dense;
    dense.reserve(order.size());
    if (external_ids) external_ids->clear();
    for (const auto& [t, id] : order) {
        dense.emplace(id, builder.add_vertex(t));
        if (external_ids) external_ids->push_back(id);
    }
    for (const auto& r : records) {
        if (r.source == r.target && !config.allow_self_loops) continue;
        builder.add_edge(dense.at(r.source), dense.at(r.target), r.timestamp);
    }
    auto g = std::move(builder).build();

    if (g.edge_count() < config.min_edges)
        throw rejected_graph_error("skipped: " + std::to_string(g.edge_count()) + " edges, fewer than " +
                                   std::to_string(config.min_edges));
    if (g.vertex_count() < config.min_vertices)
        throw rejected_graph_error("skipped: " + std::to_string(g.vertex_count()) + " vertices, fewer than " +
                                   std::to_string(config.min_vertices));
    return g;
}

/// Shifts every time so that the first vertex joins at 0.
inline TemporalGraph normalize_times(const TemporalGraph& g) {
    if (g.empty()) throw std::invalid_argument("cannot normalize an empty graph");
    return g.shifted(g.join_times().front());
}

} // namespace temponet
