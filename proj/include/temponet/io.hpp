#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "temponet/errors.hpp"
#include "temponet/temporal_graph.hpp"

namespace temponet {

struct EdgeRecord {
    std::uint64_t source = 0;
    std::uint64_t target = 0;
    TimeStamp timestamp = 0;
};

namespace detail {

inline bool is_separator(char c) noexcept {
    return c == ' ' || c == '\t' || c == ',' || c == '\r' || c == '\n';
}

// Splits on whitespace and commas. Returns nullopt when the line does not
// hold exactly three non-negative decimal integers.
inline std::optional<EdgeRecord> parse_record(std::string_view line) {
    std::array<std::uint64_t, 3> fields{};
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_separator(line[i])) ++i;
        if (i == line.size()) break;
        std::size_t j = i;
        while (j < line.size() && !is_separator(line[j])) ++j;
        if (count == 3) return std::nullopt;
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
        if (ec != std::errc{} || ptr != line.data() + j) return std::nullopt;
        fields[count++] = value;
        i = j;
    }
    if (count != 3 || fields[2] > static_cast<std::uint64_t>(INT64_MAX)) return std::nullopt;
    return EdgeRecord{fields[0], fields[1], static_cast<TimeStamp>(fields[2])};
}

inline bool is_blank_or_comment(std::string_view line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!is_separator(c)) return false;
    }
    return true;
}

} // namespace detail

/// Calls sink(record, line_number) for every data line of a
/// `source target timestamp` stream. Blank lines and '#' comments are
/// skipped; a non-numeric first data line is taken as a header.
template <typename Sink>
std::size_t for_each_record(std::istream& in, Sink&& sink) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t records = 0;
    bool first_data_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_blank_or_comment(line)) continue;
        auto rec = detail::parse_record(line);
        if (!rec) {
            if (first_data_line) {
                first_data_line = false;
                continue;
            }
            throw parse_error(line_no, "expected three non-negative integers 'source target timestamp'");
        }
        first_data_line = false;
        sink(*rec, line_no);
        ++records;
    }
    return records;
}

inline void write_edge_list(std::ostream& out, const TemporalGraph& g) {
    out << "source,target,timestamp\n";
    for (const auto& e : g.edges()) out << e.source << ',' << e.target << ',' << e.created << '\n';
}

inline nlohmann::json metadata_json(const TemporalGraph& g) {
    nlohmann::json meta;
    meta["directed"] = g.directed();
    meta["allow_self_loops"] = g.allow_self_loops();
    meta["simple"] = g.simple();
    meta["time_unit_label"] = g.time_unit_label();
    meta["join_times"] = std::vector<TimeStamp>(g.join_times().begin(), g.join_times().end());
    return meta;
}

inline void write_metadata(std::ostream& out, const TemporalGraph& g) { out << metadata_json(g).dump(2) << '\n'; }

/// Rebuilds a graph written by write_edge_list + write_metadata. Vertex ids
/// are taken verbatim; join times come from the sidecar when it lists them,
/// otherwise from each id's first appearance.
inline TemporalGraph read_graph(std::istream& edges, const nlohmann::json& meta) {
    const bool directed = meta.value("directed", false);
    GraphBuilder builder(directed ? Directedness::directed : Directedness::undirected,
                         meta.value("allow_self_loops", false), meta.value("simple", true));
    builder.time_unit_label(meta.value("time_unit_label", std::string{}));

    std::vector<EdgeRecord> records;
    for_each_record(edges, [&](const EdgeRecord& r, std::size_t) { records.push_back(r); });

    std::vector<TimeStamp> joins;
    if (meta.contains("join_times")) {
        joins = meta.at("join_times").get<std::vector<TimeStamp>>();
    } else {
        std::uint64_t max_id = 0;
        for (const auto& r : records) max_id = std::max({max_id, r.source + 1, r.target + 1});
        joins.assign(max_id, INT64_MAX);
        for (const auto& r : records) {
            joins[r.source] = std::min(joins[r.source], r.timestamp);
            joins[r.target] = std::min(joins[r.target], r.timestamp);
        }
    }
    for (auto t : joins) builder.add_vertex(t);
    for (const auto& r : records) {
        if (r.source >= joins.size() || r.target >= joins.size())
            throw not_found_error("edge endpoint outside the sidecar vertex range");
        builder.add_edge(static_cast<VertexId>(r.source), static_cast<VertexId>(r.target), r.timestamp);
    }
    return std::move(builder).build();
}

} // namespace temponet
