#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "temponet/generators.hpp"
#include "temponet/io.hpp"
#include "temponet/temporal_graph.hpp"

using namespace temponet;

namespace {

TemporalGraph chain_123() {
    GraphBuilder b;
    b.add_vertex(1);
    b.add_vertex(2);
    b.add_vertex(3);
    b.add_edge(0, 1, 2);
    b.add_edge(1, 2, 3);
    return std::move(b).build();
}

TemporalGraph star(std::size_t leaves) {
    GraphBuilder b;
    b.add_vertex(0);
    for (std::size_t i = 0; i < leaves; ++i) b.add_edge(0, b.add_vertex(1), 1);
    return std::move(b).build();
}

} // namespace

TEST(Snapshot, EmptyGraph) {
    TemporalGraph g;
    const auto s = snapshot_at(g, 0);
    EXPECT_EQ(s.vertex_count(), 0u);
    EXPECT_EQ(s.edge_count(), 0u);
}

TEST(Snapshot, FiltersByHorizon) {
    const auto g = chain_123();
    const auto s = snapshot_at(g, 2);
    EXPECT_EQ(s.vertex_count(), 2u);
    EXPECT_EQ(s.edge_count(), 1u);
    EXPECT_EQ(snapshot_at(g, 100).vertex_count(), 3u);
    EXPECT_EQ(snapshot_at(g, 0).vertex_count(), 0u);
}

TEST(Snapshot, WorkedExampleFirstIteration) {
    TpaParams p;
    p.m = 3;
    p.schedule = GrowthSchedule({100, 200, 400});
    p.seed = 11;
    const auto g = tpa_generate(p).graph;
    const auto s = snapshot_at(g, 1);
    EXPECT_EQ(s.vertex_count(), 100u);
    EXPECT_EQ(s.edge_count(), 300u);
}

TEST(Snapshot, NestedAndMonotone) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_graph(rng);
        std::size_t prev_v = 0, prev_e = 0;
        for (TimeStamp t = 0; t <= 10; ++t) {
            const auto s = snapshot_at(g, t);
            EXPECT_GE(s.vertex_count(), prev_v);
            EXPECT_GE(s.edge_count(), prev_e);
            for (const auto& e : s.edges()) {
                EXPECT_LE(e.created, t);
                EXPECT_LT(e.source, s.vertex_count());
                EXPECT_LT(e.target, s.vertex_count());
            }
            prev_v = s.vertex_count();
            prev_e = s.edge_count();
        }
    }
}

TEST(SeriesHorizons, EvenDivision) { EXPECT_EQ(series_horizons(12, 4), (std::vector<TimeStamp>{4, 8, 12})); }

TEST(SeriesHorizons, KeepsShortFinalInterval) {
    EXPECT_EQ(series_horizons(10, 4), (std::vector<TimeStamp>{4, 8, 10}));
}

TEST(SeriesHorizons, SingleShortInterval) { EXPECT_EQ(series_horizons(3, 4), (std::vector<TimeStamp>{3})); }

TEST(SeriesHorizons, RejectsNonPositiveInterval) {
    EXPECT_THROW(series_horizons(10, 0), std::invalid_argument);
    EXPECT_THROW(snapshot_series(chain_123(), -1), std::invalid_argument);
}

TEST(SnapshotSeries, CoversFullActiveTime) {
    const auto g = chain_123();
    const auto series = snapshot_series(g, 2);
    ASSERT_EQ(series.size(), 2u);
    EXPECT_EQ(series.back().horizon(), 3);
    EXPECT_EQ(series.back().vertex_count(), 3u);
}

TEST(DegreeAt, StarHub) { EXPECT_EQ(degree_at(star(5), 0, 1), 5u); }

TEST(DegreeAt, DirectedReciprocalCountsOnce) {
    GraphBuilder b(Directedness::directed);
    b.add_vertex(0);
    b.add_vertex(0);
    b.add_edge(0, 1, 0);
    b.add_edge(1, 0, 0);
    const auto g = std::move(b).build();
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(degree_at(g, 0, 0), 1u);
}

TEST(DegreeAt, SelfLoopCountsOnce) {
    GraphBuilder b(Directedness::undirected, true);
    b.add_vertex(0);
    b.add_vertex(0);
    b.add_edge(0, 0, 0);
    b.add_edge(0, 1, 0);
    EXPECT_EQ(degree_at(std::move(b).build(), 0, 0), 2u);
}

TEST(DegreeAt, UnknownVertex) { EXPECT_THROW(degree_at(chain_123(), 7, 3), not_found_error); }

TEST(DegreeAt, MatchesNeighbourEnumeration) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = oracle::random_graph(rng, 4);
        for (TimeStamp t = 0; t <= 9; ++t) {
            const auto v = oracle::view(g, t);
            for (VertexId x = 0; x < v.n; ++x) EXPECT_EQ(degree_at(g, x, t), oracle::degree(v, x));
            DegreeTracker tracker(g);
            tracker.advance_to(t);
            for (VertexId x = 0; x < v.n; ++x) EXPECT_EQ(tracker.degrees()[x], oracle::degree(v, x));
        }
    }
}

TEST(DegreeAt, HandshakeAndMonotone) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_graph(rng, 8, false);
        if (g.allow_self_loops()) continue;
        std::size_t sum = 0;
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            sum += degree_at(g, v, 20);
            for (TimeStamp t = 0; t < 9; ++t) EXPECT_LE(degree_at(g, v, t), degree_at(g, v, t + 1));
        }
        EXPECT_EQ(sum, 2 * g.edge_count());
    }
}

TEST(GraphBuilder, SimpleModeKeepsEarliestTimestamp) {
    GraphBuilder b;
    b.add_vertex(0);
    b.add_vertex(0);
    EXPECT_TRUE(b.add_edge(0, 1, 9));
    EXPECT_FALSE(b.add_edge(1, 0, 4));
    const auto g = std::move(b).build();
    ASSERT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.edges()[0].created, 4);
}

TEST(GraphBuilder, MultigraphKeepsRepeats) {
    GraphBuilder b(Directedness::undirected, false, false);
    b.add_vertex(0);
    b.add_vertex(0);
    b.add_edge(0, 1, 1);
    b.add_edge(0, 1, 2);
    const auto g = std::move(b).build();
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_EQ(degree_at(g, 0, 2), 1u);
}

TEST(GraphBuilder, RejectsInvalidInput) {
    GraphBuilder b;
    b.add_vertex(3);
    EXPECT_THROW(b.add_vertex(2), std::invalid_argument);
    EXPECT_THROW(b.add_vertex(-1), std::invalid_argument);
    b.add_vertex(5);
    EXPECT_THROW(b.add_edge(0, 0, 5), std::invalid_argument);
    EXPECT_THROW(b.add_edge(0, 1, 4), std::invalid_argument);
    EXPECT_THROW(b.add_edge(0, 2, 9), not_found_error);
}

TEST(GraphBuilder, EdgesSortedByCreation) {
    GraphBuilder b;
    for (int i = 0; i < 4; ++i) b.add_vertex(0);
    b.add_edge(2, 3, 5);
    b.add_edge(0, 1, 1);
    b.add_edge(1, 2, 3);
    const auto g = std::move(b).build();
    EXPECT_EQ(g.edges()[0].created, 1);
    EXPECT_EQ(g.edges()[2].created, 5);
    EXPECT_EQ(g.edges_until(3), 2u);
}

TEST(Serialization, RoundTripReproducesEverySnapshot) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = oracle::random_graph(rng);
        std::stringstream edges;
        write_edge_list(edges, g);
        const auto back = read_graph(edges, metadata_json(g));
        EXPECT_EQ(back, g);
        for (TimeStamp t = 0; t <= 9; ++t) {
            EXPECT_EQ(snapshot_at(back, t).vertex_count(), snapshot_at(g, t).vertex_count());
            EXPECT_EQ(snapshot_at(back, t).edge_count(), snapshot_at(g, t).edge_count());
        }
    }
}

TEST(Serialization, MetadataKeys) {
    GraphBuilder b(Directedness::directed, true);
    b.time_unit_label("weeks");
    b.add_vertex(0);
    const auto meta = metadata_json(std::move(b).build());
    EXPECT_TRUE(meta.at("directed").get<bool>());
    EXPECT_TRUE(meta.at("allow_self_loops").get<bool>());
    EXPECT_EQ(meta.at("time_unit_label"), "weeks");
}

TEST(Serialization, EdgeListFormat) {
    std::ostringstream out;
    write_edge_list(out, chain_123());
    EXPECT_EQ(out.str(), "source,target,timestamp\n0,1,2\n1,2,3\n");
}

TEST(Serialization, MalformedLineReportsLineNumber) {
    std::istringstream in("source,target,timestamp\n0,1,2\n0,x,3\n");
    try {
        read_graph(in, nlohmann::json::object());
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}
