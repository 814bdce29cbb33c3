#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "temponet/metrics.hpp"
#include "temponet/temporal_graph.hpp"

namespace temponet {

// ---------------------------------------------------------------------------
// Join-rate curves and vibrancy
// ---------------------------------------------------------------------------

struct JrcSample {
    TimeStamp t = 0;
    double value = 0.0;

    friend bool operator==(const JrcSample&, const JrcSample&) = default;
};

/// Fraction of the final vertex count present at each sampled time. The
/// first sample is pinned to (0, 0) and the last to (t_max, 1).
struct Jrc {
    std::vector<JrcSample> samples;
    TimeStamp t_max = 0;
};

inline Jrc jrc(const TemporalGraph& g, TimeStamp interval) {
    if (g.empty()) throw std::invalid_argument("join-rate curve of an empty graph");
    if (interval <= 0) throw std::invalid_argument("interval must be positive");
    Jrc out;
    out.t_max = g.t_max();
    out.samples.push_back({0, 0.0});
    if (out.t_max == 0) {
        out.samples.push_back({0, 1.0});
        return out;
    }
    const auto total = static_cast<double>(g.vertex_count());
    for (TimeStamp t : series_horizons(out.t_max, interval))
        out.samples.push_back({t, static_cast<double>(g.vertices_until(t)) / total});
    out.samples.back().value = 1.0;
    return out;
}

/// One minus the time-averaged JRC (trapezoidal rule). 0 when t_max is 0.
inline double vibrancy(const Jrc& j) {
    if (j.t_max <= 0) return 0.0;
    double area = 0.0;
    for (std::size_t i = 1; i < j.samples.size(); ++i) {
        const auto& a = j.samples[i - 1];
        const auto& b = j.samples[i];
        area += 0.5 * (a.value + b.value) * static_cast<double>(b.t - a.t);
    }
    return 1.0 - area / static_cast<double>(j.t_max);
}

enum class GrowthClass { fast, slow };

inline GrowthClass classify_vibrancy(double v, double threshold = 0.5) {
    return v > threshold ? GrowthClass::fast : GrowthClass::slow;
}

inline const char* to_string(GrowthClass c) { return c == GrowthClass::fast ? "fast" : "slow"; }

inline nlohmann::json to_json(const Jrc& j) {
    auto arr = nlohmann::json::array();
    for (const auto& s : j.samples) arr.push_back({{"t", s.t}, {"value", s.value}});
    return arr;
}

// ---------------------------------------------------------------------------
// Join-time difference
// ---------------------------------------------------------------------------

struct TimeDiffPoint {
    // Index of the bin: differences in [diff_bin * width, (diff_bin + 1) * width).
    TimeStamp diff_bin = 0;
    double probability = 0.0;
    std::uint64_t connected_pairs = 0;
    std::uint64_t eligible_pairs = 0;
};

/// Connection probability of two vertices as a function of the absolute
/// difference of their join times: linked pairs / all pairs, per bin.
/// Connections are read off the undirected projection; self-loops are
/// ignored. Bins without any vertex pair are omitted.
inline std::vector<TimeDiffPoint> join_time_diff_prob(const TemporalGraph& g, TimeStamp bin_width) {
    if (g.vertex_count() < 2) throw std::invalid_argument("need at least two vertices");
    if (bin_width <= 0) throw std::invalid_argument("bin width must be positive");

    // Vertices per distinct join time (join times are sorted).
    std::vector<std::pair<TimeStamp, std::uint64_t>> cohorts;
    for (TimeStamp t : g.join_times()) {
        if (cohorts.empty() || cohorts.back().first != t) cohorts.emplace_back(t, 0);
        ++cohorts.back().second;
    }

    std::map<TimeStamp, TimeDiffPoint> bins;
    auto at = [&](TimeStamp diff) -> TimeDiffPoint& {
        auto& p = bins[diff / bin_width];
        p.diff_bin = diff / bin_width;
        return p;
    };
    for (std::size_t i = 0; i < cohorts.size(); ++i) {
        const auto ci = cohorts[i].second;
        if (ci > 1) at(0).eligible_pairs += ci * (ci - 1) / 2;
        for (std::size_t j = i + 1; j < cohorts.size(); ++j)
            at(cohorts[j].first - cohorts[i].first).eligible_pairs += ci * cohorts[j].second;
    }

    std::unordered_set<std::uint64_t> linked;
    const auto joins = g.join_times();
    for (const auto& e : g.edges()) {
        if (e.is_loop()) continue;
        const auto a = std::min(e.source, e.target);
        const auto b = std::max(e.source, e.target);
        if (!linked.insert(detail::pair_key(a, b)).second) continue;
        at(joins[b] - joins[a]).connected_pairs += 1;
    }

    std::vector<TimeDiffPoint> out;
    for (auto& [_, p] : bins) {
        if (p.eligible_pairs == 0) continue;
        p.probability = static_cast<double>(p.connected_pairs) / static_cast<double>(p.eligible_pairs);
        out.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collections of networks and star emergence
// ---------------------------------------------------------------------------

struct NetworkCollection {
    std::vector<TemporalGraph> networks;
    double vibrancy_threshold = 0.5;
};

/// The largest t_max shared by at least w networks: the w-th largest t_max.
inline TimeStamp w_max_time(std::span<const TemporalGraph> networks, std::size_t w) {
    if (w == 0 || w > networks.size())
        throw std::invalid_argument("w must lie in [1, number of networks]");
    std::vector<TimeStamp> t_max;
    for (const auto& g : networks) t_max.push_back(g.t_max());
    std::nth_element(t_max.begin(), t_max.begin() + static_cast<std::ptrdiff_t>(w - 1), t_max.end(),
                     std::greater<>());
    return t_max[w - 1];
}

inline TimeStamp w_max_time(const NetworkCollection& c, std::size_t w) { return w_max_time(c.networks, w); }

// Common horizon grid for aggregation: interval steps up to the w-maximal time.
inline std::vector<TimeStamp> aggregate_horizons(std::span<const TemporalGraph> networks, std::size_t w,
                                                 TimeStamp interval) {
    return series_horizons(w_max_time(networks, w), interval);
}

struct StarsAggregate {
    std::vector<std::size_t> total;
    std::vector<double> avg;
    std::vector<double> norm_avg;
    // Networks with t_max >= horizon, per horizon.
    std::vector<std::size_t> active;
};

/// Emerging-star counts summed, averaged, and normalized across a collection.
///
/// Network n contributes to entry i only while t_i <= t_max(n). Its K-Stars
/// number is the sum over those entries; the normalized average skips
/// networks whose number is 0.
inline StarsAggregate stars_aggregate(std::span<const TemporalGraph> networks, std::size_t k, std::size_t w,
                                      std::span<const TimeStamp> horizons) {
    if (networks.empty()) throw std::invalid_argument("empty network collection");
    if (horizons.empty() || horizons.back() != w_max_time(networks, w))
        throw std::invalid_argument("horizons must end at the w-maximal time");

    const std::size_t m = horizons.size();
    StarsAggregate out;
    out.total.assign(m, 0);
    out.avg.assign(m, 0.0);
    out.norm_avg.assign(m, 0.0);
    out.active.assign(m, 0);
    std::vector<double> norm_total(m, 0.0);
    std::vector<std::size_t> norm_count(m, 0);

    for (const auto& g : networks) {
        const auto v = k_stars_vector(g, horizons, k);
        std::size_t live = 0;
        while (live < m && horizons[live] <= g.t_max()) ++live;
        std::size_t number = 0;
        for (std::size_t i = 0; i < live; ++i) number += v.counts[i];
        for (std::size_t i = 0; i < live; ++i) {
            out.total[i] += v.counts[i];
            out.active[i] += 1;
            if (number > 0) {
                norm_total[i] += static_cast<double>(v.counts[i]) / static_cast<double>(number);
                norm_count[i] += 1;
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (out.active[i] > 0) out.avg[i] = static_cast<double>(out.total[i]) / static_cast<double>(out.active[i]);
        if (norm_count[i] > 0) out.norm_avg[i] = norm_total[i] / static_cast<double>(norm_count[i]);
    }
    return out;
}

inline StarsAggregate stars_aggregate(const NetworkCollection& c, std::size_t k, std::size_t w,
                                      std::span<const TimeStamp> horizons) {
    return stars_aggregate(c.networks, k, w, horizons);
}

// ---------------------------------------------------------------------------
// Rank correlation
// ---------------------------------------------------------------------------

// 1-based ranks; tied values share the mean of their positions.
inline std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

inline Metric pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("need two equal-length series of length >= 2");
    const auto n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline Metric spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("need two equal-length series of length >= 2");
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

} // namespace temponet
