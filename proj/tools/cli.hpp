#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "temponet/temponet.hpp"

namespace temponet::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Bad or missing command-line parameters; reported with exit code 2.
class usage_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One generator configuration: a TPA run or one of the baseline models.
struct GeneratorSpec {
    std::string name;
    std::string model = "tpa";
    std::optional<std::size_t> m;
    std::optional<std::size_t> n;
    std::size_t k = 6;           // lattice degree for ws / nw
    std::optional<double> p;     // ws/nw rewiring, hk triangle, ff forward probability
    std::string schedule;        // "100,200,400", "linear:10:70", "poly:5:8", "sigmoid:5:8"
    std::string f = "exp2";      // "exp2", "exp:<base>", "geo:<scale>:<ratio>", "table:<v0>,<v1>,..."
    std::uint64_t seed = 0;
    std::size_t retry_limit = 100;
};

GrowthSchedule parse_schedule(const std::string& text);
TimeDiffFn parse_time_diff_fn(const std::string& text);
GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorSpec& spec);
GeneratedGraph generate(const GeneratorSpec& spec);

struct AnalysisOptions {
    TimeStamp interval = 1;
    std::vector<std::size_t> ks{1, 5};
    std::size_t x_min = 1;
    bool shortest_paths = true;
    double threshold = 0.5;
};

struct AnalysisRow {
    FeatureVector features;
    double jrc = 0.0;
    std::vector<std::size_t> stars;  // entry of each requested k's StarsVector
};

struct Analysis {
    std::vector<AnalysisRow> rows;
    std::vector<StarsVector> stars;  // one per requested k
    double vibrancy = 0.0;
    std::optional<SeriesFit> jrc_fit;
};

Analysis analyze(const TemporalGraph& g, const AnalysisOptions& opts);

// Reads an edge list, using `<path>.meta.json` when present and plain
// stream ingestion otherwise.
TemporalGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const TemporalGraph& g, const nlohmann::json& extra_meta = {});

// Shortest round-trip decimal form; empty for undefined values.
std::string format_number(double x);
std::string format_metric(const Metric& m);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace temponet::cli
