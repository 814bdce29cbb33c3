#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace temponet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

std::string format_number(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

std::string format_metric(const Metric& m) { return m ? format_number(*m) : std::string{}; }

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

template <typename T>
T parse_value(const std::string& text, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw usage_error(std::string("cannot parse ") + what + " from '" + text + "'");
    return value;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Generator specs
// ---------------------------------------------------------------------------

GrowthSchedule parse_schedule(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 3) {
        const auto a = parse_value<std::size_t>(parts[1], "schedule argument");
        const auto b = parse_value<std::size_t>(parts[2], "schedule argument");
        if (parts[0] == "linear") return make_schedule(LinearGrowth{a, b});
        if (parts[0] == "poly" || parts[0] == "polynomial") return make_schedule(PolynomialGrowth{a, b});
        if (parts[0] == "sigmoid" || parts[0] == "sigmoidal") return make_schedule(SigmoidalGrowth{a, b});
        throw usage_error("unknown schedule kind '" + parts[0] + "'");
    }
    if (parts.size() != 1 || text.empty()) throw usage_error("malformed schedule '" + text + "'");
    std::vector<std::size_t> sizes;
    for (const auto& item : split(text, ',')) sizes.push_back(parse_value<std::size_t>(item, "schedule entry"));
    return GrowthSchedule(std::move(sizes));
}

TimeDiffFn parse_time_diff_fn(const std::string& text) {
    if (text == "exp2") return TimeDiffFn::exp_base(2.0);
    const auto parts = split(text, ':');
    if (parts.size() == 2 && parts[0] == "exp") return TimeDiffFn::exp_base(parse_value<double>(parts[1], "base"));
    if (parts.size() == 3 && (parts[0] == "geo" || parts[0] == "geometric"))
        return TimeDiffFn::geometric(parse_value<double>(parts[1], "scale"), parse_value<double>(parts[2], "ratio"));
    if (parts.size() == 2 && (parts[0] == "table" || parts[0] == "tabulated")) {
        std::vector<double> values;
        for (const auto& v : split(parts[1], ',')) values.push_back(parse_value<double>(v, "table value"));
        return TimeDiffFn::tabulated(std::move(values));
    }
    throw usage_error("unknown time-difference function '" + text + "'");
}

namespace {

std::string f_to_string(const json& f) {
    if (f.is_string()) return f.get<std::string>();
    const auto form = f.value("form", std::string{});
    if (form == "exp_base") return "exp:" + format_number(f.at("base").get<double>());
    if (form == "geometric")
        return "geo:" + format_number(f.at("scale").get<double>()) + ":" + format_number(f.at("ratio").get<double>());
    if (form == "tabulated") {
        std::vector<std::string> vals;
        for (double v : f.at("values").get<std::vector<double>>()) vals.push_back(format_number(v));
        return "table:" + join(vals, ',');
    }
    throw usage_error("unknown f form '" + form + "'");
}

std::string schedule_to_string(const json& s) {
    if (s.is_string()) return s.get<std::string>();
    std::vector<std::string> parts;
    for (const auto& v : s) parts.push_back(std::to_string(v.get<std::size_t>()));
    return join(parts, ',');
}

} // namespace

GeneratorSpec generator_spec_from_json(const json& j) {
    GeneratorSpec spec;
    spec.name = j.value("name", std::string{});
    spec.model = j.value("model", spec.model);
    if (j.contains("m")) spec.m = j.at("m").get<std::size_t>();
    if (j.contains("n")) spec.n = j.at("n").get<std::size_t>();
    spec.k = j.value("k", spec.k);
    if (j.contains("p")) spec.p = j.at("p").get<double>();
    if (j.contains("schedule")) spec.schedule = schedule_to_string(j.at("schedule"));
    if (j.contains("f")) spec.f = f_to_string(j.at("f"));
    spec.seed = j.value("seed", spec.seed);
    spec.retry_limit = j.value("retry_limit", spec.retry_limit);
    return spec;
}

json to_json(const GeneratorSpec& spec) {
    json j;
    if (!spec.name.empty()) j["name"] = spec.name;
    j["model"] = spec.model;
    if (spec.m) j["m"] = *spec.m;
    if (spec.n) j["n"] = *spec.n;
    if (spec.model == "ws" || spec.model == "nw") j["k"] = spec.k;
    if (spec.p) j["p"] = *spec.p;
    if (spec.model == "tpa") {
        j["schedule"] = spec.schedule;
        j["f"] = spec.f;
        j["retry_limit"] = spec.retry_limit;
    }
    j["seed"] = spec.seed;
    return j;
}

GeneratedGraph generate(const GeneratorSpec& spec) {
    auto need_m = [&] {
        if (!spec.m) throw usage_error("--m is required for model " + spec.model);
        return *spec.m;
    };
    auto need_n = [&] {
        if (!spec.n) throw usage_error("--n is required for model " + spec.model);
        return *spec.n;
    };
    if (spec.model == "tpa") {
        TpaParams params;
        params.m = need_m();
        if (spec.schedule.empty()) throw usage_error("--schedule is required for model tpa");
        params.schedule = parse_schedule(spec.schedule);
        params.f = parse_time_diff_fn(spec.f);
        params.seed = spec.seed;
        params.retry_limit = spec.retry_limit;
        return tpa_generate(params);
    }
    GeneratedGraph out;
    if (spec.model == "ba") {
        const auto m = need_m();
        out.graph = baseline_generate(BarabasiAlbert{m}, need_n(), spec.seed);
    } else if (spec.model == "ws") {
        out.graph = baseline_generate(WattsStrogatz{spec.k, spec.p.value_or(0.1)}, need_n(), spec.seed);
    } else if (spec.model == "nw") {
        out.graph = baseline_generate(NewmanWatts{spec.k, spec.p.value_or(0.1)}, need_n(), spec.seed);
    } else if (spec.model == "hk") {
        const auto m = need_m();
        out.graph = baseline_generate(HolmeKim{m, spec.p.value_or(0.2)}, need_n(), spec.seed);
    } else if (spec.model == "ff") {
        out.graph = baseline_generate(ForestFire{spec.p.value_or(0.65)}, need_n(), spec.seed);
    } else {
        throw usage_error("unknown model '" + spec.model + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

Analysis analyze(const TemporalGraph& g, const AnalysisOptions& opts) {
    if (g.empty()) throw std::invalid_argument("cannot analyze an empty graph");
    Analysis out;
    const auto horizons = series_horizons(g.t_max(), opts.interval);
    for (std::size_t k : opts.ks) out.stars.push_back(k_stars_vector(g, horizons, k));

    const auto total = static_cast<double>(g.vertex_count());
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        AnalysisRow row;
        row.features = compute_features(Snapshot(g, horizons[i]), {opts.x_min, opts.shortest_paths});
        row.jrc = horizons[i] >= g.t_max() ? 1.0 : static_cast<double>(g.vertices_until(horizons[i])) / total;
        for (const auto& sv : out.stars) row.stars.push_back(sv.counts[i]);
        out.rows.push_back(std::move(row));
    }

    const auto curve = jrc(g, opts.interval);
    out.vibrancy = vibrancy(curve);
    if (curve.samples.size() >= 5 && curve.t_max > 0) {
        std::vector<double> xs, ys;
        for (const auto& s : curve.samples) {
            xs.push_back(static_cast<double>(s.t));
            ys.push_back(s.value);
        }
        try {
            out.jrc_fit = polyfit(xs, ys, 4);
        } catch (const ill_conditioned_error&) {
        }
    }
    return out;
}

namespace {

std::optional<json> load_meta(const fs::path& path) {
    const fs::path meta_path = path.string() + ".meta.json";
    if (!fs::exists(meta_path)) return std::nullopt;
    std::ifstream in(meta_path);
    return json::parse(in);
}

TemporalGraph load_graph_with(const fs::path& path, const IngestConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    if (auto meta = load_meta(path)) return read_graph(in, *meta);
    return read_edge_stream(in, config);
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

} // namespace

TemporalGraph load_graph(const fs::path& path) { return load_graph_with(path, IngestConfig{}); }

void save_graph(const fs::path& path, const TemporalGraph& g, const json& extra_meta) {
    std::ostringstream edges;
    write_edge_list(edges, g);
    write_file(path, edges.str());
    auto meta = metadata_json(g);
    if (extra_meta.is_object())
        for (const auto& [key, value] : extra_meta.items()) meta[key] = value;
    write_file(path.string() + ".meta.json", meta.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

namespace {

// Flags that accept repeated values; a JSON array expands to repeated flags.
const std::set<std::string> kRepeatable{"k"};

std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

// Expands `--config file.json` into flags. Flags given on the command line
// take precedence over the file. A run manifest works as a config: its
// "params" object is used.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    auto it = std::find_if(args.begin(), args.end(),
                           [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
    if (it == args.end()) return args;
    std::string path;
    if (*it == "--config") {
        if (std::next(it) == args.end()) throw usage_error("--config needs a file");
        path = *std::next(it);
        it = args.erase(it, std::next(it, 2));
    } else {
        path = it->substr(9);
        it = args.erase(it);
    }
    std::ifstream in(path);
    if (!in) throw usage_error("cannot read config " + path);
    json cfg = json::parse(in);
    if (cfg.contains("params") && cfg.contains("command")) cfg = cfg.at("params");

    std::set<std::string> explicit_flags;
    for (const auto& a : args)
        if (a.rfind("--", 0) == 0) explicit_flags.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));

    std::vector<std::string> extra;
    for (const auto& [key, value] : cfg.items()) {
        const auto flag = flag_name(key);
        if (explicit_flags.contains(flag) || flag == "name") continue;
        auto scalar = [&](const json& v) -> std::string {
            if (v.is_string()) return v.get<std::string>();
            if (v.is_number_float()) return format_number(v.get<double>());
            return v.dump();
        };
        if (value.is_boolean()) {
            if (value.get<bool>()) extra.push_back("--" + flag);
        } else if (value.is_null()) {
            continue;
        } else if (flag == "f") {
            extra.insert(extra.end(), {"--f", f_to_string(value)});
        } else if (value.is_array() && kRepeatable.contains(flag)) {
            for (const auto& v : value) extra.insert(extra.end(), {"--" + flag, scalar(v)});
        } else if (value.is_array()) {
            std::vector<std::string> parts;
            for (const auto& v : value) parts.push_back(scalar(v));
            extra.insert(extra.end(), {"--" + flag, join(parts, ',')});
        } else {
            extra.insert(extra.end(), {"--" + flag, scalar(value)});
        }
    }
    // Insert right after the subcommand name.
    args.insert(args.begin() + (args.empty() ? 0 : 1), extra.begin(), extra.end());
    return args;
}

void write_manifest(const fs::path& out, const std::string& command, const json& params, std::uint64_t seed,
                    const std::vector<std::string>& outputs, const std::vector<std::string>& argv) {
    json manifest;
    manifest["command"] = command;
    manifest["params"] = params;
    manifest["seed"] = seed;
    manifest["tool_version"] = kToolVersion;
    manifest["outputs"] = outputs;
    manifest["argv"] = argv;
    write_file(out.string() + ".manifest.json", manifest.dump(2) + "\n");
}

// Writes to --out when given, otherwise to the command's stdout.
void emit(const std::string& out_path, const std::string& content, std::ostream& out) {
    if (out_path.empty()) out << content;
    else write_file(out_path, content);
}

std::size_t thread_budget() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TEMPONET_THREADS")) {
        std::size_t cap = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), cap);
        if (ec == std::errc{} && cap > 0) n = std::min(n, cap);
    }
    return n;
}

// Runs fn(i) for i in [0, count) on up to thread_budget() workers.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::min(thread_budget(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    for (auto& t : pool) t.join();
}

std::string analysis_csv(const Analysis& a, const AnalysisOptions& opts) {
    std::ostringstream os;
    os << "t,vertices,edges,density,avg_clustering,avg_shortest_path,max_degree,gamma,jrc";
    for (auto k : opts.ks) os << ",stars_k" << k;
    os << '\n';
    for (const auto& row : a.rows) {
        const auto& f = row.features;
        os << f.horizon << ',' << f.vertices << ',' << f.edges << ',' << format_metric(f.density) << ','
           << format_number(f.avg_clustering) << ',' << format_metric(f.avg_shortest_path) << ',' << f.max_degree
           << ',' << format_metric(f.gamma) << ',' << format_number(row.jrc);
        for (auto s : row.stars) os << ',' << s;
        os << '\n';
    }
    return os.str();
}

json analysis_json(const Analysis& a, const AnalysisOptions& opts) {
    json j;
    j["rows"] = json::array();
    for (const auto& row : a.rows) {
        auto r = to_json(row.features);
        r["jrc"] = row.jrc;
        for (std::size_t i = 0; i < opts.ks.size(); ++i) r["stars_k" + std::to_string(opts.ks[i])] = row.stars[i];
        j["rows"].push_back(r);
    }
    j["stars"] = json::object();
    j["stars_number"] = json::object();
    for (std::size_t i = 0; i < opts.ks.size(); ++i) {
        j["stars"][std::to_string(opts.ks[i])] = a.stars[i].counts;
        j["stars_number"][std::to_string(opts.ks[i])] = k_stars_number(a.stars[i]);
    }
    j["vibrancy"] = a.vibrancy;
    j["class"] = to_string(classify_vibrancy(a.vibrancy, opts.threshold));
    j["jrc_fit"] = a.jrc_fit ? to_json(*a.jrc_fit) : json(nullptr);
    return j;
}

bool is_graph_file(const fs::path& p) {
    const auto name = p.filename().string();
    for (const char* suffix : {".meta.json", ".manifest.json", ".ids.csv"})
        if (name.size() >= std::char_traits<char>::length(suffix) &&
            name.compare(name.size() - std::char_traits<char>::length(suffix), std::string::npos, suffix) == 0)
            return false;
    return fs::is_regular_file(p) && name.front() != '.';
}

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> argv;
};

// --- generate --------------------------------------------------------------

struct GenerateArgs {
    GeneratorSpec spec;
    std::size_t m = 0, n = 0;
    double p = 0.0;
    std::string out;
    CLI::Option *m_opt = nullptr, *n_opt = nullptr, *p_opt = nullptr;
};

int cmd_generate(const GenerateArgs& a, Context& ctx) {
    GeneratorSpec spec = a.spec;
    if (a.m_opt->count()) spec.m = a.m;
    if (a.n_opt->count()) spec.n = a.n;
    if (a.p_opt->count()) spec.p = a.p;
    const auto result = generate(spec);
    const auto summary = "vertices=" + std::to_string(result.graph.vertex_count()) +
                         " edges=" + std::to_string(result.graph.edge_count()) +
                         " skipped=" + std::to_string(result.skipped_edges) + "\n";
    if (a.out.empty()) {
        write_edge_list(ctx.out, result.graph);
        ctx.err << summary;
        return 0;
    }
    save_graph(a.out, result.graph, json{{"generator", to_json(spec)}});
    write_manifest(a.out, "generate", to_json(spec), spec.seed, {a.out, a.out + ".meta.json"}, ctx.argv);
    ctx.out << summary;
    return 0;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string input;
    AnalysisOptions opts;
    std::size_t x_min = 0;
    bool skip_sp = false;
    bool directed = false;
    bool self_loops = false;
    std::string format = "csv";
    std::string out;
};

int cmd_analyze(AnalyzeArgs a, Context& ctx) {
    IngestConfig config;
    config.directed = a.directed;
    config.allow_self_loops = a.self_loops;
    const auto g = load_graph_with(a.input, config);
    if (a.x_min > 0) {
        a.opts.x_min = a.x_min;
    } else if (auto meta = load_meta(a.input); meta && meta->contains("generator") &&
                                                meta->at("generator").contains("m")) {
        a.opts.x_min = meta->at("generator").at("m").get<std::size_t>();
    }
    a.opts.shortest_paths = !a.skip_sp;
    const auto result = analyze(g, a.opts);
    const auto text = a.format == "json" ? analysis_json(result, a.opts).dump(2) + "\n" : analysis_csv(result, a.opts);
    emit(a.out, text, ctx.out);
    if (!a.out.empty()) {
        json params{{"input", a.input},      {"interval", a.opts.interval}, {"k", a.opts.ks},
                    {"xmin", a.opts.x_min},  {"threshold", a.opts.threshold}, {"format", a.format},
                    {"skip_sp", a.skip_sp}};
        write_manifest(a.out, "analyze", params, 0, {a.out}, ctx.argv);
    }
    return 0;
}

// --- compare ---------------------------------------------------------------

struct CompareArgs {
    std::string settings;
    std::size_t repeats = 10;
    std::uint64_t seed = 0;
    TimeStamp interval = 1;
    std::vector<std::size_t> ks{1, 5};
    bool skip_sp = false;
    std::string format = "csv";
    std::string out;
};

struct CompareRow {
    std::string name;
    std::string model;
    std::string error;
    std::map<std::string, std::string> values;
};

int cmd_compare(const CompareArgs& a, Context& ctx) {
    if (a.repeats == 0) throw usage_error("--repeats must be positive");
    std::ifstream in(a.settings);
    if (!in) throw std::runtime_error("cannot read settings " + a.settings);
    json doc = json::parse(in);
    if (doc.is_object() && doc.contains("settings")) doc = doc.at("settings");
    if (!doc.is_array()) throw usage_error("settings file must hold an array of generator settings");

    std::vector<std::string> columns{"vertices", "edges", "density", "avg_clustering", "avg_shortest_path",
                                     "max_degree", "gamma"};
    for (auto k : a.ks) columns.push_back("stars_k" + std::to_string(k));
    columns.push_back("skipped_edges");

    std::vector<CompareRow> rows(doc.size());
    parallel_for(doc.size(), [&](std::size_t i) {
        auto& row = rows[i];
        try {
            auto spec = generator_spec_from_json(doc[i]);
            row.name = spec.name.empty() ? spec.model + "_" + std::to_string(i) : spec.name;
            row.model = spec.model;
            std::map<std::string, std::pair<double, std::size_t>> sums;
            for (std::size_t r = 0; r < a.repeats; ++r) {
                spec.seed = a.seed + r;
                const auto gen = generate(spec);
                AnalysisOptions opts;
                opts.interval = a.interval;
                opts.ks = a.ks;
                opts.x_min = spec.m.value_or(1);
                opts.shortest_paths = !a.skip_sp;
                const auto horizons = series_horizons(gen.graph.t_max(), opts.interval);
                const auto f = compute_features(Snapshot(gen.graph, gen.graph.t_max()), {opts.x_min, opts.shortest_paths});
                auto add = [&](const std::string& key, const Metric& v) {
                    auto& [sum, count] = sums[key];
                    if (v) {
                        sum += *v;
                        ++count;
                    }
                };
                add("vertices", static_cast<double>(f.vertices));
                add("edges", static_cast<double>(f.edges));
                add("density", f.density);
                add("avg_clustering", f.avg_clustering);
                add("avg_shortest_path", f.avg_shortest_path);
                add("max_degree", static_cast<double>(f.max_degree));
                add("gamma", f.gamma);
                for (auto k : a.ks)
                    add("stars_k" + std::to_string(k),
                        static_cast<double>(k_stars_number(k_stars_vector(gen.graph, horizons, k))));
                add("skipped_edges", static_cast<double>(gen.skipped_edges));
            }
            for (const auto& [key, sc] : sums)
                row.values[key] = sc.second ? format_number(sc.first / static_cast<double>(sc.second)) : "";
        } catch (const std::exception& e) {
            row.error = e.what();
            row.values.clear();
        }
    });

    std::string text;
    if (a.format == "json") {
        json arr = json::array();
        for (const auto& row : rows) {
            json r{{"setting", row.name}, {"model", row.model}, {"repeats", a.repeats}};
            for (const auto& c : columns) {
                auto it = row.values.find(c);
                r[c] = (it == row.values.end() || it->second.empty()) ? json(nullptr) : json(std::stod(it->second));
            }
            r["error"] = row.error.empty() ? json(nullptr) : json(row.error);
            arr.push_back(r);
        }
        text = arr.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "setting,model,repeats";
        for (const auto& c : columns) os << ',' << c;
        os << ",error\n";
        for (const auto& row : rows) {
            auto error = row.error;
            std::replace(error.begin(), error.end(), ',', ';');
            os << row.name << ',' << row.model << ',' << a.repeats;
            for (const auto& c : columns) {
                auto it = row.values.find(c);
                os << ',' << (it == row.values.end() ? "" : it->second);
            }
            os << ',' << error << '\n';
        }
        text = os.str();
    }
    emit(a.out, text, ctx.out);
    if (!a.out.empty()) {
        json params{{"settings", a.settings}, {"repeats", a.repeats}, {"seed", a.seed},
                    {"interval", a.interval}, {"k", a.ks},             {"skip_sp", a.skip_sp},
                    {"format", a.format}};
        write_manifest(a.out, "compare", params, a.seed, {a.out}, ctx.argv);
    }
    return 0;
}

// --- stars -----------------------------------------------------------------

struct StarsArgs {
    std::string dir;
    std::vector<std::size_t> ks{1};
    std::size_t w = 1;
    TimeStamp interval = 1;
    double threshold = 0.5;
    bool no_split = false;
    std::string format = "csv";
    std::string out;
};

int cmd_stars(const StarsArgs& a, Context& ctx) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.dir))
        if (is_graph_file(entry.path())) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no edge-list files in " + a.dir);
    if (a.w == 0 || a.w > files.size())
        throw std::runtime_error("w = " + std::to_string(a.w) + " exceeds the " + std::to_string(files.size()) +
                                 " networks in " + a.dir);

    std::map<std::string, std::vector<TemporalGraph>> classes;
    for (const auto& f : files) {
        auto g = load_graph(f);
        const auto cls = a.no_split ? std::string("all")
                                    : std::string(to_string(classify_vibrancy(vibrancy(jrc(g, a.interval)), a.threshold)));
        classes[cls].push_back(std::move(g));
    }

    std::ostringstream csv;
    csv << "class,k,t,active,total,avg,norm_avg\n";
    json doc = json::object();
    for (const char* cls : {"all", "fast", "slow"}) {
        auto it = classes.find(cls);
        if (it == classes.end()) continue;
        const auto& nets = it->second;
        if (nets.size() < a.w) {
            ctx.err << "class " << cls << ": " << nets.size() << " networks, fewer than w = " << a.w << "; skipped\n";
            continue;
        }
        const auto horizons = aggregate_horizons(nets, a.w, a.interval);
        for (auto k : a.ks) {
            const auto agg = stars_aggregate(nets, k, a.w, horizons);
            for (std::size_t i = 0; i < horizons.size(); ++i)
                csv << cls << ',' << k << ',' << horizons[i] << ',' << agg.active[i] << ',' << agg.total[i] << ','
                    << format_number(agg.avg[i]) << ',' << format_number(agg.norm_avg[i]) << '\n';
            doc[cls][std::to_string(k)] = {{"t", horizons},         {"active", agg.active}, {"total", agg.total},
                                           {"avg", agg.avg},        {"norm_avg", agg.norm_avg},
                                           {"networks", nets.size()}};
        }
    }
    emit(a.out, a.format == "json" ? doc.dump(2) + "\n" : csv.str(), ctx.out);
    if (!a.out.empty()) {
        json params{{"dir", a.dir},          {"k", a.ks},           {"w", a.w},
                    {"interval", a.interval}, {"threshold", a.threshold}, {"no_split", a.no_split},
                    {"format", a.format}};
        write_manifest(a.out, "stars", params, 0, {a.out}, ctx.argv);
    }
    return 0;
}

// --- ingest ----------------------------------------------------------------

struct IngestArgs {
    std::string input;
    IngestConfig config;
    std::size_t max_degree = 0;
    bool no_dedupe = false;
    bool normalize = false;
    std::string out;
};

int cmd_ingest(IngestArgs a, Context& ctx) {
    if (a.max_degree > 0) a.config.max_degree = a.max_degree;
    a.config.dedupe = !a.no_dedupe;
    std::ifstream in(a.input);
    if (!in) throw std::runtime_error("cannot read " + a.input);
    std::vector<std::uint64_t> ids;
    auto g = read_edge_stream(in, a.config, &ids);
    if (a.normalize) g = normalize_times(g);
    if (a.out.empty()) {
        write_edge_list(ctx.out, g);
        return 0;
    }
    save_graph(a.out, g);
    std::ostringstream map;
    map << "vertex,stream_id\n";
    for (std::size_t v = 0; v < ids.size(); ++v) map << v << ',' << ids[v] << '\n';
    write_file(a.out + ".ids.csv", map.str());
    json params{{"input", a.input},
                {"directed", a.config.directed},
                {"self_loops", a.config.allow_self_loops},
                {"no_dedupe", a.no_dedupe},
                {"min_edges", a.config.min_edges},
                {"min_vertices", a.config.min_vertices},
                {"max_degree", a.max_degree},
                {"time_unit", a.config.time_unit_label},
                {"normalize", a.normalize}};
    write_manifest(a.out, "ingest", params, 0, {a.out, a.out + ".meta.json", a.out + ".ids.csv"}, ctx.argv);
    ctx.out << "vertices=" << g.vertex_count() << " edges=" << g.edge_count() << "\n";
    return 0;
}

// --- timediff --------------------------------------------------------------

struct TimeDiffArgs {
    std::string input;
    TimeStamp bin = 1;
    bool fit = false;
    TimeStamp fit_from = 0;
    std::string format = "csv";
    std::string out;
};

int cmd_timediff(const TimeDiffArgs& a, Context& ctx) {
    const auto g = load_graph(a.input);
    const auto points = join_time_diff_prob(g, a.bin);
    std::optional<SeriesFit> fit;
    if (a.fit) {
        std::vector<double> xs, ys;
        for (const auto& p : points)
            if (p.diff_bin >= a.fit_from && p.probability > 0.0) {
                xs.push_back(static_cast<double>(p.diff_bin));
                ys.push_back(p.probability);
            }
        fit = fit_exp_decay(xs, ys);
    }
    std::string text;
    if (a.format == "json") {
        json j;
        j["points"] = json::array();
        for (const auto& p : points)
            j["points"].push_back({{"diff_bin", p.diff_bin},
                                   {"probability", p.probability},
                                   {"connected_pairs", p.connected_pairs},
                                   {"eligible_pairs", p.eligible_pairs}});
        j["fit"] = fit ? to_json(*fit) : json(nullptr);
        text = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "diff_bin,probability,connected_pairs,eligible_pairs\n";
        for (const auto& p : points)
            os << p.diff_bin << ',' << format_number(p.probability) << ',' << p.connected_pairs << ','
               << p.eligible_pairs << '\n';
        if (fit) ctx.err << to_json(*fit).dump() << '\n';
        text = os.str();
    }
    emit(a.out, text, ctx.out);
    return 0;
}

// --- fit -------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string family = "quartic";
    double exponent = kDefaultRationalExponent;
    std::string out;
};

int cmd_fit(const FitArgs& a, Context& ctx) {
    std::ifstream in(a.input);
    if (!in) throw std::runtime_error("cannot read " + a.input);
    std::vector<double> xs, ys;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x, y;
        if (!(fields >> x >> y)) {
            if (xs.empty()) continue;  // header
            throw parse_error(line_no, "expected two numeric columns");
        }
        xs.push_back(x);
        ys.push_back(y);
    }
    SeriesFit fit;
    if (a.family == "quartic") fit = polyfit(xs, ys, 4);
    else if (a.family.rfind("poly:", 0) == 0) fit = polyfit(xs, ys, parse_value<std::size_t>(a.family.substr(5), "degree"));
    else if (a.family == "exp") fit = fit_exp_decay(xs, ys);
    else if (a.family == "rational_power") fit = fit_rational_power(xs, ys, a.exponent);
    else if (a.family == "rational_quadratic") fit = fit_rational_quadratic(xs, ys);
    else throw usage_error("unknown fit family '" + a.family + "'");
    emit(a.out, to_json(fit).dump(2) + "\n", ctx.out);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Temporal network generation and analysis", "temponet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    Context ctx{out, err, {}};
    std::function<int()> action;
    std::string config_path;  // consumed by expand_config; declared for --help

    // Parsed into these; each subcommand's callback picks its own.
    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Generate a TPA or baseline network");
    generate_cmd->add_option("--model", gen.spec.model, "tpa, ba, ws, nw, hk, ff")
        ->check(CLI::IsMember({"tpa", "ba", "ws", "nw", "hk", "ff"}));
    gen.m_opt = generate_cmd->add_option("--m", gen.m, "Edges per joining vertex (tpa, ba, hk)");
    gen.n_opt = generate_cmd->add_option("--n", gen.n, "Vertex count (baselines)");
    generate_cmd->add_option("--k", gen.spec.k, "Lattice degree (ws, nw)");
    gen.p_opt = generate_cmd->add_option("--p", gen.p, "Rewiring / triangle / forward-burning probability");
    generate_cmd->add_option("--schedule", gen.spec.schedule, "Growth schedule (tpa)");
    generate_cmd->add_option("--f", gen.spec.f, "Time-difference function (tpa)");
    generate_cmd->add_option("--seed", gen.spec.seed);
    generate_cmd->add_option("--retry-limit", gen.spec.retry_limit);
    generate_cmd->add_option("--out", gen.out, "Edge-list output path");
    generate_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    generate_cmd->callback([&] { action = [&] { return cmd_generate(gen, ctx); }; });

    AnalyzeArgs ana;
    auto* analyze_cmd = app.add_subcommand("analyze", "Feature series of a temporal edge list");
    analyze_cmd->add_option("input,--input", ana.input, "Edge-list file")->required();
    analyze_cmd->add_option("--interval", ana.opts.interval)->check(CLI::PositiveNumber);
    analyze_cmd->add_option("--k", ana.opts.ks, "K-Stars sizes")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    analyze_cmd->add_option("--xmin", ana.x_min, "Power-law x_min (default: generator m, else 1)");
    analyze_cmd->add_option("--threshold", ana.opts.threshold, "Vibrancy class threshold");
    analyze_cmd->add_flag("--skip-sp", ana.skip_sp, "Skip average shortest paths");
    analyze_cmd->add_flag("--directed", ana.directed, "Raw input is directed");
    analyze_cmd->add_flag("--self-loops", ana.self_loops, "Keep self-loops of raw input");
    analyze_cmd->add_option("--format", ana.format)->check(CLI::IsMember({"csv", "json"}));
    analyze_cmd->add_option("--out", ana.out);
    analyze_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    analyze_cmd->callback([&] { action = [&] { return cmd_analyze(ana, ctx); }; });

    CompareArgs cmp;
    auto* compare_cmd = app.add_subcommand("compare", "Mean features over seeded repeats per setting");
    compare_cmd->add_option("--settings", cmp.settings, "JSON array of generator settings")->required();
    compare_cmd->add_option("--repeats", cmp.repeats);
    compare_cmd->add_option("--seed", cmp.seed, "Base seed; repeat r uses seed + r");
    compare_cmd->add_option("--interval", cmp.interval)->check(CLI::PositiveNumber);
    compare_cmd->add_option("--k", cmp.ks)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    compare_cmd->add_flag("--skip-sp", cmp.skip_sp);
    compare_cmd->add_option("--format", cmp.format)->check(CLI::IsMember({"csv", "json"}));
    compare_cmd->add_option("--out", cmp.out);
    compare_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    compare_cmd->callback([&] { action = [&] { return cmd_compare(cmp, ctx); }; });

    StarsArgs st;
    auto* stars_cmd = app.add_subcommand("stars", "Star-emergence vectors per vibrancy class");
    stars_cmd->add_option("--dir", st.dir, "Directory of edge-list files")->required();
    stars_cmd->add_option("--k", st.ks)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    stars_cmd->add_option("--w", st.w, "Minimum number of active networks");
    stars_cmd->add_option("--interval", st.interval)->check(CLI::PositiveNumber);
    stars_cmd->add_option("--threshold", st.threshold);
    stars_cmd->add_flag("--no-split", st.no_split, "Aggregate all networks as one class");
    stars_cmd->add_option("--format", st.format)->check(CLI::IsMember({"csv", "json"}));
    stars_cmd->add_option("--out", st.out);
    stars_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    stars_cmd->callback([&] { action = [&] { return cmd_stars(st, ctx); }; });

    IngestArgs ing;
    auto* ingest_cmd = app.add_subcommand("ingest", "Build a temporal graph from a timestamped edge stream");
    ingest_cmd->add_option("input,--input", ing.input)->required();
    ingest_cmd->add_flag("--directed", ing.config.directed);
    ingest_cmd->add_flag("--self-loops", ing.config.allow_self_loops);
    ingest_cmd->add_flag("--no-dedupe", ing.no_dedupe);
    ingest_cmd->add_option("--min-edges", ing.config.min_edges);
    ingest_cmd->add_option("--min-vertices", ing.config.min_vertices);
    ingest_cmd->add_option("--max-degree", ing.max_degree, "Drop ids with more distinct neighbours");
    ingest_cmd->add_option("--time-unit", ing.config.time_unit_label);
    ingest_cmd->add_flag("--normalize", ing.normalize, "Shift times so the first join is 0");
    ingest_cmd->add_option("--out", ing.out);
    ingest_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    ingest_cmd->callback([&] { action = [&] { return cmd_ingest(ing, ctx); }; });

    TimeDiffArgs td;
    auto* timediff_cmd = app.add_subcommand("timediff", "Connection probability by join-time difference");
    timediff_cmd->add_option("input,--input", td.input)->required();
    timediff_cmd->add_option("--bin", td.bin)->check(CLI::PositiveNumber);
    timediff_cmd->add_flag("--fit", td.fit, "Fit a * exp(-d / b)");
    timediff_cmd->add_option("--fit-from", td.fit_from, "Smallest bin used by the fit");
    timediff_cmd->add_option("--format", td.format)->check(CLI::IsMember({"csv", "json"}));
    timediff_cmd->add_option("--out", td.out);
    timediff_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    timediff_cmd->callback([&] { action = [&] { return cmd_timediff(td, ctx); }; });

    FitArgs ft;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a curve to a two-column series");
    fit_cmd->add_option("input,--input", ft.input)->required();
    fit_cmd->add_option("--family", ft.family, "quartic, poly:<d>, exp, rational_power, rational_quadratic");
    fit_cmd->add_option("--exponent", ft.exponent);
    fit_cmd->add_option("--out", ft.out);
    fit_cmd->add_option("--config", config_path, "JSON config mirroring flag names");
    fit_cmd->callback([&] { action = [&] { return cmd_fit(ft, ctx); }; });

    std::string manifest_path;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
    replay_cmd->add_option("manifest", manifest_path)->required();

    try {
        ctx.argv = expand_config(raw_args);
        std::vector<std::string> reversed(ctx.argv.rbegin(), ctx.argv.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (replay_cmd->parsed()) {
            std::ifstream in(manifest_path);
            if (!in) throw std::runtime_error("cannot read manifest " + manifest_path);
            const auto manifest = json::parse(in);
            return run(manifest.at("argv").get<std::vector<std::string>>(), out, err);
        }
        return action();
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return 2;
    } catch (const rejected_graph_error& e) {
        err << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace temponet::cli
