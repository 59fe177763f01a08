// tim: temporal influence-maximization pipeline CLI.
//
// Subcommands: ingest, mine, serialize, coldstart, simulate, stats, bench,
// plot. All randomness flows from --seed; artifacts are deterministic given
// the same inputs, flags and seed (bench timing fields excepted), and every
// artifact gets a .meta.json sidecar with the resolved parameters and a
// config hash. Flag precedence: command line > --config file > defaults.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tim/cold_start.hpp"
#include "tim/diffusion.hpp"
#include "tim/graph_io.hpp"
#include "tim/ipp.hpp"
#include "tim/message_agg.hpp"
#include "tim/serialization.hpp"
#include "tim/temporal_graph.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
    kOk = 0,
    kUsage = 64,        // bad flags / unknown subcommand
    kDataError = 65,    // malformed input data
    kMissingInput = 66, // input file not found / unreadable
    kSchemaError = 67,  // contract or guard violation (ranges, sizes, formats)
    kInternal = 70,
};

constexpr const char* kExitCodeHelp =
    "Exit codes:\n"
    "  0   success\n"
    "  64  usage error (flags, subcommands)\n"
    "  65  data error (malformed input lines)\n"
    "  66  missing or unreadable input file\n"
    "  67  contract violation (ranges, guards, schema)\n"
    "  70  internal error\n";

struct Global {
    std::string config_path;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir = ".";
    json config = json::object();
};

json section(const json& cfg, const char* name) {
    if (cfg.is_object() && cfg.contains(name) && cfg[name].is_object()) return cfg[name];
    return json::object();
}

// flags > config file > defaults
template <class T>
void cfg_override(const CLI::Option* opt, T& var, const json& sec, const char* key) {
    if (opt && opt->count() > 0) return;
    if (sec.contains(key)) var = sec.at(key).get<T>();
}

tim::RelationMask parse_mask(const std::string& s) {
    if (s == "weak") return tim::RelationMask::weak_only();
    if (s == "strong") return tim::RelationMask::strong_only();
    if (s == "ws" || s == "weak+strong") return tim::RelationMask::weak_strong();
    if (s == "all") return tim::RelationMask::all();
    throw std::invalid_argument("unknown relation set '" + s + "' (use weak|strong|ws|all)");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_text(const fs::path& path, const std::string& bytes) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_artifact(const fs::path& path, const std::string& bytes, const std::string& command,
                    const Global& g, const json& params) {
    write_text(path, bytes);
    json meta;
    meta["command"] = command;
    meta["params"] = params;
    meta["seed"] = g.seed;
    meta["config_hash"] = hex64(tim::fnv1a64(params.dump()));
    meta["tool"] = {{"name", "tim"}, {"version", std::string(tim::kVersion)}};
    write_text(path.string() + ".meta.json", meta.dump(2) + "\n");
}

fs::path out_path(const Global& g, const std::string& name) { return fs::path(g.out_dir) / name; }

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw fs::filesystem_error("cannot open input", path,
                                   std::make_error_code(std::errc::no_such_file_or_directory));
    return in;
}

tim::TemporalMultiGraph load_graph_arg(const std::string& base) {
    if (!fs::exists(base + ".json"))
        throw fs::filesystem_error("graph sidecar not found", base + ".json",
                                   std::make_error_code(std::errc::no_such_file_or_directory));
    return tim::load_graph(base);
}

tim::SerializationConfig serialization_from(const json& sec, unsigned max_value, unsigned digits,
                                            unsigned top_k, const std::string& rels) {
    tim::SerializationConfig cfg;
    cfg.max_value = max_value;
    cfg.digits = digits;
    cfg.top_k = top_k;
    cfg.rels = parse_mask(rels);
    (void)sec;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string edges;
    std::string format = "csv"; // csv | weighted
    std::string name = "graph";
    bool header = false;
    std::uint64_t bucket = 0;
    double quantile = 0.3;
};

int cmd_ingest(const Global& g, const IngestArgs& a) {
    auto in = open_input(a.edges);
    tim::IngestResult result = [&] {
        if (a.format == "weighted") {
            tim::WeightedIngestOptions opts;
            opts.expect_header = a.header;
            opts.bucket_width = a.bucket;
            opts.strong_quantile = a.quantile;
            return tim::ingest_weighted_edges(in, opts);
        }
        if (a.format != "csv") throw std::invalid_argument("unknown ingest format: " + a.format);
        tim::IngestOptions opts;
        opts.expect_header = a.header;
        opts.bucket_width = a.bucket;
        return tim::ingest_edges(in, opts);
    }();

    fs::create_directories(g.out_dir);
    const fs::path base = out_path(g, a.name);
    tim::save_graph(result.graph, base);

    json params;
    params["edges"] = a.edges;
    params["format"] = a.format;
    params["header"] = a.header;
    params["bucket"] = a.bucket;
    if (a.format == "weighted") params["strong_quantile"] = a.quantile;
    params["name"] = a.name;

    json stats;
    stats["lines_read"] = result.stats.lines_read;
    stats["rows_accepted"] = result.stats.rows_accepted;
    stats["edges"] = result.stats.edges;
    stats["duplicates_dropped"] = result.stats.duplicates_dropped;
    stats["self_loops_rejected"] = result.stats.self_loops_rejected;
    stats["self_loop_lines"] = result.stats.self_loop_lines;
    stats["nodes"] = result.graph.num_nodes();
    stats["timestamps"] = result.graph.num_timestamps();
    stats["edges_weak"] = result.graph.num_edges(tim::Relation::weak);
    stats["edges_strong"] = result.graph.num_edges(tim::Relation::strong);
    stats["edges_cold"] = result.graph.num_edges(tim::Relation::cold);
    write_artifact(base.string() + ".ingest.json", stats.dump(2) + "\n", "ingest", g, params);
    std::cout << stats.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct MineArgs {
    std::string graph;
    std::string rels = "ws";
    std::string out = "ipps.jsonl";
    std::string labels = "labels.json";
};

int cmd_mine(const Global& g, const MineArgs& a) {
    const auto graph = load_graph_arg(a.graph);
    tim::MineOptions opts;
    opts.rels = parse_mask(a.rels);
    opts.threads = g.threads;
    tim::MotifStats stats;
    const auto ipps = tim::mine_ipps(graph, opts, &stats);
    const auto labels = tim::active_members(ipps);

    json params;
    params["graph"] = a.graph;
    params["rels"] = a.rels;

    std::ostringstream ipps_out;
    tim::write_ipps_jsonl(ipps_out, ipps);
    write_artifact(out_path(g, a.out), ipps_out.str(), "mine", g, params);

    std::ostringstream labels_out;
    tim::write_labels_json(labels_out, labels);
    write_artifact(out_path(g, a.labels), labels_out.str(), "mine", g, params);

    json summary;
    summary["candidates"] = stats.candidates;
    summary["ipps"] = ipps.size();
    summary["active_members"] = labels.counts.size();
    std::cout << summary.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct SerializeArgs {
    std::string graph;
    std::string ipps; // optional: mined on the fly when empty
    std::string out = "corpus.jsonl";
    std::string rels = "ws";
    unsigned max_value = 99;
    unsigned digits = 2;
    unsigned top_k = 3;
};

int cmd_serialize(const Global& g, const SerializeArgs& a) {
    const auto graph = load_graph_arg(a.graph);
    const auto cfg = serialization_from({}, a.max_value, a.digits, a.top_k, a.rels);

    std::vector<tim::Ipp> ipps;
    if (a.ipps.empty()) {
        ipps = tim::mine_ipps(graph, {.rels = cfg.rels, .threads = g.threads});
    } else {
        auto in = open_input(a.ipps);
        ipps = tim::read_ipps_jsonl(in);
    }
    const auto records = tim::serialize_corpus(graph, ipps, cfg);

    json params;
    params["graph"] = a.graph;
    params["ipps"] = a.ipps;
    params["rels"] = a.rels;
    params["max_value"] = a.max_value;
    params["digits"] = a.digits;
    params["top_k"] = a.top_k;

    std::ostringstream out;
    tim::write_istr_corpus(out, records);
    write_artifact(out_path(g, a.out), out.str(), "serialize", g, params);
    std::cout << "{\"records\":" << records.size() << ",\"string_length\":" << cfg.istr_length()
              << "}\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct ColdstartArgs {
    std::string graph;
    std::string corpus; // optional: mined+serialized on the fly when empty
    std::string out = "cold_edges.csv";
    std::size_t window = 5;
    std::size_t min_sim = 0;
    std::size_t sample_k = 3;
    bool only_cold = false;
    std::size_t cold_c = 1;
    bool legacy_threshold = false;
    bool strict = false;
    std::string rels = "ws";
    unsigned max_value = 99;
    unsigned digits = 2;
    unsigned top_k = 3;
};

int cmd_coldstart(const Global& g, const ColdstartArgs& a) {
    const auto graph = load_graph_arg(a.graph);
    const auto cfg = serialization_from({}, a.max_value, a.digits, a.top_k, a.rels);

    std::vector<tim::IStrRecord> records;
    if (a.corpus.empty()) {
        const auto ipps = tim::mine_ipps(graph, {.rels = cfg.rels, .threads = g.threads});
        records = tim::serialize_corpus(graph, ipps, cfg);
    } else {
        auto in = open_input(a.corpus);
        records = tim::read_istr_corpus(in);
    }

    const auto ptt = tim::PttIndex::build(records, cfg);
    tim::RetrievalParams params;
    params.window = a.window;
    params.min_sim = a.min_sim;
    params.sample_k = a.sample_k;
    params.seed = g.seed;
    params.legacy_threshold = a.legacy_threshold;
    params.strict = a.strict;
    params.only_cold = a.only_cold;
    params.cold_max_neighbors = a.cold_c;
    params.threads = g.threads;
    const auto edges = tim::neighbor_retrieval(graph, records, ptt, cfg, params);

    json jparams;
    jparams["graph"] = a.graph;
    jparams["corpus"] = a.corpus;
    jparams["window"] = a.window;
    jparams["min_sim"] = a.min_sim;
    jparams["sample_k"] = a.sample_k;
    jparams["only_cold"] = a.only_cold;
    jparams["cold_c"] = a.cold_c;
    jparams["legacy_threshold"] = a.legacy_threshold;
    jparams["strict"] = a.strict;
    jparams["rels"] = a.rels;
    jparams["max_value"] = a.max_value;
    jparams["digits"] = a.digits;
    jparams["top_k"] = a.top_k;

    std::ostringstream out;
    tim::write_edges_csv(out, graph, edges);
    write_artifact(out_path(g, a.out), out.str(), "coldstart", g, jparams);
    std::cout << "{\"corpus_records\":" << records.size() << ",\"distinct_strings\":" << ptt.size()
              << ",\"edges\":" << edges.size() << "}\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string graph;
    std::string augment; // optional cold-edge CSV to merge in
    bool use_cold_edges = false;
    std::string strategy = "degree"; // random | degree | ipp-frequency | file
    std::string seeds_file;          // raw node keys, one per line
    std::string labels;              // optional labels.json for ipp-frequency
    std::size_t k = 5;
    std::int64_t t_end = -1; // -1: last timestamp
    std::size_t max_hops = 3;
    std::string mode = "reach"; // reach | union
    bool ic = false;
    double ic_p = 0.1;
    unsigned ic_trials = 100;
    std::string out = "spread.json";
};

int cmd_simulate(const Global& g, const SimulateArgs& a) {
    auto graph = load_graph_arg(a.graph);
    if (!a.augment.empty()) {
        auto in = open_input(a.augment);
        const auto extra = tim::read_edges_csv(in, graph);
        graph = graph.augment(extra);
    }
    if (graph.num_timestamps() == 0) throw std::invalid_argument("graph has no timestamps");
    const tim::Timestamp t_end = a.t_end < 0 ? graph.num_timestamps() - 1
                                             : static_cast<tim::Timestamp>(a.t_end);

    tim::SeedSet seeds;
    if (a.strategy == "file") {
        if (a.seeds_file.empty()) throw std::invalid_argument("--seeds-file required for file strategy");
        auto in = open_input(a.seeds_file);
        std::vector<tim::NodeId> ids;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto id = graph.find_node(line);
            if (!id) throw tim::ParseError(line_no, "unknown node key '" + line + "'");
            ids.push_back(*id);
        }
        seeds = tim::seed_set_from_ids(graph, ids);
    } else {
        tim::SeedStrategy strategy;
        if (a.strategy == "random") strategy = tim::SeedStrategy::random;
        else if (a.strategy == "degree") strategy = tim::SeedStrategy::degree;
        else if (a.strategy == "ipp-frequency") strategy = tim::SeedStrategy::ipp_frequency;
        else throw std::invalid_argument("unknown strategy: " + a.strategy);

        tim::LabelSet labels;
        if (strategy == tim::SeedStrategy::ipp_frequency) {
            if (!a.labels.empty()) {
                auto in = open_input(a.labels);
                labels = tim::read_labels_json(in);
            } else {
                labels = tim::active_members(tim::mine_ipps(graph, {.threads = g.threads}));
            }
        }
        seeds = tim::select_seeds(graph, strategy, a.k, g.seed, &labels);
    }

    tim::DiffusionOptions opts;
    opts.rels = a.use_cold_edges ? tim::RelationMask::all() : tim::RelationMask::weak_strong();

    json params;
    params["graph"] = a.graph;
    params["augment"] = a.augment;
    params["use_cold_edges"] = a.use_cold_edges;
    params["strategy"] = a.strategy;
    params["k"] = a.k;
    params["t_end"] = t_end;
    params["max_hops"] = a.max_hops;
    params["mode"] = a.mode;

    json report;
    if (a.mode == "union") {
        json per_t = json::array();
        for (tim::Timestamp t = 0; t <= t_end; ++t) per_t.push_back(tim::union_scale(graph, t, opts));
        report["mode"] = "union";
        report["per_timestamp_observed"] = per_t;
        report["total_observed"] = tim::union_scale(graph, t_end, opts);
        report["seeds"] = seeds.seeds;
    } else if (a.mode == "reach") {
        const auto spread = tim::hop_limited_spread(graph, seeds, t_end, a.max_hops, opts);
        report = tim::spread_report_json(spread);
        report["mode"] = "reach";
        report["network_scale"] = tim::network_scale(graph, seeds, t_end, opts);
        report["strategy"] = a.strategy;
    } else {
        throw std::invalid_argument("unknown mode: " + a.mode);
    }
    if (a.ic) {
        tim::IcOptions ic;
        ic.edge_probability = a.ic_p;
        ic.trials = a.ic_trials;
        ic.seed = g.seed;
        ic.rels = opts.rels;
        const auto icr = tim::independent_cascade(graph, seeds, t_end, ic);
        report["ic"] = {{"p", a.ic_p}, {"trials", a.ic_trials}, {"mean_reached", icr.mean_reached},
                        {"per_trial", icr.per_trial}};
        params["ic"] = {{"p", a.ic_p}, {"trials", a.ic_trials}};
    }

    write_artifact(out_path(g, a.out), report.dump(2) + "\n", "simulate", g, params);
    std::cout << report.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct StatsArgs {
    std::string graph;
    std::size_t cold_c = 1;
    std::string rels = "ws";
    std::string out = "stats.json";
};

int cmd_stats(const Global& g, const StatsArgs& a) {
    const auto graph = load_graph_arg(a.graph);
    const auto mask = parse_mask(a.rels);

    json per_t = json::array();
    std::size_t min_cold = std::numeric_limits<std::size_t>::max();
    for (tim::Timestamp t = 0; t < graph.num_timestamps(); ++t) {
        bool empty = false;
        const double ratio = tim::one_neighbor_ratio(graph, t, mask, &empty);
        const auto cold = graph.cold_start_nodes(t, a.cold_c);
        min_cold = std::min(min_cold, cold.size());
        json row;
        row["t"] = t;
        row["nodes"] = graph.nodes_at(t).size();
        row["strong_nodes"] = graph.strong_nodes_at(t).size();
        row["cold_start_nodes"] = cold.size();
        row["one_neighbor_ratio"] = ratio;
        row["one_neighbor_ratio_defined"] = !empty;
        per_t.push_back(row);
    }

    json out;
    out["timestamps"] = graph.num_timestamps();
    out["nodes"] = graph.num_nodes();
    out["edges"] = graph.num_edges();
    out["edges_weak"] = graph.num_edges(tim::Relation::weak);
    out["edges_strong"] = graph.num_edges(tim::Relation::strong);
    out["edges_cold"] = graph.num_edges(tim::Relation::cold);
    out["cold_c"] = a.cold_c;
    out["min_cold_start_nodes"] = graph.num_timestamps() == 0 ? 0 : min_cold;
    out["per_timestamp"] = per_t;

    json params;
    params["graph"] = a.graph;
    params["cold_c"] = a.cold_c;
    params["rels"] = a.rels;
    write_artifact(out_path(g, a.out), out.dump(2) + "\n", "stats", g, params);
    std::cout << out.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::size_t events = 100'000;
    std::size_t dim = 32;
    std::size_t nodes = 16'384;
    std::vector<std::size_t> batches = {256, 1024, 4096};
    unsigned runs = 5;
    std::string rule = "replace"; // replace | ema | gru
    std::string mode = "lm";      // lm | mm
    double alpha = 0.5;
    std::string feed; // optional CSV feed; synthesized when empty
    std::string out = "bench.json";
};

int cmd_bench(const Global& g, const BenchArgs& a) {
    tim::BenchConfig cfg;
    cfg.feed_sizes = {a.events};
    cfg.batch_sizes = a.batches;
    cfg.dim = a.dim;
    cfg.num_nodes = a.nodes;
    cfg.runs = a.runs;
    cfg.seed = g.seed;
    cfg.ema_alpha = a.alpha;
    if (a.rule == "replace") cfg.rule = tim::UpdateRule::replace;
    else if (a.rule == "ema") cfg.rule = tim::UpdateRule::ema;
    else if (a.rule == "gru") cfg.rule = tim::UpdateRule::gru;
    else throw std::invalid_argument("unknown rule: " + a.rule);
    if (a.mode == "lm") cfg.mode = tim::AggregationMode::latest_message;
    else if (a.mode == "mm") cfg.mode = tim::AggregationMode::mean_message;
    else throw std::invalid_argument("unknown mode: " + a.mode);

    tim::BenchReport report;
    if (a.feed.empty()) {
        report = tim::run_bench(cfg);
    } else {
        auto in = open_input(a.feed);
        const auto feed = tim::read_feed_csv(in);
        report = tim::run_bench(cfg, &feed);
    }

    json params;
    params["events"] = a.events;
    params["dim"] = a.dim;
    params["nodes"] = a.nodes;
    params["batches"] = a.batches;
    params["runs"] = a.runs;
    params["rule"] = a.rule;
    params["mode"] = a.mode;
    params["feed"] = a.feed;

    const auto j = tim::bench_report_json(report);
    write_artifact(out_path(g, a.out), j.dump(2) + "\n", "bench", g, params);
    std::cout << j.dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
    std::string report;
    std::string what = "hops";  // hops | time
    std::string format = "svg"; // svg | csv
    std::string out = "plot.svg";
};

std::string render_svg(const std::string& title, const std::string& x_label,
                       const std::vector<double>& xs, const std::vector<double>& ys) {
    const double width = 640, height = 400, margin = 56;
    double y_max = 1;
    for (double y : ys) y_max = std::max(y_max, y);
    double x_max = 1;
    for (double x : xs) x_max = std::max(x_max, x);

    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    auto px = [&](double x) { return margin + (width - 2 * margin) * (x_max > 0 ? x / x_max : 0); };
    auto py = [&](double y) { return height - margin - (height - 2 * margin) * (y / y_max); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
        << "</text>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << height - margin + 16 << "\" font-size=\"10\">0</text>\n";
    svg << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(x_max) << "</text>\n";
    svg << "<text x=\"" << margin - 6 << "\" y=\"" << margin << "\" text-anchor=\"end\" font-size=\"10\">"
        << fmt(y_max) << "</text>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) svg << fmt(px(xs[i])) << ',' << fmt(py(ys[i])) << ' ';
    svg << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        svg << "<circle cx=\"" << fmt(px(xs[i])) << "\" cy=\"" << fmt(py(ys[i]))
            << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

int cmd_plot(const Global& g, const PlotArgs& a) {
    auto in = open_input(a.report);
    const json report = json::parse(in);

    std::vector<double> xs, ys;
    std::string title, x_label, csv_header;
    if (a.what == "hops") {
        const auto& hops = report.at("reached_per_hop");
        for (std::size_t h = 0; h < hops.size(); ++h) {
            xs.push_back(static_cast<double>(h));
            ys.push_back(hops[h].get<double>());
        }
        title = "reached nodes by hop";
        x_label = "hops";
        csv_header = "hop,reached";
    } else if (a.what == "time") {
        const auto& per_t = report.at("reached_per_timestamp");
        for (std::size_t t = 0; t < per_t.size(); ++t) {
            xs.push_back(static_cast<double>(t));
            ys.push_back(per_t[t].get<double>());
        }
        title = "reached nodes over time";
        x_label = "timestamp";
        csv_header = "t,reached";
    } else {
        throw std::invalid_argument("unknown plot series: " + a.what);
    }

    json params;
    params["report"] = a.report;
    params["what"] = a.what;
    params["format"] = a.format;

    std::string bytes;
    if (a.format == "svg") {
        bytes = render_svg(title, x_label, xs, ys);
    } else if (a.format == "csv") {
        std::ostringstream csv;
        csv << csv_header << "\n";
        for (std::size_t i = 0; i < xs.size(); ++i)
            csv << static_cast<long long>(xs[i]) << ',' << static_cast<long long>(ys[i]) << "\n";
        bytes = csv.str();
    } else {
        throw std::invalid_argument("unknown plot format: " + a.format);
    }
    write_artifact(out_path(g, a.out), bytes, "plot", g, params);
    std::cout << "{\"points\":" << xs.size() << "}\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tim: temporal influence-maximization pipeline"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    Global g;
    app.add_option("--config", g.config_path, "JSON config file (flags override it)");
    auto* seed_opt = app.add_option("--seed", g.seed, "seed for all randomness");
    auto* threads_opt = app.add_option("--threads", g.threads, "internal parallelism cap");
    auto* outdir_opt = app.add_option("--out-dir", g.out_dir, "directory for output artifacts");

    IngestArgs ia;
    auto* ingest = app.add_subcommand("ingest", "parse an edge list into the graph container");
    ingest->add_option("--edges", ia.edges, "edge CSV: src,dst,timestamp,relation")->required();
    ingest->add_option("--format", ia.format, "csv | weighted (src,dst,weight,epoch)");
    ingest->add_option("--name", ia.name, "output base name");
    ingest->add_flag("--header", ia.header, "skip the first non-comment line");
    auto* bucket_opt = ingest->add_option("--bucket", ia.bucket, "bucket width for raw epochs (0 = none)");
    auto* quant_opt = ingest->add_option("--strong-quantile", ia.quantile,
                                         "weighted format: accumulated-weight quantile separating strong edges");

    MineArgs ma;
    auto* mine = app.add_subcommand("mine", "mine influence propagation paths and labels");
    mine->add_option("--graph", ma.graph, "graph base path (from ingest)")->required();
    auto* mine_rels = mine->add_option("--rels", ma.rels, "relations for path edges: weak|strong|ws|all");
    mine->add_option("--out", ma.out, "paths output (JSON lines)");
    mine->add_option("--labels", ma.labels, "active-member labels output (JSON)");

    SerializeArgs sa;
    auto* serialize = app.add_subcommand("serialize", "serialize paths into the string corpus");
    serialize->add_option("--graph", sa.graph, "graph base path")->required();
    serialize->add_option("--ipps", sa.ipps, "paths file (mined on the fly when omitted)");
    serialize->add_option("--out", sa.out, "corpus output (JSON lines)");
    auto* ser_rels = serialize->add_option("--rels", sa.rels, "relations counted in degrees");
    auto* ser_max = serialize->add_option("--max-value", sa.max_value, "truncation ceiling");
    auto* ser_digits = serialize->add_option("--digits", sa.digits, "characters per number");
    auto* ser_topk = serialize->add_option("--top-k", sa.top_k, "retained degree-count pairs");

    ColdstartArgs ca;
    auto* coldstart = app.add_subcommand("coldstart", "retrieve augmentation edges for cold nodes");
    coldstart->add_option("--graph", ca.graph, "graph base path")->required();
    coldstart->add_option("--corpus", ca.corpus, "corpus file (serialized on the fly when omitted)");
    coldstart->add_option("--out", ca.out, "augmentation edge CSV output");
    auto* cs_window = coldstart->add_option("--window", ca.window, "positions scanned each side");
    auto* cs_minsim = coldstart->add_option("--min-sim", ca.min_sim, "minimum matched numbers");
    auto* cs_k = coldstart->add_option("--sample-k", ca.sample_k, "max partners per path");
    auto* cs_only = coldstart->add_flag("--only-cold", ca.only_cold, "process only cold end nodes");
    auto* cs_c = coldstart->add_option("--cold-c", ca.cold_c, "cold threshold C for --only-cold");
    auto* cs_legacy = coldstart->add_flag("--legacy-threshold", ca.legacy_threshold,
                                          "keep candidates with similarity < threshold");
    auto* cs_strict = coldstart->add_flag("--strict", ca.strict, "absent query strings are an error");
    auto* cs_rels = coldstart->add_option("--rels", ca.rels, "relations counted in degrees");
    auto* cs_max = coldstart->add_option("--max-value", ca.max_value, "truncation ceiling");
    auto* cs_digits = coldstart->add_option("--digits", ca.digits, "characters per number");
    auto* cs_topk = coldstart->add_option("--top-k", ca.top_k, "retained degree-count pairs");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "seed selection and diffusion reports");
    simulate->add_option("--graph", sim.graph, "graph base path")->required();
    simulate->add_option("--augment", sim.augment, "augmentation edge CSV to merge");
    simulate->add_flag("--use-cold-edges", sim.use_cold_edges, "let cold edges carry diffusion");
    auto* sim_strategy = simulate->add_option("--strategy", sim.strategy,
                                              "random | degree | ipp-frequency | file");
    simulate->add_option("--seeds-file", sim.seeds_file, "seed node keys, one per line (file strategy)");
    simulate->add_option("--labels", sim.labels, "labels.json for ipp-frequency");
    auto* sim_k = simulate->add_option("-K,--num-seeds", sim.k, "seed count");
    auto* sim_tend = simulate->add_option("--t-end", sim.t_end, "last timestamp (-1 = all)");
    auto* sim_hops = simulate->add_option("--max-hops", sim.max_hops, "hop cap for the spread report");
    auto* sim_mode = simulate->add_option("--mode", sim.mode, "reach | union");
    simulate->add_flag("--ic", sim.ic, "add a seeded independent-cascade study");
    auto* sim_icp = simulate->add_option("--ic-p", sim.ic_p, "cascade edge probability");
    auto* sim_ict = simulate->add_option("--ic-trials", sim.ic_trials, "cascade trials");
    simulate->add_option("--out", sim.out, "report output (JSON)");

    StatsArgs sta;
    auto* stats = app.add_subcommand("stats", "per-timestamp graph statistics");
    stats->add_option("--graph", sta.graph, "graph base path")->required();
    auto* st_c = stats->add_option("--cold-c", sta.cold_c, "cold threshold C");
    auto* st_rels = stats->add_option("--rels", sta.rels, "relations for the ratio statistic");
    stats->add_option("--out", sta.out, "stats output (JSON)");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "loop vs batched aggregation timings");
    auto* be_events = bench->add_option("--events", ba.events, "synthetic feed size");
    auto* be_dim = bench->add_option("--dim", ba.dim, "message dimension");
    auto* be_nodes = bench->add_option("--nodes", ba.nodes, "node universe");
    auto* be_batches = bench->add_option("--batches", ba.batches, "batch sizes")->delimiter(',');
    auto* be_runs = bench->add_option("--runs", ba.runs, "timed runs per configuration");
    auto* be_rule = bench->add_option("--rule", ba.rule, "replace | ema | gru");
    auto* be_mode = bench->add_option("--mode", ba.mode, "lm | mm");
    auto* be_alpha = bench->add_option("--alpha", ba.alpha, "ema coefficient");
    bench->add_option("--feed", ba.feed, "benchmark this feed CSV instead of synthesizing");
    bench->add_option("--out", ba.out, "report output (JSON)");

    PlotArgs pa;
    auto* plot = app.add_subcommand("plot", "render curves from a simulate report");
    plot->add_option("--report", pa.report, "spread report JSON")->required();
    plot->add_option("--what", pa.what, "hops | time");
    plot->add_option("--format", pa.format, "svg | csv");
    plot->add_option("--out", pa.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kUsage << "}\n";
        return kUsage;
    }

    try {
        if (!g.config_path.empty()) {
            auto in = open_input(g.config_path);
            g.config = json::parse(in);
        }
        cfg_override(seed_opt, g.seed, g.config, "seed");
        cfg_override(threads_opt, g.threads, g.config, "threads");
        cfg_override(outdir_opt, g.out_dir, g.config, "out_dir");
        if (g.threads == 0) g.threads = 1;

        const json ser_cfg = section(g.config, "serialization");
        const json ret_cfg = section(g.config, "retrieval");
        const json dif_cfg = section(g.config, "diffusion");
        const json ben_cfg = section(g.config, "bench");
        const json ing_cfg = section(g.config, "ingest");
        const json min_cfg = section(g.config, "mine");

        if (app.got_subcommand(ingest)) {
            cfg_override(bucket_opt, ia.bucket, ing_cfg, "bucket");
            cfg_override(quant_opt, ia.quantile, ing_cfg, "strong_quantile");
            return cmd_ingest(g, ia);
        }
        if (app.got_subcommand(mine)) {
            cfg_override(mine_rels, ma.rels, min_cfg, "rels");
            return cmd_mine(g, ma);
        }
        if (app.got_subcommand(serialize)) {
            cfg_override(ser_rels, sa.rels, ser_cfg, "rels");
            cfg_override(ser_max, sa.max_value, ser_cfg, "max_value");
            cfg_override(ser_digits, sa.digits, ser_cfg, "digits");
            cfg_override(ser_topk, sa.top_k, ser_cfg, "top_k");
            return cmd_serialize(g, sa);
        }
        if (app.got_subcommand(coldstart)) {
            cfg_override(cs_rels, ca.rels, ser_cfg, "rels");
            cfg_override(cs_max, ca.max_value, ser_cfg, "max_value");
            cfg_override(cs_digits, ca.digits, ser_cfg, "digits");
            cfg_override(cs_topk, ca.top_k, ser_cfg, "top_k");
            cfg_override(cs_window, ca.window, ret_cfg, "window");
            cfg_override(cs_minsim, ca.min_sim, ret_cfg, "min_sim");
            cfg_override(cs_k, ca.sample_k, ret_cfg, "sample_k");
            cfg_override(cs_only, ca.only_cold, ret_cfg, "only_cold");
            cfg_override(cs_c, ca.cold_c, ret_cfg, "cold_c");
            cfg_override(cs_legacy, ca.legacy_threshold, ret_cfg, "legacy_threshold");
            cfg_override(cs_strict, ca.strict, ret_cfg, "strict");
            return cmd_coldstart(g, ca);
        }
        if (app.got_subcommand(simulate)) {
            cfg_override(sim_strategy, sim.strategy, dif_cfg, "strategy");
            cfg_override(sim_k, sim.k, dif_cfg, "k");
            cfg_override(sim_tend, sim.t_end, dif_cfg, "t_end");
            cfg_override(sim_hops, sim.max_hops, dif_cfg, "max_hops");
            cfg_override(sim_mode, sim.mode, dif_cfg, "mode");
            cfg_override(sim_icp, sim.ic_p, dif_cfg, "ic_p");
            cfg_override(sim_ict, sim.ic_trials, dif_cfg, "ic_trials");
            return cmd_simulate(g, sim);
        }
        if (app.got_subcommand(stats)) {
            cfg_override(st_c, sta.cold_c, ret_cfg, "cold_c");
            cfg_override(st_rels, sta.rels, min_cfg, "rels");
            return cmd_stats(g, sta);
        }
        if (app.got_subcommand(bench)) {
            cfg_override(be_events, ba.events, ben_cfg, "events");
            cfg_override(be_dim, ba.dim, ben_cfg, "dim");
            cfg_override(be_nodes, ba.nodes, ben_cfg, "nodes");
            cfg_override(be_batches, ba.batches, ben_cfg, "batches");
            cfg_override(be_runs, ba.runs, ben_cfg, "runs");
            cfg_override(be_rule, ba.rule, ben_cfg, "rule");
            cfg_override(be_mode, ba.mode, ben_cfg, "mode");
            cfg_override(be_alpha, ba.alpha, ben_cfg, "alpha");
            return cmd_bench(g, ba);
        }
        if (app.got_subcommand(plot)) return cmd_plot(g, pa);
        std::cerr << "{\"error\":\"no subcommand\",\"code\":" << kUsage << "}\n";
        return kUsage;
    } catch (const tim::ParseError& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kDataError << "}\n";
        return kDataError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kMissingInput << "}\n";
        return kMissingInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kSchemaError << "}\n";
        return kSchemaError;
    } catch (const std::out_of_range& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kSchemaError << "}\n";
        return kSchemaError;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":" << json(e.what()).dump() << ",\"code\":" << kInternal << "}\n";
        return kInternal;
    }
}
