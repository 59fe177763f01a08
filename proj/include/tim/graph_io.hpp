#pragma once

// Graph persistence (binary edge container + JSON sidecar + id map) and the
// weighted-edge reader that derives strong/weak relations from a quantile
// threshold on accumulated pair weights.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tim/core.hpp"
#include "tim/temporal_graph.hpp"

namespace tim {

namespace detail {

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline void put_u64le(std::string& out, std::uint64_t v) {
    put_u32le(out, static_cast<std::uint32_t>(v & 0xffffffffu));
    put_u32le(out, static_cast<std::uint32_t>(v >> 32));
}

inline std::uint32_t get_u32le(const std::string& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw std::runtime_error("truncated binary graph file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]);
    pos += 4;
    return v;
}

inline std::uint64_t get_u64le(const std::string& in, std::size_t& pos) {
    const std::uint64_t lo = get_u32le(in, pos);
    const std::uint64_t hi = get_u32le(in, pos);
    return lo | (hi << 32);
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace detail

inline constexpr std::uint32_t kGraphBinaryVersion = 1;

// Writes <base>.json (sidecar), <base>.edges.bin and <base>.ids.json.
// The encoding is canonical, so save(load(x)) is byte-identical to x.
inline void save_graph(const TemporalMultiGraph& g, const std::filesystem::path& base) {
    std::string bin;
    bin += "TIMG";
    detail::put_u32le(bin, kGraphBinaryVersion);
    detail::put_u32le(bin, g.num_timestamps());
    detail::put_u64le(bin, g.num_nodes());
    detail::put_u64le(bin, g.num_edges());
    for (const auto& e : g.edges()) {
        detail::put_u32le(bin, e.src);
        detail::put_u32le(bin, e.dst);
        detail::put_u32le(bin, e.t);
        bin.push_back(static_cast<char>(relation_code(e.rel)));
    }
    detail::write_file_bytes(base.string() + ".edges.bin", bin);

    nlohmann::json ids = nlohmann::json::array();
    for (const auto& key : g.node_keys()) ids.push_back(key);
    detail::write_file_bytes(base.string() + ".ids.json", ids.dump() + "\n");

    nlohmann::json side;
    side["T"] = g.num_timestamps();
    side["node_count"] = g.num_nodes();
    side["edges_path"] = base.filename().string() + ".edges.bin";
    side["id_map_path"] = base.filename().string() + ".ids.json";
    nlohmann::json hw = nlohmann::json::array();
    for (Timestamp t = 0; t < g.num_timestamps(); ++t) hw.push_back(g.max_strong_id(t));
    side["max_strong_id"] = hw;
    detail::write_file_bytes(base.string() + ".json", side.dump() + "\n");
}

inline TemporalMultiGraph load_graph(const std::filesystem::path& base) {
    const auto side = nlohmann::json::parse(detail::read_file_bytes(base.string() + ".json"));
    const auto dir = base.parent_path();

    const auto ids = nlohmann::json::parse(detail::read_file_bytes(dir / side.at("id_map_path").get<std::string>()));
    std::vector<std::string> keys;
    keys.reserve(ids.size());
    for (const auto& k : ids) keys.push_back(k.get<std::string>());

    const std::string bin = detail::read_file_bytes(dir / side.at("edges_path").get<std::string>());
    std::size_t pos = 0;
    if (bin.size() < 4 || bin.compare(0, 4, "TIMG") != 0) throw std::runtime_error("bad graph magic");
    pos = 4;
    if (detail::get_u32le(bin, pos) != kGraphBinaryVersion) throw std::runtime_error("unsupported graph version");
    const Timestamp t_count = detail::get_u32le(bin, pos);
    const std::uint64_t node_count = detail::get_u64le(bin, pos);
    const std::uint64_t edge_count = detail::get_u64le(bin, pos);
    if (node_count != keys.size()) throw std::runtime_error("id map size does not match graph header");

    std::vector<TemporalEdge> edges;
    edges.reserve(edge_count);
    for (std::uint64_t i = 0; i < edge_count; ++i) {
        TemporalEdge e;
        e.src = detail::get_u32le(bin, pos);
        e.dst = detail::get_u32le(bin, pos);
        e.t = detail::get_u32le(bin, pos);
        if (pos >= bin.size()) throw std::runtime_error("truncated binary graph file");
        e.rel = relation_from_code(static_cast<int>(static_cast<unsigned char>(bin[pos++])));
        edges.push_back(e);
    }

    TemporalMultiGraph g(std::move(keys), std::move(edges));
    if (g.num_timestamps() != t_count && !(g.num_edges() == 0 && t_count == 0))
        throw std::runtime_error("sidecar T does not match edge data");
    const auto& hw = side.at("max_strong_id");
    if (hw.size() != g.num_timestamps()) throw std::runtime_error("sidecar max_strong_id length mismatch");
    for (Timestamp t = 0; t < g.num_timestamps(); ++t)
        if (hw[t].get<std::int64_t>() != g.max_strong_id(t))
            throw std::runtime_error("sidecar max_strong_id disagrees with edge data");
    return g;
}

// ---------------------------------------------------------------------------
// Weighted edge lists (src,dst,weight,epoch). Relations are not given in the
// data; a pair is strong when its accumulated weight exceeds the empirical
// quantile of accumulated pair weights, weak otherwise.

struct WeightedIngestOptions {
    bool expect_header = false;
    std::uint64_t bucket_width = 60ull * 86400ull; // epoch units per period
    double strong_quantile = 0.3;
};

inline IngestResult ingest_weighted_edges(std::istream& in, const WeightedIngestOptions& opts) {
    struct WRow {
        std::string a, b;
        double weight;
        std::uint64_t epoch;
        std::size_t line;
    };
    std::vector<WRow> rows;
    IngestStats stats;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = opts.expect_header;

    while (std::getline(in, line)) {
        ++line_no;
        ++stats.lines_read;
        if (line.empty() || line[0] == '#') continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw ParseError(line_no, "expected src,dst,weight,epoch");
        if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node key");
        double weight = 0, epoch = 0;
        try {
            weight = std::stod(fields[2]);
            epoch = std::stod(fields[3]);
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad numeric field");
        }
        if (epoch < 0) throw ParseError(line_no, "negative epoch");
        if (fields[0] == fields[1]) {
            ++stats.self_loops_rejected;
            stats.self_loop_lines.push_back(line_no);
            continue;
        }
        rows.push_back({std::move(fields[0]), std::move(fields[1]), weight,
                        static_cast<std::uint64_t>(epoch), line_no});
    }
    stats.rows_accepted = rows.size();

    // Accumulated weight per undirected pair, then the quantile threshold.
    std::map<std::pair<std::string, std::string>, double> pair_weight;
    for (const auto& r : rows) {
        auto key = r.a < r.b ? std::make_pair(r.a, r.b) : std::make_pair(r.b, r.a);
        pair_weight[key] += r.weight;
    }
    std::vector<double> weights;
    weights.reserve(pair_weight.size());
    for (const auto& [k, w] : pair_weight) weights.push_back(w);
    std::sort(weights.begin(), weights.end());
    double threshold = 0;
    if (!weights.empty()) {
        const double q = std::clamp(opts.strong_quantile, 0.0, 1.0);
        const std::size_t idx = static_cast<std::size_t>(q * static_cast<double>(weights.size() - 1));
        threshold = weights[idx];
    }

    std::uint64_t origin = 0;
    if (!rows.empty()) {
        origin = rows.front().epoch;
        for (const auto& r : rows) origin = std::min(origin, r.epoch);
    }
    std::vector<detail::RawRow> raw;
    std::vector<Timestamp> row_time;
    raw.reserve(rows.size());
    row_time.reserve(rows.size());
    for (const auto& r : rows) {
        auto key = r.a < r.b ? std::make_pair(r.a, r.b) : std::make_pair(r.b, r.a);
        const Relation rel = pair_weight[key] > threshold ? Relation::strong : Relation::weak;
        raw.push_back({r.a, r.b, r.epoch, rel, r.line});
        const std::uint64_t width = opts.bucket_width > 0 ? opts.bucket_width : 1;
        const std::uint64_t t = (r.epoch - origin) / width;
        if (t > std::numeric_limits<Timestamp>::max())
            throw ParseError(r.line, "timestamp too large; increase the bucket width");
        row_time.push_back(static_cast<Timestamp>(t));
    }

    std::unordered_map<std::string, NodeId> id_of;
    std::vector<std::string> keys = detail::assign_ids(raw, row_time, id_of);
    std::vector<TemporalEdge> edges;
    edges.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        NodeId u = id_of[raw[i].a];
        NodeId v = id_of[raw[i].b];
        if (u > v) std::swap(u, v);
        edges.push_back({u, v, row_time[i], raw[i].rel});
    }
    const std::size_t before = edges.size();
    TemporalMultiGraph graph(std::move(keys), std::move(edges));
    stats.edges = graph.num_edges();
    stats.duplicates_dropped = before - stats.edges;
    return {std::move(graph), std::move(stats)};
}

} // namespace tim
