#pragma once

// Temporal multi-relational graph: timestamped undirected edges carrying a
// relation kind, plus the query layer the rest of the pipeline reads.
//
// Node ids are dense and assigned strong-first: nodes are numbered in
// ascending order of their first appearance in a strong edge (by timestamp,
// then input order); nodes that never touch a strong edge get ids above all
// strong ids. That makes "is v known to the strong graph through t" a single
// integer comparison against a per-timestamp high-water id.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tim/core.hpp"

namespace tim {

struct TemporalEdge {
    NodeId src = 0;
    NodeId dst = 0;
    Timestamp t = 0;
    Relation rel = Relation::weak;

    friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

// Canonical edge order: (t, src, dst, rel).
inline bool edge_less(const TemporalEdge& a, const TemporalEdge& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.src != b.src) return a.src < b.src;
    if (a.dst != b.dst) return a.dst < b.dst;
    return static_cast<int>(a.rel) < static_cast<int>(b.rel);
}

class TemporalMultiGraph {
public:
    TemporalMultiGraph() = default;

    // Builds from a node registry (id -> raw key) and an edge list. Edges are
    // normalized to src < dst, deduplicated per (src, dst, t, rel) and sorted
    // canonically. Throws std::invalid_argument on self-loops or ids outside
    // the registry.
    TemporalMultiGraph(std::vector<std::string> node_keys, std::vector<TemporalEdge> edges)
        : node_keys_(std::move(node_keys)) {
        for (auto& e : edges) {
            if (e.src == e.dst) throw std::invalid_argument("self-loop edge");
            if (e.src >= node_keys_.size() || e.dst >= node_keys_.size())
                throw std::invalid_argument("edge endpoint outside node registry");
            if (e.src > e.dst) std::swap(e.src, e.dst);
        }
        std::sort(edges.begin(), edges.end(), edge_less);
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        for (std::size_t i = 0; i < node_keys_.size(); ++i) key_to_id_.emplace(node_keys_[i], static_cast<NodeId>(i));
        build_index();
    }

    Timestamp num_timestamps() const { return num_timestamps_; }
    std::size_t num_nodes() const { return node_keys_.size(); }
    std::size_t num_edges() const { return edges_.size(); }

    std::size_t num_edges(Relation r) const {
        std::size_t n = 0;
        for (const auto& e : edges_)
            if (e.rel == r) ++n;
        return n;
    }

    // Canonically sorted, deduplicated edge list.
    const std::vector<TemporalEdge>& edges() const { return edges_; }

    const std::vector<std::string>& node_keys() const { return node_keys_; }

    std::optional<NodeId> find_node(std::string_view raw) const {
        auto it = key_to_id_.find(std::string(raw));
        if (it == key_to_id_.end()) return std::nullopt;
        return it->second;
    }

    // Visits each distinct neighbor of v at t whose incident relations
    // intersect the mask, in ascending neighbor order.
    template <class F>
    void for_each_neighbor(NodeId v, Timestamp t, RelationMask mask, F&& f) const {
        check_node(v);
        check_time(t);
        auto [begin, end] = slice(v, t);
        for (std::size_t i = begin; i < end; ++i)
            if (adj_entries_[t][i].rel_bits & mask.bits) f(adj_entries_[t][i].nbr);
    }

    std::vector<NodeId> neighbors(NodeId v, Timestamp t, RelationMask mask = RelationMask::weak_strong()) const {
        std::vector<NodeId> out;
        for_each_neighbor(v, t, mask, [&](NodeId u) { out.push_back(u); });
        return out;
    }

    std::size_t degree(NodeId v, Timestamp t, RelationMask mask = RelationMask::weak_strong()) const {
        std::size_t n = 0;
        for_each_neighbor(v, t, mask, [&](NodeId) { ++n; });
        return n;
    }

    bool has_edge(NodeId u, NodeId v, Timestamp t, RelationMask mask = RelationMask::all()) const {
        check_node(u);
        check_node(v);
        check_time(t);
        auto [begin, end] = slice(u, t);
        for (std::size_t i = begin; i < end; ++i)
            if (adj_entries_[t][i].nbr == v && (adj_entries_[t][i].rel_bits & mask.bits)) return true;
        return false;
    }

    // True iff v belongs to the cumulative strong node set through t,
    // implemented as the id comparison against the per-timestamp high-water id.
    bool strong_membership(NodeId v, Timestamp t) const {
        check_node(v);
        check_time(t);
        return static_cast<std::int64_t>(v) <= max_strong_id_[t];
    }

    // Highest node id that is strong-known through t; -1 when no strong node
    // has appeared yet.
    std::int64_t max_strong_id(Timestamp t) const {
        check_time(t);
        return max_strong_id_[t];
    }

    // Nodes present at t (incident to at least one edge matching the mask).
    std::vector<NodeId> nodes_at(Timestamp t, RelationMask mask = RelationMask::all()) const {
        check_time(t);
        std::vector<NodeId> out;
        for (const auto& row : adj_index_[t]) {
            auto [begin, end] = row_slice(t, row);
            for (std::size_t i = begin; i < end; ++i) {
                if (adj_entries_[t][i].rel_bits & mask.bits) {
                    out.push_back(row.node);
                    break;
                }
            }
        }
        return out;
    }

    // Per-timestamp strong node set V^s_t.
    std::vector<NodeId> strong_nodes_at(Timestamp t) const { return nodes_at(t, RelationMask::strong_only()); }

    // Strong-graph nodes at t with strong degree <= max_neighbors.
    std::vector<NodeId> cold_start_nodes(Timestamp t, std::size_t max_neighbors) const {
        std::vector<NodeId> out;
        for (NodeId v : strong_nodes_at(t))
            if (degree(v, t, RelationMask::strong_only()) <= max_neighbors) out.push_back(v);
        return out;
    }

    // Count of distinct nodes observed through t under the mask.
    std::size_t observed_through(Timestamp t, RelationMask mask = RelationMask::all()) const {
        check_time(t);
        std::vector<char> seen(num_nodes(), 0);
        std::size_t n = 0;
        for (const auto& e : edges_) {
            if (e.t > t) break;
            if (!mask.contains(e.rel)) continue;
            if (!seen[e.src]) { seen[e.src] = 1; ++n; }
            if (!seen[e.dst]) { seen[e.dst] = 1; ++n; }
        }
        return n;
    }

    // Returns a new graph with the augmentation edges added; this graph is
    // unchanged. Every edge must have rel == cold and endpoints already in
    // the registry; node ids and strong high-water marks are preserved.
    TemporalMultiGraph augment(std::span<const TemporalEdge> additions) const {
        std::string bad;
        for (const auto& e : additions) {
            const bool endpoint_ok = e.src < num_nodes() && e.dst < num_nodes() && e.src != e.dst;
            const bool time_ok = e.t < num_timestamps_;
            if (e.rel != Relation::cold || !endpoint_ok || !time_ok) {
                bad += " (" + std::to_string(e.src) + "," + std::to_string(e.dst) + "," +
                       std::to_string(e.t) + "," + std::to_string(relation_code(e.rel)) + ")";
            }
        }
        if (!bad.empty()) throw std::invalid_argument("invalid augmentation edges:" + bad);
        std::vector<TemporalEdge> merged = edges_;
        for (auto e : additions) {
            if (e.src > e.dst) std::swap(e.src, e.dst);
            merged.push_back(e);
        }
        return TemporalMultiGraph(node_keys_, std::move(merged));
    }

    bool structurally_equal(const TemporalMultiGraph& other) const {
        return node_keys_ == other.node_keys_ && edges_ == other.edges_;
    }

private:
    struct AdjEntry {
        NodeId nbr;
        std::uint8_t rel_bits;
    };
    struct AdjRow {
        NodeId node;
        std::uint32_t offset; // into adj_entries_[t]
    };

    void check_time(Timestamp t) const {
        if (t >= num_timestamps_) throw std::out_of_range("timestamp " + std::to_string(t) + " out of range [0, " + std::to_string(num_timestamps_) + ")");
    }
    void check_node(NodeId v) const {
        if (v >= num_nodes()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
    }

    std::pair<std::size_t, std::size_t> row_slice(Timestamp t, const AdjRow& row) const {
        const auto& index = adj_index_[t];
        const std::size_t row_pos = static_cast<std::size_t>(&row - index.data());
        const std::size_t end = row_pos + 1 < index.size() ? index[row_pos + 1].offset : adj_entries_[t].size();
        return {row.offset, end};
    }

    std::pair<std::size_t, std::size_t> slice(NodeId v, Timestamp t) const {
        const auto& index = adj_index_[t];
        auto it = std::lower_bound(index.begin(), index.end(), v,
                                   [](const AdjRow& r, NodeId x) { return r.node < x; });
        if (it == index.end() || it->node != v) return {0, 0};
        return row_slice(t, *it);
    }

    void build_index() {
        num_timestamps_ = edges_.empty() ? 0 : edges_.back().t + 1;
        adj_index_.assign(num_timestamps_, {});
        adj_entries_.assign(num_timestamps_, {});

        // Half-edges grouped per timestamp; parallel relations on the same
        // (node, nbr) collapse into one entry with OR'd relation bits.
        std::vector<std::vector<std::pair<NodeId, AdjEntry>>> half(num_timestamps_);
        for (const auto& e : edges_) {
            half[e.t].push_back({e.src, {e.dst, static_cast<std::uint8_t>(1u << static_cast<int>(e.rel))}});
            half[e.t].push_back({e.dst, {e.src, static_cast<std::uint8_t>(1u << static_cast<int>(e.rel))}});
        }
        for (Timestamp t = 0; t < num_timestamps_; ++t) {
            auto& h = half[t];
            std::sort(h.begin(), h.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first < b.first : a.second.nbr < b.second.nbr;
            });
            auto& entries = adj_entries_[t];
            auto& index = adj_index_[t];
            for (const auto& [node, entry] : h) {
                if (!entries.empty() && !index.empty() && index.back().node == node &&
                    entries.back().nbr == entry.nbr) {
                    entries.back().rel_bits |= entry.rel_bits;
                    continue;
                }
                if (index.empty() || index.back().node != node)
                    index.push_back({node, static_cast<std::uint32_t>(entries.size())});
                entries.push_back(entry);
            }
        }

        // First strong appearance per node, then the per-timestamp high-water id.
        constexpr Timestamp kNever = std::numeric_limits<Timestamp>::max();
        std::vector<Timestamp> first_strong(num_nodes(), kNever);
        for (const auto& e : edges_) {
            if (e.rel != Relation::strong) continue;
            first_strong[e.src] = std::min(first_strong[e.src], e.t);
            first_strong[e.dst] = std::min(first_strong[e.dst], e.t);
        }
        // Ids must be in strong-first order or the high-water comparison in
        // strong_membership would not equal cumulative set membership.
        for (NodeId v = 1; v < num_nodes(); ++v)
            if (first_strong[v - 1] > first_strong[v])
                throw std::invalid_argument("node ids are not in strong-first appearance order");
        max_strong_id_.assign(num_timestamps_, -1);
        for (NodeId v = 0; v < num_nodes(); ++v)
            if (first_strong[v] != kNever) max_strong_id_[first_strong[v]] = static_cast<std::int64_t>(v);
        for (Timestamp t = 1; t < num_timestamps_; ++t)
            max_strong_id_[t] = std::max(max_strong_id_[t], max_strong_id_[t - 1]);
    }

    std::vector<std::string> node_keys_;
    std::unordered_map<std::string, NodeId> key_to_id_;
    std::vector<TemporalEdge> edges_;
    Timestamp num_timestamps_ = 0;
    std::vector<std::vector<AdjRow>> adj_index_;    // per t, sorted by node
    std::vector<std::vector<AdjEntry>> adj_entries_; // per t, rows concatenated
    std::vector<std::int64_t> max_strong_id_;
};

// ---------------------------------------------------------------------------
// Ingestion

struct IngestOptions {
    bool expect_header = false;
    // When > 0, the timestamp column holds raw epochs and is bucketed into
    // periods of this width, anchored at the smallest accepted epoch.
    std::uint64_t bucket_width = 0;
};

struct IngestStats {
    std::size_t lines_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t edges = 0;
    std::size_t duplicates_dropped = 0;
    std::size_t self_loops_rejected = 0;
    std::vector<std::size_t> self_loop_lines;
};

struct IngestResult {
    TemporalMultiGraph graph;
    IngestStats stats;
};

namespace detail {

struct RawRow {
    std::string a, b;
    std::uint64_t t_raw;
    Relation rel;
    std::size_t line;
};

inline std::uint64_t parse_u64_field(const std::string& field, std::size_t line, const char* what) {
    if (field.empty()) throw ParseError(line, std::string("empty ") + what + " field");
    std::uint64_t value = 0;
    for (char c : field) {
        if (c < '0' || c > '9') throw ParseError(line, std::string("bad ") + what + " '" + field + "'");
        const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
        if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
            throw ParseError(line, std::string(what) + " overflows");
        value = value * 10 + digit;
    }
    return value;
}

inline std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

// Assigns dense ids: strong nodes first in (timestamp, input order) of their
// first strong row, then everything else in input order.
inline std::vector<std::string> assign_ids(const std::vector<RawRow>& rows,
                                           const std::vector<Timestamp>& row_time,
                                           std::unordered_map<std::string, NodeId>& id_of) {
    std::vector<std::string> keys;
    auto assign = [&](const std::string& k) {
        if (id_of.emplace(k, static_cast<NodeId>(keys.size())).second) keys.push_back(k);
    };

    std::vector<std::size_t> strong_rows;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].rel == Relation::strong) strong_rows.push_back(i);
    std::stable_sort(strong_rows.begin(), strong_rows.end(),
                     [&](std::size_t x, std::size_t y) { return row_time[x] < row_time[y]; });
    for (std::size_t i : strong_rows) {
        assign(rows[i].a);
        assign(rows[i].b);
    }
    for (const auto& row : rows) {
        assign(row.a);
        assign(row.b);
    }
    return keys;
}

} // namespace detail

// Parses `src,dst,timestamp,relation` lines. Comment lines starting with '#'
// and blank lines are ignored. Self-loops are skipped and reported in the
// stats; malformed fields and unknown relation codes throw ParseError.
inline IngestResult ingest_edges(std::istream& in, const IngestOptions& opts = {}) {
    std::vector<detail::RawRow> rows;
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
        if (fields.size() != 4) throw ParseError(line_no, "expected 4 comma-separated fields, got " + std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty()) throw ParseError(line_no, "empty node key");

        const std::uint64_t t_raw = detail::parse_u64_field(fields[2], line_no, "timestamp");
        const std::uint64_t rel_raw = detail::parse_u64_field(fields[3], line_no, "relation");
        if (rel_raw > 2) throw ParseError(line_no, "unknown relation code: " + fields[3]);

        if (fields[0] == fields[1]) {
            ++stats.self_loops_rejected;
            stats.self_loop_lines.push_back(line_no);
            continue;
        }
        rows.push_back({std::move(fields[0]), std::move(fields[1]), t_raw,
                        relation_from_code(static_cast<int>(rel_raw)), line_no});
    }
    stats.rows_accepted = rows.size();

    // Bucket raw epochs into periods if requested.
    std::vector<Timestamp> row_time(rows.size());
    std::uint64_t origin = 0;
    if (opts.bucket_width > 0 && !rows.empty()) {
        origin = rows.front().t_raw;
        for (const auto& r : rows) origin = std::min(origin, r.t_raw);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::uint64_t t = opts.bucket_width > 0 ? (rows[i].t_raw - origin) / opts.bucket_width : rows[i].t_raw;
        if (t > std::numeric_limits<Timestamp>::max())
            throw ParseError(rows[i].line, "timestamp too large; missing bucketing?");
        row_time[i] = static_cast<Timestamp>(t);
    }

    std::unordered_map<std::string, NodeId> id_of;
    std::vector<std::string> keys = detail::assign_ids(rows, row_time, id_of);

    std::vector<TemporalEdge> edges;
    edges.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        NodeId u = id_of[rows[i].a];
        NodeId v = id_of[rows[i].b];
        if (u > v) std::swap(u, v);
        edges.push_back({u, v, row_time[i], rows[i].rel});
    }
    const std::size_t before = edges.size();
    TemporalMultiGraph graph(std::move(keys), std::move(edges));
    stats.edges = graph.num_edges();
    stats.duplicates_dropped = before - stats.edges;
    return {std::move(graph), std::move(stats)};
}

inline IngestResult ingest_edges(const std::string& text, const IngestOptions& opts = {}) {
    std::istringstream in(text);
    return ingest_edges(in, opts);
}

} // namespace tim
