#pragma once

// Influence propagation paths: 2-hop temporal wedges (v0 -e@t0- v1 -e@t1- v2)
// whose initiator is already strong-known at t0 while v1 and v2 are not.
// Mining is wedge enumeration around each middle node followed by a single
// condition evaluation per candidate; brute_force_ipps is the independent
// route used to cross-check it.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "tim/core.hpp"
#include "tim/temporal_graph.hpp"

namespace tim {

struct Ipp {
    NodeId v0 = 0, v1 = 0, v2 = 0;
    Timestamp t0 = 0, t1 = 0;

    friend bool operator==(const Ipp&, const Ipp&) = default;
};

// Canonical order: (t0, t1, v0, v1, v2).
inline bool ipp_less(const Ipp& a, const Ipp& b) {
    if (a.t0 != b.t0) return a.t0 < b.t0;
    if (a.t1 != b.t1) return a.t1 < b.t1;
    if (a.v0 != b.v0) return a.v0 < b.v0;
    if (a.v1 != b.v1) return a.v1 < b.v1;
    return a.v2 < b.v2;
}

inline void sort_canonical(std::vector<Ipp>& ipps) {
    std::sort(ipps.begin(), ipps.end(), ipp_less);
    ipps.erase(std::unique(ipps.begin(), ipps.end()), ipps.end());
}

struct MotifStats {
    std::size_t candidates = 0;
    std::size_t conditions_evaluated = 0;
};

namespace detail {

// Timestamps at which each node has at least one incident edge under the mask.
inline std::vector<std::vector<Timestamp>> active_timestamps(const TemporalMultiGraph& g, RelationMask mask) {
    std::vector<std::vector<Timestamp>> active(g.num_nodes());
    for (const auto& e : g.edges()) {
        if (!mask.contains(e.rel)) continue;
        for (NodeId v : {e.src, e.dst}) {
            auto& ts = active[v];
            if (ts.empty() || ts.back() != e.t) ts.push_back(e.t);
        }
    }
    return active;
}

// All ordered wedges centered on middle nodes in [first, last).
template <class F>
void enumerate_wedges_for_range(const TemporalMultiGraph& g, RelationMask mask,
                                const std::vector<std::vector<Timestamp>>& active,
                                NodeId first, NodeId last, F&& emit) {
    std::vector<std::pair<Timestamp, std::vector<NodeId>>> nbrs;
    for (NodeId mid = first; mid < last; ++mid) {
        const auto& ts = active[mid];
        if (ts.empty()) continue;
        nbrs.clear();
        for (Timestamp t : ts) nbrs.push_back({t, g.neighbors(mid, t, mask)});
        for (const auto& [t0, from] : nbrs) {
            for (const auto& [t1, to] : nbrs) {
                for (NodeId a : from)
                    for (NodeId b : to)
                        if (a != b) emit(Ipp{a, mid, b, t0, t1});
            }
        }
    }
}

} // namespace detail

// Emits every ordered pair of incident edges sharing middle node v1 with
// v0 != v2, exactly once per (v0, v1, v2, t0, t1) tuple. No filtering.
template <class F>
void enumerate_two_hop_motifs(const TemporalMultiGraph& g, RelationMask mask, F&& emit) {
    const auto active = detail::active_timestamps(g, mask);
    detail::enumerate_wedges_for_range(g, mask, active, 0, static_cast<NodeId>(g.num_nodes()), emit);
}

inline std::vector<Ipp> enumerate_two_hop_motifs(const TemporalMultiGraph& g,
                                                 RelationMask mask = RelationMask::weak_strong()) {
    std::vector<Ipp> out;
    enumerate_two_hop_motifs(g, mask, [&](const Ipp& c) { out.push_back(c); });
    return out;
}

namespace detail {

// The single condition evaluation applied to each candidate.
inline bool ipp_conditions_hold(const TemporalMultiGraph& g, const Ipp& c) {
    return c.t0 <= c.t1 && g.strong_membership(c.v0, c.t0) && !g.strong_membership(c.v1, c.t0) &&
           !g.strong_membership(c.v2, c.t0);
}

} // namespace detail

// Keeps exactly the candidates satisfying the edge and node conditions;
// output deduplicated and canonically sorted.
inline std::vector<Ipp> filter_ipps(const TemporalMultiGraph& g, std::span<const Ipp> candidates,
                                    MotifStats* stats = nullptr) {
    std::vector<Ipp> out;
    std::size_t evaluated = 0;
    for (const auto& c : candidates) {
        ++evaluated;
        if (detail::ipp_conditions_hold(g, c)) out.push_back(c);
    }
    if (stats) {
        stats->candidates += candidates.size();
        stats->conditions_evaluated += evaluated;
    }
    sort_canonical(out);
    return out;
}

// Full validity check for one path, usable independently of the miner.
inline bool is_valid_ipp(const TemporalMultiGraph& g, const Ipp& p,
                         RelationMask mask = RelationMask::weak_strong()) {
    if (p.v0 == p.v1 || p.v1 == p.v2 || p.v0 == p.v2) return false;
    if (p.v0 >= g.num_nodes() || p.v1 >= g.num_nodes() || p.v2 >= g.num_nodes()) return false;
    if (p.t0 >= g.num_timestamps() || p.t1 >= g.num_timestamps()) return false;
    if (!g.has_edge(p.v0, p.v1, p.t0, mask) || !g.has_edge(p.v1, p.v2, p.t1, mask)) return false;
    return detail::ipp_conditions_hold(g, p);
}

struct MineOptions {
    RelationMask rels = RelationMask::weak_strong();
    unsigned threads = 1;
};

// Wedge enumeration composed with the condition filter. Partitioned by middle
// node when threads > 1; the merged result is canonically sorted, so the
// thread count never changes the output.
inline std::vector<Ipp> mine_ipps(const TemporalMultiGraph& g, const MineOptions& opts = {},
                                  MotifStats* stats = nullptr) {
    const auto active = detail::active_timestamps(g, opts.rels);
    const NodeId n = static_cast<NodeId>(g.num_nodes());
    const unsigned threads = std::max(1u, opts.threads);

    std::vector<std::vector<Ipp>> partial(threads);
    std::vector<MotifStats> partial_stats(threads);

    auto work = [&](unsigned chunk) {
        const NodeId first = static_cast<NodeId>(static_cast<std::uint64_t>(n) * chunk / threads);
        const NodeId last = static_cast<NodeId>(static_cast<std::uint64_t>(n) * (chunk + 1) / threads);
        auto& out = partial[chunk];
        auto& st = partial_stats[chunk];
        detail::enumerate_wedges_for_range(g, opts.rels, active, first, last, [&](const Ipp& c) {
            ++st.candidates;
            ++st.conditions_evaluated;
            if (detail::ipp_conditions_hold(g, c)) out.push_back(c);
        });
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned c = 0; c < threads; ++c) pool.emplace_back(work, c);
        for (auto& th : pool) th.join();
    }

    std::vector<Ipp> out;
    for (unsigned c = 0; c < threads; ++c) {
        out.insert(out.end(), partial[c].begin(), partial[c].end());
        if (stats) {
            stats->candidates += partial_stats[c].candidates;
            stats->conditions_evaluated += partial_stats[c].conditions_evaluated;
        }
    }
    sort_canonical(out);
    for (const auto& p : out)
        if (!is_valid_ipp(g, p, opts.rels)) throw std::logic_error("mined path failed re-validation");
    return out;
}

inline constexpr std::size_t kBruteForceEdgeGuard = 10'000;

// Independent verification route: triple nested scan over per-timestamp edge
// lists with an explicitly maintained cumulative strong node set. Refuses
// graphs above kBruteForceEdgeGuard edges.
inline std::vector<Ipp> brute_force_ipps(const TemporalMultiGraph& g,
                                         RelationMask mask = RelationMask::weak_strong()) {
    if (g.num_edges() > kBruteForceEdgeGuard)
        throw std::invalid_argument("brute_force_ipps: graph exceeds " +
                                    std::to_string(kBruteForceEdgeGuard) + " edges");

    const Timestamp t_count = g.num_timestamps();
    std::vector<std::vector<std::pair<NodeId, NodeId>>> by_time(t_count);
    std::vector<std::vector<std::pair<NodeId, NodeId>>> strong_by_time(t_count);
    for (const auto& e : g.edges()) {
        if (mask.contains(e.rel)) by_time[e.t].push_back({e.src, e.dst});
        if (e.rel == Relation::strong) strong_by_time[e.t].push_back({e.src, e.dst});
    }

    std::vector<Ipp> out;
    std::unordered_set<NodeId> strong_known;
    for (Timestamp t0 = 0; t0 < t_count; ++t0) {
        for (const auto& [x, y] : strong_by_time[t0]) {
            strong_known.insert(x);
            strong_known.insert(y);
        }
        for (const auto& [x, y] : by_time[t0]) {
            for (const auto& [v0, v1] : {std::pair{x, y}, std::pair{y, x}}) {
                if (!strong_known.count(v0) || strong_known.count(v1)) continue;
                for (Timestamp t1 = t0; t1 < t_count; ++t1) {
                    for (const auto& [p, q] : by_time[t1]) {
                        NodeId v2;
                        if (p == v1) v2 = q;
                        else if (q == v1) v2 = p;
                        else continue;
                        if (v2 == v0 || strong_known.count(v2)) continue;
                        out.push_back({v0, v1, v2, t0, t1});
                    }
                }
            }
        }
    }
    sort_canonical(out);
    return out;
}

// ---------------------------------------------------------------------------
// Labels

struct LabelSet {
    std::map<NodeId, std::uint32_t> counts; // v0 -> number of paths it initiates

    std::vector<NodeId> members() const {
        std::vector<NodeId> out;
        out.reserve(counts.size());
        for (const auto& [v, c] : counts) out.push_back(v);
        return out;
    }
};

inline LabelSet active_members(std::span<const Ipp> ipps) {
    LabelSet labels;
    for (const auto& p : ipps) ++labels.counts[p.v0];
    return labels;
}

// ---------------------------------------------------------------------------
// Wire formats

inline void write_ipps_jsonl(std::ostream& out, std::span<const Ipp> ipps) {
    char buf[160];
    for (const auto& p : ipps) {
        std::snprintf(buf, sizeof buf, "{\"v0\":%u,\"v1\":%u,\"v2\":%u,\"t0\":%u,\"t1\":%u}\n",
                      p.v0, p.v1, p.v2, p.t0, p.t1);
        out << buf;
    }
}

inline std::vector<Ipp> read_ipps_jsonl(std::istream& in) {
    std::vector<Ipp> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(line_no, "bad JSON");
        out.push_back({j.at("v0").get<NodeId>(), j.at("v1").get<NodeId>(), j.at("v2").get<NodeId>(),
                       j.at("t0").get<Timestamp>(), j.at("t1").get<Timestamp>()});
    }
    return out;
}

inline void write_labels_json(std::ostream& out, const LabelSet& labels) {
    out << '{';
    bool first = true;
    for (const auto& [v, c] : labels.counts) {
        if (!first) out << ',';
        first = false;
        out << '"' << v << "\":" << c;
    }
    out << "}\n";
}

inline LabelSet read_labels_json(std::istream& in) {
    nlohmann::json j = nlohmann::json::parse(in);
    LabelSet labels;
    for (auto it = j.begin(); it != j.end(); ++it)
        labels.counts[static_cast<NodeId>(std::stoul(it.key()))] = it.value().get<std::uint32_t>();
    return labels;
}

} // namespace tim
