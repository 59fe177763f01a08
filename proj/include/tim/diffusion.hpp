#pragma once

// Diffusion evaluation: seed selection, time-respecting reachability scale,
// hop-limited spread reports, the one-neighbor ratio statistic, the
// recommendation cool-down filter, and an optional seeded independent-cascade
// mode for synthetic what-if studies (not part of the measured pipeline).
//
// Reachability is deterministic over observed edges: an edge at time t
// extends the reached set when one endpoint was reached at time <= t, with
// chaining allowed inside a timestamp. A node's hop label is the minimum
// edge count over all time-respecting paths from the seed set.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tim/core.hpp"
#include "tim/ipp.hpp"
#include "tim/temporal_graph.hpp"

namespace tim {

enum class SeedStrategy { random, degree, ipp_frequency, file };

inline std::string to_string(SeedStrategy s) {
    switch (s) {
        case SeedStrategy::random: return "random";
        case SeedStrategy::degree: return "degree";
        case SeedStrategy::ipp_frequency: return "ipp-frequency";
        case SeedStrategy::file: return "file";
    }
    return "?";
}

struct SeedSet {
    std::vector<NodeId> seeds; // sorted ascending
    SeedStrategy strategy = SeedStrategy::random;
};

// K distinct seeds from the strong node set of timestamp 0.
inline SeedSet select_seeds(const TemporalMultiGraph& g, SeedStrategy strategy, std::size_t k,
                            std::uint64_t seed = 0, const LabelSet* labels = nullptr) {
    if (g.num_timestamps() == 0) throw std::invalid_argument("graph has no timestamps");
    std::vector<NodeId> domain = g.strong_nodes_at(0);
    if (k > domain.size())
        throw std::invalid_argument("requested " + std::to_string(k) + " seeds but only " +
                                    std::to_string(domain.size()) + " strong nodes exist at t=0");

    std::vector<NodeId> chosen;
    switch (strategy) {
        case SeedStrategy::random: {
            auto rng = rng_for(seed, 0);
            chosen = sample_without_replacement(std::move(domain), k, rng);
            break;
        }
        case SeedStrategy::degree: {
            std::stable_sort(domain.begin(), domain.end(), [&](NodeId a, NodeId b) {
                const auto da = g.degree(a, 0, RelationMask::strong_only());
                const auto db = g.degree(b, 0, RelationMask::strong_only());
                return da != db ? da > db : a < b;
            });
            chosen.assign(domain.begin(), domain.begin() + static_cast<std::ptrdiff_t>(k));
            break;
        }
        case SeedStrategy::ipp_frequency: {
            if (!labels) throw std::invalid_argument("ipp-frequency strategy needs a label set");
            auto count_of = [&](NodeId v) -> std::uint32_t {
                auto it = labels->counts.find(v);
                return it == labels->counts.end() ? 0 : it->second;
            };
            std::stable_sort(domain.begin(), domain.end(), [&](NodeId a, NodeId b) {
                const auto ca = count_of(a);
                const auto cb = count_of(b);
                return ca != cb ? ca > cb : a < b;
            });
            chosen.assign(domain.begin(), domain.begin() + static_cast<std::ptrdiff_t>(k));
            break;
        }
        case SeedStrategy::file:
            throw std::invalid_argument("file strategy: use seed_set_from_ids");
    }
    std::sort(chosen.begin(), chosen.end());
    return {std::move(chosen), strategy};
}

// Explicit seed list; every id must be a strong node of timestamp 0.
inline SeedSet seed_set_from_ids(const TemporalMultiGraph& g, std::span<const NodeId> ids) {
    if (g.num_timestamps() == 0) throw std::invalid_argument("graph has no timestamps");
    const auto domain = g.strong_nodes_at(0);
    std::vector<NodeId> seeds(ids.begin(), ids.end());
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    for (NodeId v : seeds)
        if (!std::binary_search(domain.begin(), domain.end(), v))
            throw std::invalid_argument("seed " + std::to_string(v) + " is not a strong node at t=0");
    return {std::move(seeds), SeedStrategy::file};
}

struct DiffusionOptions {
    RelationMask rels = RelationMask::weak_strong(); // add cold to use augmentation edges
};

namespace detail {

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Minimum hop labels after diffusing through t_end with hops capped at
// hop_cap. Optionally records the reached count after each timestamp.
inline std::vector<std::uint32_t> min_hop_labels(const TemporalMultiGraph& g, const SeedSet& s,
                                                 Timestamp t_end, std::size_t hop_cap,
                                                 const DiffusionOptions& opts,
                                                 std::vector<std::size_t>* reached_per_t = nullptr) {
    if (t_end >= g.num_timestamps()) throw std::out_of_range("t_end out of range");
    const std::size_t n = g.num_nodes();
    const std::uint32_t cap = static_cast<std::uint32_t>(std::min<std::size_t>(hop_cap, n));

    std::vector<std::uint32_t> hops(n, kUnreached);
    std::size_t reached = 0;
    for (NodeId v : s.seeds) {
        if (v >= n) throw std::out_of_range("seed outside graph");
        if (hops[v] == kUnreached) {
            hops[v] = 0;
            ++reached;
        }
    }
    if (reached_per_t) reached_per_t->assign(static_cast<std::size_t>(t_end) + 1, 0);

    using Item = std::pair<std::uint32_t, NodeId>; // (hop, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (Timestamp t = 0; t <= t_end; ++t) {
        for (NodeId v : g.nodes_at(t, opts.rels))
            if (hops[v] != kUnreached) heap.push({hops[v], v});
        while (!heap.empty()) {
            const auto [h, u] = heap.top();
            heap.pop();
            if (h != hops[u] || h >= cap) continue;
            g.for_each_neighbor(u, t, opts.rels, [&](NodeId w) {
                const std::uint32_t cand = h + 1;
                if (cand < hops[w]) {
                    if (hops[w] == kUnreached) ++reached;
                    hops[w] = cand;
                    heap.push({cand, w});
                }
            });
        }
        if (reached_per_t) (*reached_per_t)[t] = reached;
    }
    return hops;
}

} // namespace detail

// Distinct nodes reached from the seed set through t_end.
inline std::size_t network_scale(const TemporalMultiGraph& g, const SeedSet& s, Timestamp t_end,
                                 const DiffusionOptions& opts = {}) {
    const auto hops = detail::min_hop_labels(g, s, t_end, g.num_nodes(), opts);
    std::size_t reached = 0;
    for (auto h : hops)
        if (h != detail::kUnreached) ++reached;
    return reached;
}

// The literal whole-network reading: all nodes observed through t_end,
// regardless of reachability from the seeds.
inline std::size_t union_scale(const TemporalMultiGraph& g, Timestamp t_end,
                               const DiffusionOptions& opts = {}) {
    return g.observed_through(t_end, opts.rels);
}

struct SpreadReport {
    std::vector<NodeId> seeds;
    Timestamp t_end = 0;
    std::size_t max_hops = 0;
    std::size_t total_reached = 0;
    std::vector<std::size_t> reached_per_timestamp; // 0..t_end, nondecreasing
    std::vector<double> normalized_per_timestamp;   // reached / observed through t
    std::vector<std::size_t> reached_per_hop;       // cumulative by hop, 0..max hop reported
    std::map<std::string, std::size_t> cold_start_buckets; // reached nodes by degree at t=0
};

inline SpreadReport hop_limited_spread(const TemporalMultiGraph& g, const SeedSet& s, Timestamp t_end,
                                       std::size_t max_hops, const DiffusionOptions& opts = {}) {
    if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
    SpreadReport report;
    report.seeds = s.seeds;
    report.t_end = t_end;
    report.max_hops = max_hops;

    const auto hops = detail::min_hop_labels(g, s, t_end, max_hops, opts, &report.reached_per_timestamp);

    std::uint32_t max_seen = 0;
    for (auto h : hops)
        if (h != detail::kUnreached) {
            ++report.total_reached;
            max_seen = std::max(max_seen, h);
        }
    const std::size_t hop_count = std::min<std::size_t>(max_hops, max_seen) + 1;
    report.reached_per_hop.assign(hop_count, 0);
    for (auto h : hops)
        if (h != detail::kUnreached) ++report.reached_per_hop[std::min<std::size_t>(h, hop_count - 1)];
    for (std::size_t i = 1; i < hop_count; ++i) report.reached_per_hop[i] += report.reached_per_hop[i - 1];

    report.normalized_per_timestamp.resize(report.reached_per_timestamp.size());
    for (Timestamp t = 0; t <= t_end; ++t) {
        const std::size_t observed = g.observed_through(t, opts.rels);
        report.normalized_per_timestamp[t] =
            observed == 0 ? 0.0
                          : static_cast<double>(report.reached_per_timestamp[t]) / static_cast<double>(observed);
    }

    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (hops[v] == detail::kUnreached) continue;
        const std::size_t d0 = g.degree(v, 0, opts.rels);
        const std::string bucket = d0 >= 3 ? "3+" : std::to_string(d0);
        ++report.cold_start_buckets[bucket];
    }
    return report;
}

// Fraction of nodes present at t (under the mask) with exactly one neighbor.
inline double one_neighbor_ratio(const TemporalMultiGraph& g, Timestamp t,
                                 RelationMask mask = RelationMask::weak_strong(),
                                 bool* empty_warning = nullptr) {
    const auto present = g.nodes_at(t, mask);
    if (empty_warning) *empty_warning = present.empty();
    if (present.empty()) return 0.0;
    std::size_t ones = 0;
    for (NodeId v : present)
        if (g.degree(v, t, mask) == 1) ++ones;
    return static_cast<double>(ones) / static_cast<double>(present.size());
}

// ---------------------------------------------------------------------------
// Cool-down filter

struct RecEvent {
    std::int64_t time = 0;
    NodeId target = 0;
    NodeId source = 0;

    friend bool operator==(const RecEvent&, const RecEvent&) = default;
};

struct CooldownResult {
    std::vector<RecEvent> passed;
    std::size_t dropped = 0;
};

// Drops an event when its target already received `limit` delivered events
// within the trailing window (time - horizon, time]. Dropped events never
// count toward the window. Input must be nondecreasing in time.
inline CooldownResult cooldown_filter(std::span<const RecEvent> events, std::size_t limit = 10,
                                      std::int64_t horizon = 1) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    CooldownResult result;
    std::unordered_map<NodeId, std::deque<std::int64_t>> delivered;
    std::int64_t prev = std::numeric_limits<std::int64_t>::min();
    for (const auto& ev : events) {
        if (ev.time < prev) throw std::invalid_argument("events are not time-ordered");
        prev = ev.time;
        auto& window = delivered[ev.target];
        while (!window.empty() && window.front() <= ev.time - horizon) window.pop_front();
        if (window.size() >= limit) {
            ++result.dropped;
            continue;
        }
        window.push_back(ev.time);
        result.passed.push_back(ev);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Optional independent-cascade mode (synthetic studies only; the measured
// pipeline uses the deterministic reachability above).

struct IcOptions {
    double edge_probability = 0.1;
    unsigned trials = 100;
    std::uint64_t seed = 0;
    RelationMask rels = RelationMask::weak_strong();
};

struct IcReport {
    double mean_reached = 0.0;
    std::vector<std::size_t> per_trial;
};

inline IcReport independent_cascade(const TemporalMultiGraph& g, const SeedSet& s, Timestamp t_end,
                                    const IcOptions& opts = {}) {
    if (t_end >= g.num_timestamps()) throw std::out_of_range("t_end out of range");
    if (opts.edge_probability < 0.0 || opts.edge_probability > 1.0)
        throw std::invalid_argument("edge probability must be in [0, 1]");
    IcReport report;
    report.per_trial.reserve(opts.trials);

    for (unsigned trial = 0; trial < opts.trials; ++trial) {
        auto rng = rng_for(opts.seed, trial);
        // Live-edge sample in canonical edge order, then deterministic
        // time-respecting closure over the surviving edges.
        std::vector<std::vector<std::pair<NodeId, NodeId>>> live(static_cast<std::size_t>(t_end) + 1);
        for (const auto& e : g.edges()) {
            if (!opts.rels.contains(e.rel)) continue;
            const double coin = uniform_real(rng, 0.0, 1.0);
            if (e.t <= t_end && coin < opts.edge_probability) live[e.t].push_back({e.src, e.dst});
        }
        std::vector<char> reached(g.num_nodes(), 0);
        std::size_t count = 0;
        for (NodeId v : s.seeds)
            if (!reached[v]) {
                reached[v] = 1;
                ++count;
            }
        for (Timestamp t = 0; t <= t_end; ++t) {
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& [u, v] : live[t]) {
                    if (reached[u] && !reached[v]) {
                        reached[v] = 1;
                        ++count;
                        changed = true;
                    }
                    if (reached[v] && !reached[u]) {
                        reached[u] = 1;
                        ++count;
                        changed = true;
                    }
                }
            }
        }
        report.per_trial.push_back(count);
    }
    double sum = 0;
    for (auto c : report.per_trial) sum += static_cast<double>(c);
    report.mean_reached = report.per_trial.empty() ? 0.0 : sum / static_cast<double>(report.per_trial.size());
    return report;
}

// ---------------------------------------------------------------------------
// Report serialization

inline nlohmann::json spread_report_json(const SpreadReport& r) {
    nlohmann::json j;
    j["seeds"] = r.seeds;
    j["t_end"] = r.t_end;
    j["max_hops"] = r.max_hops;
    j["total_reached"] = r.total_reached;
    j["reached_per_timestamp"] = r.reached_per_timestamp;
    j["normalized_per_timestamp"] = r.normalized_per_timestamp;
    j["reached_per_hop"] = r.reached_per_hop;
    j["cold_start_buckets"] = r.cold_start_buckets;
    return j;
}

} // namespace tim
