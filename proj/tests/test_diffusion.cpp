#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <deque>
#include <map>
#include <set>

#include "tim/diffusion.hpp"
#include "tim/ipp.hpp"

#include "helpers.hpp"

using namespace tim;

namespace {

// Frontier-expansion oracle: per-timestamp fixpoint over the raw edge list.
std::set<NodeId> reach_oracle(const TemporalMultiGraph& g, const std::vector<NodeId>& seeds,
                              Timestamp t_end, RelationMask mask) {
    std::set<NodeId> reached(seeds.begin(), seeds.end());
    for (Timestamp t = 0; t <= t_end; ++t) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& e : g.edges()) {
                if (e.t != t || !mask.contains(e.rel)) continue;
                if (reached.count(e.src) && !reached.count(e.dst)) {
                    reached.insert(e.dst);
                    changed = true;
                }
                if (reached.count(e.dst) && !reached.count(e.src)) {
                    reached.insert(e.src);
                    changed = true;
                }
            }
        }
    }
    return reached;
}

// State-graph BFS oracle for minimal hop counts: states are (node, last edge
// time); every transition is one hop along an edge at time >= the state time.
std::map<NodeId, std::size_t> hops_oracle(const TemporalMultiGraph& g, const std::vector<NodeId>& seeds,
                                          Timestamp t_end, RelationMask mask) {
    const std::size_t t_states = static_cast<std::size_t>(t_end) + 1;
    std::vector<std::vector<std::size_t>> dist(g.num_nodes(),
                                               std::vector<std::size_t>(t_states, SIZE_MAX));
    std::deque<std::pair<NodeId, Timestamp>> queue;
    for (NodeId s : seeds) {
        if (dist[s][0] == SIZE_MAX) {
            dist[s][0] = 0;
            queue.push_back({s, 0});
        }
    }
    while (!queue.empty()) {
        const auto [v, tau] = queue.front();
        queue.pop_front();
        const std::size_t d = dist[v][tau];
        for (const auto& e : g.edges()) {
            if (!mask.contains(e.rel) || e.t < tau || e.t > t_end) continue;
            NodeId w;
            if (e.src == v) w = e.dst;
            else if (e.dst == v) w = e.src;
            else continue;
            if (dist[w][e.t] > d + 1) {
                dist[w][e.t] = d + 1;
                queue.push_back({w, e.t});
            }
        }
    }
    std::map<NodeId, std::size_t> hops;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        std::size_t best = SIZE_MAX;
        for (std::size_t tau = 0; tau < t_states; ++tau) best = std::min(best, dist[v][tau]);
        if (best != SIZE_MAX) hops[v] = best;
    }
    return hops;
}

SeedSet seeds_of(std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    return {std::move(ids), SeedStrategy::file};
}

} // namespace

TEST_CASE("seeding the whole initial node set reaches V_0 at t_end = 0") {
    auto [g, stats] = ingest_edges("a,b,0,1\nb,c,0,0\nd,e,1,1\n");
    const auto v0 = g.nodes_at(0);
    CHECK(network_scale(g, seeds_of(v0), 0) == v0.size());
    CHECK(network_scale(g, seeds_of(g.strong_nodes_at(0)), 0) == v0.size());
}

TEST_CASE("scale is constant once edges stop") {
    auto [g, stats] = ingest_edges("a,b,0,1\nb,c,0,0\nx,y,3,0\na,x,3,0\n");
    const auto s = seeds_of({*g.find_node("a")});
    const auto at0 = network_scale(g, s, 0);
    CHECK(network_scale(g, s, 1) == at0);
    CHECK(network_scale(g, s, 2) == at0);
    CHECK(network_scale(g, s, 3) > at0);
}

TEST_CASE("network scale matches the frontier oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 30, .rows = 150, .periods = 5, .seed = seed});
        const auto strong0 = g.strong_nodes_at(0);
        if (strong0.empty()) continue;
        auto rng = rng_for(seed, 1);
        const auto picked = sample_without_replacement(strong0, 1 + bounded_rand(rng, 3), rng);
        const auto s = seeds_of(picked);
        for (Timestamp t_end = 0; t_end < g.num_timestamps(); ++t_end) {
            const auto expected = reach_oracle(g, s.seeds, t_end, RelationMask::weak_strong());
            CHECK(network_scale(g, s, t_end) == expected.size());
        }
    }
}

TEST_CASE("scale is monotone in time and in the seed set, and bounded by observed nodes") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 25, .rows = 120, .periods = 4, .seed = seed + 100});
        const auto strong0 = g.strong_nodes_at(0);
        if (strong0.size() < 2) continue;
        const auto small = seeds_of({strong0[0]});
        const auto large = seeds_of({strong0[0], strong0[1]});
        std::size_t prev_small = 0;
        for (Timestamp t = 0; t < g.num_timestamps(); ++t) {
            const auto s1 = network_scale(g, small, t);
            const auto s2 = network_scale(g, large, t);
            CHECK(s1 >= prev_small);
            CHECK(s2 >= s1);
            CHECK(s1 <= g.observed_through(t, RelationMask::weak_strong()) + small.seeds.size());
            CHECK(s1 <= union_scale(g, g.num_timestamps() - 1) + small.seeds.size());
            prev_small = s1;
        }
    }
}

TEST_CASE("hop-limited spread saturates to the full scale") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 25, .rows = 130, .periods = 4, .seed = seed + 7});
        const auto strong0 = g.strong_nodes_at(0);
        if (strong0.empty()) continue;
        const auto s = seeds_of({strong0[0]});
        const Timestamp t_end = g.num_timestamps() - 1;
        const auto report = hop_limited_spread(g, s, t_end, g.num_nodes());
        CHECK(report.reached_per_hop.back() == network_scale(g, s, t_end));
        CHECK(report.total_reached == network_scale(g, s, t_end));
        for (std::size_t h = 1; h < report.reached_per_hop.size(); ++h)
            CHECK(report.reached_per_hop[h] >= report.reached_per_hop[h - 1]);
        for (std::size_t t = 1; t < report.reached_per_timestamp.size(); ++t)
            CHECK(report.reached_per_timestamp[t] >= report.reached_per_timestamp[t - 1]);
    }
}

TEST_CASE("a star's one-hop ring is its accumulated neighborhood") {
    auto [g, stats] = ingest_edges("c,a,0,1\nc,l1,0,0\nc,l2,1,0\nc,l3,2,0\n");
    const auto s = seeds_of({*g.find_node("c")});
    const auto report = hop_limited_spread(g, s, 2, 5);
    REQUIRE(report.reached_per_hop.size() >= 2);
    CHECK(report.reached_per_hop[0] == 1);
    CHECK(report.reached_per_hop[1] == 5); // c + a + three leaves
}

TEST_CASE("hop labels match the state-graph oracle") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 18, .rows = 60, .periods = 4, .seed = seed + 31});
        const auto strong0 = g.strong_nodes_at(0);
        if (strong0.empty()) continue;
        const auto s = seeds_of({strong0[0]});
        const Timestamp t_end = g.num_timestamps() - 1;
        const auto oracle = hops_oracle(g, s.seeds, t_end, RelationMask::weak_strong());

        for (std::size_t max_hops : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{20}}) {
            const auto report = hop_limited_spread(g, s, t_end, max_hops);
            for (std::size_t h = 0; h < report.reached_per_hop.size(); ++h) {
                std::size_t expected = 0;
                for (const auto& [v, hops] : oracle)
                    if (hops <= h) ++expected;
                CHECK(report.reached_per_hop[h] == expected);
            }
            std::size_t expected_total = 0;
            for (const auto& [v, hops] : oracle)
                if (hops <= max_hops) ++expected_total;
            CHECK(report.total_reached == expected_total);
        }
    }
}

TEST_CASE("cold edges only participate when masked in") {
    auto [g, stats] = timtest::random_graph({.nodes = 30, .rows = 150, .periods = 4, .seed = 3});
    const auto strong0 = g.strong_nodes_at(0);
    REQUIRE(!strong0.empty());
    const auto s = seeds_of({strong0[0]});
    const Timestamp t_end = g.num_timestamps() - 1;

    // augment with a cold edge from the seed to an otherwise distant node
    std::vector<TemporalEdge> extra{{strong0[0], static_cast<NodeId>(g.num_nodes() - 1), t_end,
                                     Relation::cold}};
    if (extra[0].src == extra[0].dst) extra[0].dst -= 1;
    const auto g2 = g.augment(extra);

    const auto base = hop_limited_spread(g, s, t_end, 3);
    const auto masked_off = hop_limited_spread(g2, s, t_end, 3);
    CHECK(base.total_reached == masked_off.total_reached);
    CHECK(base.reached_per_timestamp == masked_off.reached_per_timestamp);
    CHECK(base.reached_per_hop == masked_off.reached_per_hop);
    CHECK(base.normalized_per_timestamp == masked_off.normalized_per_timestamp);

    DiffusionOptions with_cold;
    with_cold.rels = RelationMask::all();
    const auto masked_on = hop_limited_spread(g2, s, t_end, 3, with_cold);
    CHECK(masked_on.total_reached >= base.total_reached);
}

TEST_CASE("one-neighbor ratio") {
    auto [g1, s1] = ingest_edges("a,b,0,0\n");
    CHECK(one_neighbor_ratio(g1, 0) == 1.0);
    auto [g2, s2] = ingest_edges("a,b,0,0\nb,c,0,0\na,c,0,0\n");
    CHECK(one_neighbor_ratio(g2, 0) == 0.0);
    // empty timestamp in the middle
    auto [g3, s3] = ingest_edges("a,b,0,0\nc,d,2,0\n");
    bool warned = false;
    CHECK(one_neighbor_ratio(g3, 1, RelationMask::weak_strong(), &warned) == 0.0);
    CHECK(warned);
}

TEST_CASE("seed selection strategies") {
    auto [g, stats] = ingest_edges(
        "hub,a,0,1\nhub,b,0,1\nhub,c,0,1\n"
        "a,b,0,1\n"
        "x,y,1,1\n");
    const auto strong0 = g.strong_nodes_at(0);

    SUBCASE("requesting the whole strong set returns it") {
        const auto s = select_seeds(g, SeedStrategy::random, strong0.size(), 7);
        CHECK(s.seeds == strong0);
    }
    SUBCASE("degree strategy picks the hub first") {
        const auto s = select_seeds(g, SeedStrategy::degree, 1);
        CHECK(s.seeds == std::vector<NodeId>{*g.find_node("hub")});
    }
    SUBCASE("random selection is seed-deterministic") {
        const auto a = select_seeds(g, SeedStrategy::random, 2, 5);
        const auto b = select_seeds(g, SeedStrategy::random, 2, 5);
        CHECK(a.seeds == b.seeds);
    }
    SUBCASE("oversized requests are rejected") {
        CHECK_THROWS_AS(select_seeds(g, SeedStrategy::random, strong0.size() + 1, 0),
                        std::invalid_argument);
    }
    SUBCASE("file seeds must be strong at t=0") {
        CHECK_THROWS_AS(seed_set_from_ids(g, std::vector<NodeId>{*g.find_node("x")}),
                        std::invalid_argument);
        const auto ok = seed_set_from_ids(g, std::vector<NodeId>{*g.find_node("hub")});
        CHECK(ok.seeds.size() == 1);
    }
}

TEST_CASE("ipp-frequency seeding matches a count-sort oracle") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 30, .rows = 200, .periods = 5, .seed = seed + 11});
        const auto strong0 = g.strong_nodes_at(0);
        if (strong0.size() < 3) continue;
        const auto labels = active_members(mine_ipps(g));
        const auto s = select_seeds(g, SeedStrategy::ipp_frequency, 3, 0, &labels);

        auto expected = strong0;
        std::stable_sort(expected.begin(), expected.end(), [&](NodeId a, NodeId b) {
            auto ca = labels.counts.count(a) ? labels.counts.at(a) : 0u;
            auto cb = labels.counts.count(b) ? labels.counts.at(b) : 0u;
            return ca != cb ? ca > cb : a < b;
        });
        expected.resize(3);
        std::sort(expected.begin(), expected.end());
        CHECK(s.seeds == expected);
    }
}

TEST_CASE("cooldown basics") {
    std::vector<RecEvent> nine, eleven;
    for (int i = 0; i < 9; ++i) nine.push_back({0, 1, 0});
    for (int i = 0; i < 11; ++i) eleven.push_back({0, 1, 0});

    CHECK(cooldown_filter(nine, 10, 24).passed.size() == 9);
    CHECK(cooldown_filter(nine, 10, 24).dropped == 0);
    const auto r = cooldown_filter(eleven, 10, 24);
    CHECK(r.passed.size() == 10);
    CHECK(r.dropped == 1);

    SUBCASE("the window expires") {
        std::vector<RecEvent> events;
        for (int i = 0; i < 10; ++i) events.push_back({0, 1, 0});
        events.push_back({23, 1, 0}); // still inside (0 > 23 - 24)
        events.push_back({24, 1, 0}); // first ten expired
        const auto res = cooldown_filter(events, 10, 24);
        CHECK(res.dropped == 1);
        CHECK(res.passed.back().time == 24);
    }
    SUBCASE("unordered input is rejected") {
        std::vector<RecEvent> bad{{5, 1, 0}, {4, 1, 0}};
        CHECK_THROWS_AS(cooldown_filter(bad, 10, 24), std::invalid_argument);
    }
}

TEST_CASE("cooldown matches a sliding-window recount oracle") {
    auto rng = rng_for(55, 0);
    std::vector<RecEvent> events;
    std::int64_t t = 0;
    for (int i = 0; i < 3000; ++i) {
        t += static_cast<std::int64_t>(bounded_rand(rng, 3));
        events.push_back({t, static_cast<NodeId>(bounded_rand(rng, 5)), 0});
    }
    const std::size_t limit = 4;
    const std::int64_t horizon = 10;
    const auto got = cooldown_filter(events, limit, horizon);

    // quadratic recount over the passed list
    std::vector<RecEvent> passed;
    std::size_t dropped = 0;
    for (const auto& ev : events) {
        std::size_t in_window = 0;
        for (const auto& p : passed)
            if (p.target == ev.target && p.time > ev.time - horizon) ++in_window;
        if (in_window >= limit) ++dropped;
        else passed.push_back(ev);
    }
    CHECK(got.passed == passed);
    CHECK(got.dropped == dropped);
}

TEST_CASE("independent cascade endpoints") {
    auto [g, stats] = timtest::random_graph({.nodes = 25, .rows = 140, .periods = 4, .seed = 9});
    const auto strong0 = g.strong_nodes_at(0);
    REQUIRE(!strong0.empty());
    const auto s = seeds_of({strong0[0]});
    const Timestamp t_end = g.num_timestamps() - 1;

    IcOptions ic;
    ic.trials = 10;
    ic.seed = 4;

    SUBCASE("p = 1 reproduces the deterministic reach each trial") {
        ic.edge_probability = 1.0;
        const auto expected = network_scale(g, s, t_end);
        for (auto c : independent_cascade(g, s, t_end, ic).per_trial) CHECK(c == expected);
    }
    SUBCASE("p = 0 reaches only the seeds") {
        ic.edge_probability = 0.0;
        for (auto c : independent_cascade(g, s, t_end, ic).per_trial) CHECK(c == s.seeds.size());
    }
    SUBCASE("seeded runs are reproducible") {
        ic.edge_probability = 0.35;
        const auto a = independent_cascade(g, s, t_end, ic);
        const auto b = independent_cascade(g, s, t_end, ic);
        CHECK(a.per_trial == b.per_trial);
        CHECK(a.mean_reached == b.mean_reached);
    }
}
