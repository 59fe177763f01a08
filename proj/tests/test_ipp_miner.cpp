#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <sstream>

#include "tim/ipp.hpp"
#include "tim/temporal_graph.hpp"

#include "helpers.hpp"

using namespace tim;

namespace {

// Nested-loop enumeration oracle: every ordered pair of edge records sharing
// a middle endpoint, deduplicated per tuple.
std::vector<Ipp> enumerate_oracle(const TemporalMultiGraph& g, RelationMask mask) {
    std::vector<TemporalEdge> es;
    for (const auto& e : g.edges())
        if (mask.contains(e.rel)) es.push_back(e);
    std::vector<Ipp> out;
    for (const auto& e1 : es) {
        for (const auto& e2 : es) {
            auto consider = [&](NodeId v0, NodeId mid, NodeId v2) {
                if (v0 != v2) out.push_back({v0, mid, v2, e1.t, e2.t});
            };
            if (e1.dst == e2.src) consider(e1.src, e1.dst, e2.dst);
            if (e1.dst == e2.dst) consider(e1.src, e1.dst, e2.src);
            if (e1.src == e2.src) consider(e1.dst, e1.src, e2.dst);
            if (e1.src == e2.dst) consider(e1.dst, e1.src, e2.src);
        }
    }
    sort_canonical(out);
    return out;
}

// Condition check through explicitly built cumulative strong sets, bypassing
// the id comparison entirely.
bool valid_by_explicit_sets(const TemporalMultiGraph& g, const Ipp& p) {
    const auto sets = timtest::cumulative_strong_sets(g);
    return p.t0 <= p.t1 && sets[p.t0].count(p.v0) && !sets[p.t0].count(p.v1) && !sets[p.t0].count(p.v2);
}

} // namespace

TEST_CASE("empty and single-edge graphs yield nothing") {
    auto [empty, es] = ingest_edges("");
    CHECK(mine_ipps(empty).empty());
    CHECK(brute_force_ipps(empty).empty());
    auto [g, stats] = ingest_edges("a,b,0,1");
    CHECK(enumerate_two_hop_motifs(g).empty());
    CHECK(mine_ipps(g).empty());
}

TEST_CASE("a two-edge path yields both wedge orientations") {
    auto [g, stats] = ingest_edges("a,b,0,1\nb,c,1,1");
    const NodeId a = *g.find_node("a");
    const NodeId b = *g.find_node("b");
    const NodeId c = *g.find_node("c");
    auto got = enumerate_two_hop_motifs(g);
    sort_canonical(got);
    std::vector<Ipp> expected{{a, b, c, 0, 1}, {c, b, a, 1, 0}};
    sort_canonical(expected);
    CHECK(got == expected);
}

TEST_CASE("parallel relations collapse to one candidate tuple") {
    auto [g, stats] = ingest_edges("a,b,0,0\na,b,0,1\nb,c,1,0\n");
    auto got = enumerate_two_hop_motifs(g);
    const std::set<std::tuple<NodeId, NodeId, NodeId, Timestamp, Timestamp>> unique_tuples = [&] {
        std::set<std::tuple<NodeId, NodeId, NodeId, Timestamp, Timestamp>> s;
        for (const auto& c : got) s.insert({c.v0, c.v1, c.v2, c.t0, c.t1});
        return s;
    }();
    CHECK(unique_tuples.size() == got.size()); // no duplicates emitted
    CHECK(enumerate_oracle(g, RelationMask::weak_strong()).size() == got.size());
}

TEST_CASE("enumeration matches the nested-loop oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 50, .rows = 160, .periods = 5, .seed = seed});
        auto got = enumerate_two_hop_motifs(g);
        sort_canonical(got);
        CHECK(got == enumerate_oracle(g, RelationMask::weak_strong()));
    }
}

TEST_CASE("filter drops edge-condition and node-condition violations") {
    // z,a strong at 0 makes a strong-known from t=0 on
    auto [g, stats] = ingest_edges("z,a,0,1\na,b,1,0\nb,c,2,0\n");
    const NodeId a = *g.find_node("a");
    const NodeId b = *g.find_node("b");
    const NodeId c = *g.find_node("c");
    const NodeId z = *g.find_node("z");

    SUBCASE("t0 > t1 is dropped") {
        const std::vector<Ipp> cand{{c, b, a, 2, 1}};
        CHECK(filter_ipps(g, cand).empty());
    }
    SUBCASE("strong middle node is dropped") {
        const std::vector<Ipp> cand{{z, a, b, 0, 1}}; // v1 = a is strong at t0 = 0
        CHECK(filter_ipps(g, cand).empty());
    }
    SUBCASE("the valid wedge passes") {
        const std::vector<Ipp> cand{{a, b, c, 1, 2}};
        CHECK(filter_ipps(g, cand).size() == 1);
    }
}

TEST_CASE("forced fixtures") {
    SUBCASE("exactly one valid path") {
        auto [g, stats] = ingest_edges("a,z,0,1\na,b,1,0\nb,c,1,0\n");
        const auto ipps = mine_ipps(g);
        REQUIRE(ipps.size() == 1);
        CHECK(ipps[0] == Ipp{*g.find_node("a"), *g.find_node("b"), *g.find_node("c"), 1, 1});
        CHECK(brute_force_ipps(g) == ipps);
    }
    SUBCASE("all-weak graph has no paths") {
        auto [g, stats] = ingest_edges("a,b,0,0\nb,c,1,0\nc,d,2,0\n");
        CHECK(mine_ipps(g).empty());
        CHECK(brute_force_ipps(g).empty());
    }
    SUBCASE("t0 > t1 wedge is rejected") {
        auto [g, stats] = ingest_edges("a,z,0,1\na,b,2,0\nb,c,1,0\n");
        CHECK(mine_ipps(g).empty());
        CHECK(brute_force_ipps(g).empty());
    }
}

TEST_CASE("mine equals brute force on random graphs") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto [g, stats] = timtest::random_graph({.nodes = 30 + seed % 20,
                                                 .rows = 120 + 10 * (seed % 7),
                                                 .periods = 4 + static_cast<Timestamp>(seed % 4),
                                                 .seed = seed});
        CHECK(mine_ipps(g) == brute_force_ipps(g));
    }
}

TEST_CASE("every mined path passes the explicit-set validator") {
    auto [g, stats] = timtest::random_graph({.nodes = 40, .rows = 200, .periods = 5, .seed = 42});
    for (const auto& p : mine_ipps(g)) {
        CHECK(is_valid_ipp(g, p));
        CHECK(valid_by_explicit_sets(g, p));
    }
}

TEST_CASE("the filter evaluates each candidate exactly once") {
    auto [g, stats] = timtest::random_graph({.nodes = 30, .rows = 150, .periods = 4, .seed = 5});
    const auto candidates = enumerate_two_hop_motifs(g);
    MotifStats st;
    (void)mine_ipps(g, {}, &st);
    CHECK(st.candidates == candidates.size());
    CHECK(st.conditions_evaluated == candidates.size());
}

TEST_CASE("mining is deterministic and thread-count independent") {
    auto [g, stats] = timtest::random_graph({.nodes = 60, .rows = 400, .periods = 6, .seed = 13});
    const auto base = mine_ipps(g);
    CHECK(base == mine_ipps(g));
    CHECK(base == mine_ipps(g, {.threads = 4}));
    CHECK(base == mine_ipps(g, {.threads = 7}));
}

TEST_CASE("brute force refuses oversized graphs") {
    std::ostringstream csv;
    for (int i = 0; i < 10'100; ++i) csv << 'a' << i << ",b" << i << ',' << i % 3 << ",1\n";
    auto [g, stats] = ingest_edges(csv.str());
    CHECK(g.num_edges() > kBruteForceEdgeGuard);
    CHECK_THROWS_AS(brute_force_ipps(g), std::invalid_argument);
}

TEST_CASE("active members aggregate initiator counts") {
    CHECK(active_members({}).counts.empty());
    const std::vector<Ipp> ipps{{7, 1, 2, 0, 1}, {7, 3, 4, 0, 2}, {9, 1, 2, 1, 1}};
    const auto labels = active_members(ipps);
    REQUIRE(labels.counts.size() == 2);
    CHECK(labels.counts.at(7) == 2);
    CHECK(labels.counts.at(9) == 1);
    CHECK(labels.members() == std::vector<NodeId>{7, 9});
}

TEST_CASE("path and label wire formats round-trip") {
    auto [g, stats] = timtest::random_graph({.nodes = 30, .rows = 200, .periods = 5, .seed = 3});
    const auto ipps = mine_ipps(g);

    std::ostringstream out;
    write_ipps_jsonl(out, ipps);
    std::istringstream in(out.str());
    CHECK(read_ipps_jsonl(in) == ipps);
    if (!ipps.empty()) {
        const std::string first = out.str().substr(0, out.str().find('\n'));
        CHECK(first.find("\"v0\":") != std::string::npos); // exact key layout
        CHECK(first.rfind("{\"v0\"", 0) == 0);
    }

    const auto labels = active_members(ipps);
    std::ostringstream lout;
    write_labels_json(lout, labels);
    std::istringstream lin(lout.str());
    CHECK(read_labels_json(lin).counts == labels.counts);
}
