#pragma once

// Shared generators for the test suites. Graphs are always produced through
// CSV ingestion so node ids follow the production assignment path.

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tim/core.hpp"
#include "tim/temporal_graph.hpp"

namespace timtest {

struct RandomGraphSpec {
    std::size_t nodes = 50;
    std::size_t rows = 200;
    tim::Timestamp periods = 5;
    double strong_fraction = 0.4;
    double cold_fraction = 0.0;
    std::uint64_t seed = 0;
};

inline std::string random_graph_csv(const RandomGraphSpec& spec) {
    auto rng = tim::rng_for(spec.seed, 0x67726170); // "grap"
    std::ostringstream out;
    for (std::size_t i = 0; i < spec.rows; ++i) {
        const auto u = tim::bounded_rand(rng, spec.nodes);
        auto v = tim::bounded_rand(rng, spec.nodes);
        if (u == v) v = (v + 1) % spec.nodes;
        const auto t = tim::bounded_rand(rng, spec.periods);
        const double coin = tim::uniform_real(rng, 0.0, 1.0);
        int rel = 0;
        if (coin < spec.strong_fraction) rel = 1;
        else if (coin < spec.strong_fraction + spec.cold_fraction) rel = 2;
        out << 'n' << u << ",n" << v << ',' << t << ',' << rel << '\n';
    }
    return out.str();
}

inline tim::IngestResult random_graph(const RandomGraphSpec& spec) {
    return tim::ingest_edges(random_graph_csv(spec));
}

// Cumulative strong node sets built directly from the edge list, one per
// timestamp. The independent route for strong_membership checks.
inline std::vector<std::set<tim::NodeId>> cumulative_strong_sets(const tim::TemporalMultiGraph& g) {
    std::vector<std::set<tim::NodeId>> sets(g.num_timestamps());
    for (const auto& e : g.edges()) {
        if (e.rel != tim::Relation::strong) continue;
        sets[e.t].insert(e.src);
        sets[e.t].insert(e.dst);
    }
    for (tim::Timestamp t = 1; t < g.num_timestamps(); ++t)
        sets[t].insert(sets[t - 1].begin(), sets[t - 1].end());
    return sets;
}

// Full edge-scan route for neighbors.
inline std::set<tim::NodeId> neighbors_oracle(const tim::TemporalMultiGraph& g, tim::NodeId v,
                                              tim::Timestamp t, tim::RelationMask mask) {
    std::set<tim::NodeId> out;
    for (const auto& e : g.edges()) {
        if (e.t != t || !mask.contains(e.rel)) continue;
        if (e.src == v) out.insert(e.dst);
        if (e.dst == v) out.insert(e.src);
    }
    return out;
}

} // namespace timtest
