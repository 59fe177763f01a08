#pragma once

// Cold-start augmentation: a prefix tree over serialized path strings, the
// index derived from its pre-order traversal (with children visited in
// ascending character order the traversal is the lexicographic order of the
// distinct strings), and windowed neighbor retrieval over that index.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <mutex>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tim/core.hpp"
#include "tim/serialization.hpp"
#include "tim/temporal_graph.hpp"

namespace tim {

class PttIndex {
public:
    PttIndex() = default;

    // Inserts all records into the trie and freezes the traversal sequence,
    // the position cache and the per-string carrier sets. Throws when a
    // string does not have the configured length.
    static PttIndex build(std::span<const IStrRecord> records, const SerializationConfig& cfg = {}) {
        PttIndex index;
        index.string_length_ = cfg.istr_length();
        index.nodes_.push_back({}); // root

        std::vector<std::vector<NodeId>> carriers_by_terminal;
        for (const auto& r : records) {
            if (r.istr.size() != index.string_length_)
                throw std::invalid_argument("string length " + std::to_string(r.istr.size()) +
                                            " does not match configured length " +
                                            std::to_string(index.string_length_));
            const std::uint32_t terminal = index.insert(r.istr);
            if (terminal >= carriers_by_terminal.size()) carriers_by_terminal.resize(terminal + 1);
            carriers_by_terminal[terminal].push_back(r.v2);
        }

        // Pre-order traversal; terminals come out in lexicographic order.
        std::string path;
        index.traverse(0, path, carriers_by_terminal);
        for (auto& c : index.carriers_) {
            std::sort(c.begin(), c.end());
            c.erase(std::unique(c.begin(), c.end()), c.end());
        }
        return index;
    }

    std::size_t size() const { return sequence_.size(); }
    bool empty() const { return sequence_.empty(); }
    std::size_t string_length() const { return string_length_; }

    // Distinct strings in traversal order.
    const std::vector<std::string>& sequence() const { return sequence_; }

    // Graph nodes attached to sequence()[i].
    const std::vector<std::vector<NodeId>>& carriers() const { return carriers_; }

    bool contains(std::string_view s) const { return position_.count(std::string(s)) > 0; }

    // Position of s in the sequence; for absent strings, the position where s
    // would be inserted (count of stored strings lexicographically below it).
    // Present strings hit the position cache, absent ones descend the trie.
    std::size_t locate(std::string_view s) const {
        if (nodes_.empty()) return 0;
        auto it = position_.find(std::string(s));
        if (it != position_.end()) return it->second;

        std::uint32_t cur = 0;
        std::size_t rank = 0;
        for (std::size_t depth = 0; depth < s.size(); ++depth) {
            if (nodes_[cur].terminal >= 0) ++rank; // stored proper prefix sorts below s
            const char c = s[depth];
            std::uint32_t next = kNone;
            for (std::uint32_t child = nodes_[cur].first_child; child != kNone;
                 child = nodes_[child].next_sibling) {
                if (nodes_[child].ch < c) {
                    rank += nodes_[child].leaf_count;
                } else {
                    if (nodes_[child].ch == c) next = child;
                    break;
                }
            }
            if (next == kNone) return rank;
            cur = next;
        }
        return rank;
    }

private:
    static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

    struct TrieNode {
        std::uint32_t first_child = kNone;
        std::uint32_t next_sibling = kNone;
        std::uint32_t leaf_count = 0; // distinct strings in this subtree
        std::int32_t terminal = -1;   // terminal id, creation order
        char ch = 0;
    };

    std::uint32_t child_for(std::uint32_t parent, char c) {
        std::uint32_t prev = kNone;
        std::uint32_t cur = nodes_[parent].first_child;
        while (cur != kNone && nodes_[cur].ch < c) {
            prev = cur;
            cur = nodes_[cur].next_sibling;
        }
        if (cur != kNone && nodes_[cur].ch == c) return cur;
        TrieNode fresh;
        fresh.ch = c;
        fresh.next_sibling = cur;
        const std::uint32_t id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(fresh);
        if (prev == kNone) nodes_[parent].first_child = id;
        else nodes_[prev].next_sibling = id;
        return id;
    }

    // Returns the terminal id for s, assigning a fresh one on first insert.
    std::uint32_t insert(std::string_view s) {
        std::vector<std::uint32_t> path;
        path.reserve(s.size() + 1);
        std::uint32_t cur = 0;
        path.push_back(cur);
        for (char c : s) {
            cur = child_for(cur, c);
            path.push_back(cur);
        }
        if (nodes_[cur].terminal < 0) {
            nodes_[cur].terminal = next_terminal_++;
            for (std::uint32_t n : path) ++nodes_[n].leaf_count;
        }
        return static_cast<std::uint32_t>(nodes_[cur].terminal);
    }

    void traverse(std::uint32_t node, std::string& path,
                  std::vector<std::vector<NodeId>>& carriers_by_terminal) {
        if (nodes_[node].terminal >= 0) {
            position_.emplace(path, sequence_.size());
            sequence_.push_back(path);
            carriers_.push_back(std::move(carriers_by_terminal[static_cast<std::size_t>(nodes_[node].terminal)]));
        }
        for (std::uint32_t child = nodes_[node].first_child; child != kNone;
             child = nodes_[child].next_sibling) {
            path.push_back(nodes_[child].ch);
            traverse(child, path, carriers_by_terminal);
            path.pop_back();
        }
    }

    std::vector<TrieNode> nodes_;
    std::int32_t next_terminal_ = 0;
    std::size_t string_length_ = 0;
    std::vector<std::string> sequence_;
    std::vector<std::vector<NodeId>> carriers_;
    std::unordered_map<std::string, std::size_t> position_;
};

struct RetrievalParams {
    std::size_t window = 5;   // w: positions scanned on each side of the query
    std::size_t min_sim = 0;  // h: minimum matched numbers to keep a candidate
    std::size_t sample_k = 3; // max partners added per input path
    std::uint64_t seed = 0;
    bool legacy_threshold = false; // keep candidates with sim < h instead of sim >= h
    bool strict = false;           // unresolvable query string is an error
    bool only_cold = false;        // process only records whose v2 is cold at t1
    std::size_t cold_max_neighbors = 1; // C used by only_cold
    unsigned threads = 1;
};

namespace detail {

inline bool is_cold_node(const TemporalMultiGraph& g, NodeId v, Timestamp t, std::size_t c) {
    const std::size_t d = g.degree(v, t, RelationMask::strong_only());
    return d >= 1 && d <= c;
}

inline std::vector<TemporalEdge> retrieve_range(const TemporalMultiGraph& g,
                                                std::span<const IStrRecord> queries,
                                                const PttIndex& ptt, const SerializationConfig& cfg,
                                                const RetrievalParams& params, std::size_t first,
                                                std::size_t last) {
    std::vector<TemporalEdge> out;
    for (std::size_t qi = first; qi < last; ++qi) {
        const auto& rec = queries[qi];
        if (params.only_cold && !is_cold_node(g, rec.v2, rec.t1, params.cold_max_neighbors)) continue;
        if (params.strict && !ptt.contains(rec.istr))
            throw std::runtime_error("query string not present in index: " + rec.istr);

        const std::size_t pos = ptt.locate(rec.istr);
        const std::size_t lo = pos >= params.window ? pos - params.window : 0;
        const std::size_t hi = std::min(pos + params.window, ptt.size() - 1);
        if (lo > hi) continue;

        std::vector<NodeId> existing = g.neighbors(rec.v2, rec.t1, RelationMask::all());
        auto is_excluded = [&](NodeId u) {
            return u == rec.v2 || std::binary_search(existing.begin(), existing.end(), u);
        };

        std::vector<NodeId> pool;
        for (std::size_t j = lo; j <= hi; ++j) {
            const std::size_t sim = istr_similarity(rec.istr, ptt.sequence()[j], cfg);
            const bool keep = params.legacy_threshold ? sim < params.min_sim : sim >= params.min_sim;
            if (!keep) continue;
            for (NodeId u : ptt.carriers()[j])
                if (!is_excluded(u)) pool.push_back(u);
        }
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

        auto rng = rng_for(params.seed, qi);
        for (NodeId u : sample_without_replacement(std::move(pool), params.sample_k, rng)) {
            TemporalEdge e{rec.v2, u, rec.t1, Relation::cold};
            if (e.src > e.dst) std::swap(e.src, e.dst);
            out.push_back(e);
        }
    }
    return out;
}

} // namespace detail

// Retrieves candidate partners for each input path from the traversal window
// around its string, filters them by similarity, samples at most sample_k per
// path, and returns the deduplicated augmentation edges (rel = cold, stamped
// with the path's t1). Sampling streams are split per input index, so the
// thread count does not affect the result.
inline std::vector<TemporalEdge> neighbor_retrieval(const TemporalMultiGraph& g,
                                                    std::span<const IStrRecord> queries,
                                                    const PttIndex& ptt,
                                                    const SerializationConfig& cfg = {},
                                                    const RetrievalParams& params = {}) {
    if (params.min_sim > cfg.num_numbers())
        throw std::invalid_argument("min_sim exceeds the number count of the configured string");
    for (const auto& rec : queries) {
        if (rec.istr.size() != cfg.istr_length()) throw std::invalid_argument("query string has wrong length");
        if (rec.v2 >= g.num_nodes()) throw std::out_of_range("query node outside graph");
        if (rec.t1 >= g.num_timestamps()) throw std::out_of_range("query timestamp outside graph");
    }
    if (ptt.empty()) return {};

    const unsigned threads = std::max(1u, params.threads);
    std::vector<TemporalEdge> edges;
    if (threads == 1 || queries.size() < 2 * threads) {
        edges = detail::retrieve_range(g, queries, ptt, cfg, params, 0, queries.size());
    } else {
        std::vector<std::vector<TemporalEdge>> partial(threads);
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mu;
        for (unsigned c = 0; c < threads; ++c) {
            pool.emplace_back([&, c] {
                const std::size_t first = queries.size() * c / threads;
                const std::size_t last = queries.size() * (c + 1) / threads;
                try {
                    partial[c] = detail::retrieve_range(g, queries, ptt, cfg, params, first, last);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
        for (auto& p : partial) edges.insert(edges.end(), p.begin(), p.end());
    }

    std::sort(edges.begin(), edges.end(), edge_less);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

// Augmentation edge CSV: src,dst,timestamp,relation with raw node keys, so
// the file composes with the original edge list.
inline void write_edges_csv(std::ostream& out, const TemporalMultiGraph& g,
                            std::span<const TemporalEdge> edges) {
    for (const auto& e : edges)
        out << g.node_keys()[e.src] << ',' << g.node_keys()[e.dst] << ',' << e.t << ','
            << relation_code(e.rel) << '\n';
}

inline std::vector<TemporalEdge> read_edges_csv(std::istream& in, const TemporalMultiGraph& g) {
    std::vector<TemporalEdge> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = detail::split_csv_line(line);
        if (fields.size() != 4) throw ParseError(line_no, "expected src,dst,timestamp,relation");
        auto u = g.find_node(fields[0]);
        auto v = g.find_node(fields[1]);
        if (!u || !v) throw ParseError(line_no, "unknown node key");
        const auto t = detail::parse_u64_field(fields[2], line_no, "timestamp");
        const auto rel = detail::parse_u64_field(fields[3], line_no, "relation");
        if (rel > 2) throw ParseError(line_no, "unknown relation code");
        out.push_back({*u, *v, static_cast<Timestamp>(t), relation_from_code(static_cast<int>(rel))});
    }
    return out;
}

} // namespace tim
