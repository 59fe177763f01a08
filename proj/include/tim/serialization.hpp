#pragma once

// Fixed-length numeric serialization of node neighborhoods and paths, plus
// the positional similarity between two serialized strings.
//
// A node string is [degree][degree-value,count] x top_k, every field a
// zero-padded decimal clipped to max_value. A path string is the three node
// strings in reverse path order: v2@t1 then v1@t1 then v0@t0.

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tim/core.hpp"
#include "tim/ipp.hpp"
#include "tim/temporal_graph.hpp"

namespace tim {

struct SerializationConfig {
    unsigned max_value = 99; // truncation ceiling for degrees and counts
    unsigned digits = 2;     // characters per encoded number
    unsigned top_k = 3;      // retained (degree-value, count) pairs
    RelationMask rels = RelationMask::weak_strong();

    unsigned node_width() const { return digits * (1 + 2 * top_k); }
    unsigned istr_length() const { return 3 * node_width(); }
    unsigned num_numbers() const { return istr_length() / digits; } // N_I

    void validate() const {
        if (digits == 0 || digits > 9) throw std::invalid_argument("digits must be in [1, 9]");
        unsigned ceiling = 1;
        for (unsigned i = 0; i < digits; ++i) ceiling *= 10;
        if (max_value >= ceiling) throw std::invalid_argument("max_value must fit in the digit width");
    }
};

// Number of v's neighbors at t whose degree at t equals k.
inline std::size_t degree_count(const TemporalMultiGraph& g, NodeId v, std::size_t k, Timestamp t,
                                RelationMask mask = RelationMask::weak_strong()) {
    std::size_t n = 0;
    g.for_each_neighbor(v, t, mask, [&](NodeId u) {
        if (g.degree(u, t, mask) == k) ++n;
    });
    return n;
}

namespace detail {

inline void append_field(std::string& out, std::size_t value, const SerializationConfig& cfg) {
    std::size_t v = std::min<std::size_t>(value, cfg.max_value);
    std::string digits(cfg.digits, '0');
    for (unsigned i = cfg.digits; i-- > 0 && v > 0; v /= 10) digits[i] = static_cast<char>('0' + v % 10);
    out += digits;
}

} // namespace detail

inline std::string serialize_node(const TemporalMultiGraph& g, NodeId v, Timestamp t,
                                  const SerializationConfig& cfg = {}) {
    cfg.validate();

    // Tally of neighbor degrees; ordered map gives the smaller-degree-first
    // tie break directly.
    std::map<std::size_t, std::size_t> tally;
    std::size_t deg = 0;
    g.for_each_neighbor(v, t, cfg.rels, [&](NodeId u) {
        ++deg;
        ++tally[g.degree(u, t, cfg.rels)];
    });

    std::vector<std::pair<std::size_t, std::size_t>> pairs(tally.begin(), tally.end());
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    std::string out;
    out.reserve(cfg.node_width());
    detail::append_field(out, deg, cfg);
    for (unsigned i = 0; i < cfg.top_k; ++i) {
        if (i < pairs.size()) {
            detail::append_field(out, pairs[i].first, cfg);
            detail::append_field(out, pairs[i].second, cfg);
        } else {
            detail::append_field(out, 0, cfg);
            detail::append_field(out, 0, cfg);
        }
    }
    return out;
}

inline std::string serialize_ipp(const TemporalMultiGraph& g, const Ipp& p,
                                 const SerializationConfig& cfg = {}) {
    if (p.v0 >= g.num_nodes() || p.v1 >= g.num_nodes() || p.v2 >= g.num_nodes())
        throw std::out_of_range("path endpoint missing from graph");
    if (p.t0 >= g.num_timestamps() || p.t1 >= g.num_timestamps())
        throw std::out_of_range("path timestamp missing from graph");
    std::string out;
    out.reserve(cfg.istr_length());
    out += serialize_node(g, p.v2, p.t1, cfg);
    out += serialize_node(g, p.v1, p.t1, cfg);
    out += serialize_node(g, p.v0, p.t0, cfg);
    return out;
}

struct IStrRecord {
    std::string istr;
    NodeId v2 = 0;
    Timestamp t1 = 0;

    friend bool operator==(const IStrRecord&, const IStrRecord&) = default;
};

inline std::vector<IStrRecord> serialize_corpus(const TemporalMultiGraph& g, std::span<const Ipp> ipps,
                                                const SerializationConfig& cfg = {}) {
    std::vector<IStrRecord> out;
    out.reserve(ipps.size());
    for (const auto& p : ipps) out.push_back({serialize_ipp(g, p, cfg), p.v2, p.t1});
    return out;
}

inline std::vector<unsigned> decode_istr(std::string_view s, const SerializationConfig& cfg = {}) {
    cfg.validate();
    if (s.size() != cfg.istr_length()) throw std::invalid_argument("string length does not match config");
    std::vector<unsigned> numbers;
    numbers.reserve(cfg.num_numbers());
    for (unsigned i = 0; i < cfg.num_numbers(); ++i) {
        unsigned value = 0;
        for (unsigned d = 0; d < cfg.digits; ++d) {
            const char c = s[i * cfg.digits + d];
            if (c < '0' || c > '9') throw std::invalid_argument("non-digit character in serialized string");
            value = value * 10 + static_cast<unsigned>(c - '0');
        }
        if (value > cfg.max_value) throw std::invalid_argument("decoded number exceeds max_value");
        numbers.push_back(value);
    }
    return numbers;
}

inline std::string encode_istr(std::span<const unsigned> numbers, const SerializationConfig& cfg = {}) {
    cfg.validate();
    if (numbers.size() != cfg.num_numbers()) throw std::invalid_argument("wrong number count for config");
    std::string out;
    out.reserve(cfg.istr_length());
    for (unsigned v : numbers) detail::append_field(out, v, cfg);
    return out;
}

// Count of positions whose digit-group numbers agree in both strings.
inline std::size_t istr_similarity(std::string_view a, std::string_view b,
                                   const SerializationConfig& cfg = {}) {
    if (a.size() != b.size() || a.size() != cfg.istr_length())
        throw std::invalid_argument("similarity requires two strings of the configured length");
    std::size_t matches = 0;
    for (unsigned i = 0; i < cfg.num_numbers(); ++i)
        if (a.substr(i * cfg.digits, cfg.digits) == b.substr(i * cfg.digits, cfg.digits)) ++matches;
    return matches;
}

// ---------------------------------------------------------------------------
// Corpus wire format: one record per line.

inline void write_istr_corpus(std::ostream& out, std::span<const IStrRecord> records) {
    for (const auto& r : records)
        out << "{\"istr\":\"" << r.istr << "\",\"v2\":" << r.v2 << ",\"t1\":" << r.t1 << "}\n";
}

inline std::vector<IStrRecord> read_istr_corpus(std::istream& in) {
    std::vector<IStrRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(line_no, "bad JSON");
        out.push_back({j.at("istr").get<std::string>(), j.at("v2").get<NodeId>(), j.at("t1").get<Timestamp>()});
    }
    return out;
}

} // namespace tim
