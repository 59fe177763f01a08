#pragma once

// Batched latest-message aggregation over a node memory store.
//
// Two routes compute the same thing. process_feed_batched is the production
// path: structure-of-arrays buffers, one argmax/mean pass per batch, one
// state update per touched node, no per-event containers. process_feed_loop
// is the reference path written the naive way (per-batch map of message
// vectors, scalar loops) and is what the batched path is verified and
// benchmarked against. Elementwise math runs in double on both routes;
// storage is Scalar (float for the fast path, double for oracles).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tim/core.hpp"
#include "tim/graph_io.hpp"

namespace tim {

struct Message {
    NodeId node = 0;
    std::int64_t event_time = 0;
    std::vector<float> vec;
    std::size_t batch_pos = 0;
};

enum class AggregationMode { latest_message, mean_message };

inline std::string to_string(AggregationMode m) {
    return m == AggregationMode::latest_message ? "lm" : "mm";
}

enum class UpdateRule { replace, ema, gru };

inline std::string to_string(UpdateRule r) {
    switch (r) {
        case UpdateRule::replace: return "replace";
        case UpdateRule::ema: return "ema";
        case UpdateRule::gru: return "gru";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Fixed GRU cell weights. Layout per gate g in {r, z, n}: W_g is
// state_dim x input_dim row-major, U_g is state_dim x state_dim row-major,
// b_g has state_dim entries. The cell computes
//   r = sigmoid(Wr x + Ur h + br)
//   z = sigmoid(Wz x + Uz h + bz)
//   n = tanh(Wn x + r * (Un h) + bn)
//   h' = (1 - z) * n + z * h
// with dot products accumulated in index order, in double precision.

struct GruWeights {
    std::size_t input_dim = 0;
    std::size_t state_dim = 0;
    std::vector<double> wr, ur, br, wz, uz, bz, wn, un, bn;

    void validate() const {
        auto expect = [](const std::vector<double>& v, std::size_t n, const char* what) {
            if (v.size() != n) throw std::invalid_argument(std::string("gru weights: bad size for ") + what);
        };
        expect(wr, state_dim * input_dim, "wr");
        expect(wz, state_dim * input_dim, "wz");
        expect(wn, state_dim * input_dim, "wn");
        expect(ur, state_dim * state_dim, "ur");
        expect(uz, state_dim * state_dim, "uz");
        expect(un, state_dim * state_dim, "un");
        expect(br, state_dim, "br");
        expect(bz, state_dim, "bz");
        expect(bn, state_dim, "bn");
    }

    // Deterministic small weights for tests and demos.
    static GruWeights random_toy(std::size_t input_dim, std::size_t state_dim, std::uint64_t seed) {
        GruWeights w;
        w.input_dim = input_dim;
        w.state_dim = state_dim;
        auto rng = rng_for(seed, 0x677275); // "gru"
        const double scale = 0.5 / std::sqrt(static_cast<double>(std::max<std::size_t>(1, input_dim)));
        auto fill = [&](std::vector<double>& v, std::size_t n) {
            v.resize(n);
            for (auto& x : v) x = uniform_real(rng, -scale, scale);
        };
        fill(w.wr, state_dim * input_dim);
        fill(w.ur, state_dim * state_dim);
        fill(w.br, state_dim);
        fill(w.wz, state_dim * input_dim);
        fill(w.uz, state_dim * state_dim);
        fill(w.bz, state_dim);
        fill(w.wn, state_dim * input_dim);
        fill(w.un, state_dim * state_dim);
        fill(w.bn, state_dim);
        return w;
    }

    // File layout: one JSON header line with the dimensions, then the nine
    // arrays (order wr, ur, br, wz, uz, bz, wn, un, bn) as little-endian
    // IEEE-754 doubles.
    void save(const std::filesystem::path& path) const {
        validate();
        nlohmann::json header;
        header["input_dim"] = input_dim;
        header["state_dim"] = state_dim;
        std::string bytes = header.dump() + "\n";
        auto put = [&](const std::vector<double>& v) {
            for (double x : v) {
                std::uint64_t bits;
                static_assert(sizeof bits == sizeof x);
                std::memcpy(&bits, &x, sizeof bits);
                detail::put_u64le(bytes, bits);
            }
        };
        put(wr); put(ur); put(br);
        put(wz); put(uz); put(bz);
        put(wn); put(un); put(bn);
        detail::write_file_bytes(path, bytes);
    }

    static GruWeights load(const std::filesystem::path& path) {
        const std::string bytes = detail::read_file_bytes(path);
        const std::size_t newline = bytes.find('\n');
        if (newline == std::string::npos) throw std::runtime_error("gru weights: missing header");
        const auto header = nlohmann::json::parse(bytes.substr(0, newline));
        GruWeights w;
        w.input_dim = header.at("input_dim").get<std::size_t>();
        w.state_dim = header.at("state_dim").get<std::size_t>();
        std::size_t pos = newline + 1;
        auto get = [&](std::vector<double>& v, std::size_t n) {
            v.resize(n);
            for (auto& x : v) {
                const std::uint64_t bits = detail::get_u64le(bytes, pos);
                std::memcpy(&x, &bits, sizeof x);
            }
        };
        get(w.wr, w.state_dim * w.input_dim);
        get(w.ur, w.state_dim * w.state_dim);
        get(w.br, w.state_dim);
        get(w.wz, w.state_dim * w.input_dim);
        get(w.uz, w.state_dim * w.state_dim);
        get(w.bz, w.state_dim);
        get(w.wn, w.state_dim * w.input_dim);
        get(w.un, w.state_dim * w.state_dim);
        get(w.bn, w.state_dim);
        w.validate();
        return w;
    }
};

struct MemoryConfig {
    std::size_t dim = 32;
    UpdateRule rule = UpdateRule::replace;
    double ema_alpha = 0.5;
    GruWeights gru;     // required when rule == gru
    bool strict = false; // stale aggregated message: throw instead of drop
};

namespace detail {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}

template <typename Scalar = float>
class MemoryStore {
public:
    MemoryStore(std::size_t num_nodes, MemoryConfig cfg) : cfg_(std::move(cfg)), num_nodes_(num_nodes) {
        if (cfg_.rule == UpdateRule::gru) {
            cfg_.gru.validate();
            if (cfg_.gru.state_dim != cfg_.dim) throw std::invalid_argument("gru state_dim must equal store dim");
        }
        state_.assign(num_nodes_ * cfg_.dim, Scalar(0));
        last_update_.assign(num_nodes_, kNeverUpdated);
    }

    static constexpr std::int64_t kNeverUpdated = std::numeric_limits<std::int64_t>::min();

    std::size_t num_nodes() const { return num_nodes_; }
    std::size_t dim() const { return cfg_.dim; }
    const MemoryConfig& config() const { return cfg_; }

    std::span<const Scalar> state_of(NodeId v) const {
        check_node(v);
        return {state_.data() + static_cast<std::size_t>(v) * cfg_.dim, cfg_.dim};
    }
    std::int64_t last_update_of(NodeId v) const {
        check_node(v);
        return last_update_[v];
    }
    std::size_t stale_dropped() const { return stale_dropped_; }

    // Raw buffers; the reference loop implementation writes through these.
    std::span<Scalar> raw_state() { return state_; }
    std::span<std::int64_t> raw_last_update() { return last_update_; }
    void count_stale_drop() { ++stale_dropped_; }

    // Applies the configured rule for one aggregated message. Returns false
    // when the message is stale and the store is lenient.
    bool apply(NodeId v, std::int64_t event_time, std::span<const double> x) {
        check_node(v);
        if (event_time < last_update_[v]) {
            if (cfg_.strict)
                throw std::runtime_error("stale message for node " + std::to_string(v) + ": " +
                                         std::to_string(event_time) + " < " + std::to_string(last_update_[v]));
            ++stale_dropped_;
            return false;
        }
        Scalar* h = state_.data() + static_cast<std::size_t>(v) * cfg_.dim;
        switch (cfg_.rule) {
            case UpdateRule::replace:
                for (std::size_t i = 0; i < cfg_.dim; ++i)
                    h[i] = i < x.size() ? static_cast<Scalar>(x[i]) : Scalar(0);
                break;
            case UpdateRule::ema: {
                const double a = cfg_.ema_alpha;
                for (std::size_t i = 0; i < cfg_.dim; ++i) {
                    const double xi = i < x.size() ? x[i] : 0.0;
                    h[i] = static_cast<Scalar>(a * xi + (1.0 - a) * static_cast<double>(h[i]));
                }
                break;
            }
            case UpdateRule::gru: {
                const auto& w = cfg_.gru;
                if (x.size() != w.input_dim) throw std::invalid_argument("gru input dimension mismatch");
                const std::size_t m = cfg_.dim;
                scratch_.resize(2 * m);
                double* hn = scratch_.data();
                double* hold = scratch_.data() + m;
                for (std::size_t i = 0; i < m; ++i) hold[i] = static_cast<double>(h[i]);
                for (std::size_t i = 0; i < m; ++i) {
                    double ar = w.br[i], az = w.bz[i], an = w.bn[i], un_h = 0.0;
                    for (std::size_t j = 0; j < w.input_dim; ++j) {
                        const double xj = x[j];
                        ar += w.wr[i * w.input_dim + j] * xj;
                        az += w.wz[i * w.input_dim + j] * xj;
                        an += w.wn[i * w.input_dim + j] * xj;
                    }
                    for (std::size_t j = 0; j < m; ++j) {
                        const double hj = hold[j];
                        ar += w.ur[i * m + j] * hj;
                        az += w.uz[i * m + j] * hj;
                        un_h += w.un[i * m + j] * hj;
                    }
                    const double r = detail::sigmoid(ar);
                    const double z = detail::sigmoid(az);
                    const double n = std::tanh(an + r * un_h);
                    hn[i] = (1.0 - z) * n + z * hold[i];
                }
                for (std::size_t i = 0; i < m; ++i) h[i] = static_cast<Scalar>(hn[i]);
                break;
            }
        }
        last_update_[v] = event_time;
        return true;
    }

private:
    void check_node(NodeId v) const {
        if (v >= num_nodes_) throw std::out_of_range("node id outside memory store");
    }

    MemoryConfig cfg_;
    std::size_t num_nodes_ = 0;
    std::vector<Scalar> state_;
    std::vector<std::int64_t> last_update_;
    std::vector<double> scratch_;
    std::size_t stale_dropped_ = 0;
};

// ---------------------------------------------------------------------------
// Single-batch aggregation over Message objects.

// latest_message keeps, per node, the message with maximal event_time
// (ties: larger batch_pos). mean_message averages all of a node's messages
// elementwise and stamps the maximal event_time. All vectors must share one
// dimension.
inline std::map<NodeId, Message> aggregate(std::span<const Message> batch, AggregationMode mode) {
    std::map<NodeId, Message> out;
    if (batch.empty()) return out;
    const std::size_t dim = batch.front().vec.size();
    for (const auto& msg : batch)
        if (msg.vec.size() != dim) throw std::invalid_argument("message dimension mismatch in batch");

    std::map<NodeId, std::vector<const Message*>> groups;
    for (const auto& msg : batch) groups[msg.node].push_back(&msg);

    for (auto& [node, msgs] : groups) {
        const Message* winner = msgs.front();
        for (const Message* m : msgs)
            if (m->event_time > winner->event_time ||
                (m->event_time == winner->event_time && m->batch_pos >= winner->batch_pos))
                winner = m;
        Message agg = *winner;
        if (mode == AggregationMode::mean_message) {
            std::vector<double> sum(dim, 0.0);
            for (const Message* m : msgs)
                for (std::size_t i = 0; i < dim; ++i) sum[i] += static_cast<double>(m->vec[i]);
            for (std::size_t i = 0; i < dim; ++i)
                agg.vec[i] = static_cast<float>(sum[i] / static_cast<double>(msgs.size()));
        }
        out.emplace(node, std::move(agg));
    }
    return out;
}

template <typename Scalar>
void update_memory(MemoryStore<Scalar>& store, const std::map<NodeId, Message>& aggregated) {
    std::vector<double> x;
    for (const auto& [node, msg] : aggregated) {
        x.assign(msg.vec.begin(), msg.vec.end());
        store.apply(node, msg.event_time, x);
    }
}

// ---------------------------------------------------------------------------
// Feeds: structure-of-arrays event stream, nondecreasing in time.

struct Feed {
    std::size_t dim = 0;
    std::vector<NodeId> node;
    std::vector<std::int64_t> time;
    std::vector<float> values; // size() * dim, row-major

    std::size_t size() const { return node.size(); }

    void validate() const {
        if (node.size() != time.size() || values.size() != node.size() * dim)
            throw std::invalid_argument("feed arrays are inconsistent");
        if (!time.empty() && time.front() < 0) throw std::invalid_argument("negative event time");
        for (std::size_t i = 1; i < time.size(); ++i)
            if (time[i] < time[i - 1]) throw std::invalid_argument("feed is not time-ordered");
    }
};

inline Feed make_random_feed(std::size_t events, std::size_t dim, std::size_t num_nodes,
                             std::uint64_t seed) {
    Feed feed;
    feed.dim = dim;
    feed.node.reserve(events);
    feed.time.reserve(events);
    feed.values.reserve(events * dim);
    auto rng = rng_for(seed, 0xfeed);
    std::int64_t t = 0;
    for (std::size_t i = 0; i < events; ++i) {
        t += static_cast<std::int64_t>(bounded_rand(rng, 2)); // repeats exercise the tie rule
        feed.node.push_back(static_cast<NodeId>(bounded_rand(rng, num_nodes)));
        feed.time.push_back(t);
        for (std::size_t j = 0; j < dim; ++j)
            feed.values.push_back(static_cast<float>(uniform_real(rng, -1.0, 1.0)));
    }
    return feed;
}

// ---------------------------------------------------------------------------
// Feed processing: tensorized path.

template <typename Scalar>
void process_feed_batched(MemoryStore<Scalar>& store, const Feed& feed, std::size_t batch_size,
                          AggregationMode mode) {
    feed.validate();
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");

    const std::size_t n = store.num_nodes();
    const std::size_t dim = feed.dim;
    std::vector<std::uint32_t> epoch(n, 0);
    std::vector<std::uint32_t> winner(n, 0);   // event index of the current LM winner
    std::vector<std::uint32_t> slot(n, 0);     // compact index for mean accumulation
    std::vector<NodeId> touched;
    std::vector<double> sums;                  // touched * dim, mean mode only
    std::vector<std::uint32_t> counts;         // per touched node, mean mode only
    std::vector<double> x(dim);
    std::uint32_t current_epoch = 0;

    for (std::size_t begin = 0; begin < feed.size(); begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, feed.size());
        ++current_epoch;
        touched.clear();

        // Argmax-by-node pass. Event index order makes the later batch
        // position win ties automatically.
        for (std::size_t i = begin; i < end; ++i) {
            const NodeId v = feed.node[i];
            if (v >= n) throw std::out_of_range("feed node outside memory store");
            if (epoch[v] != current_epoch) {
                epoch[v] = current_epoch;
                winner[v] = static_cast<std::uint32_t>(i);
                slot[v] = static_cast<std::uint32_t>(touched.size());
                touched.push_back(v);
            } else if (feed.time[i] >= feed.time[winner[v]]) {
                winner[v] = static_cast<std::uint32_t>(i);
            }
        }

        if (mode == AggregationMode::mean_message) {
            sums.assign(touched.size() * dim, 0.0);
            counts.assign(touched.size(), 0);
            for (std::size_t i = begin; i < end; ++i) {
                const std::size_t s = slot[feed.node[i]];
                const float* row = feed.values.data() + i * dim;
                double* acc = sums.data() + s * dim;
                for (std::size_t j = 0; j < dim; ++j) acc[j] += static_cast<double>(row[j]);
                ++counts[s];
            }
        }

        for (const NodeId v : touched) {
            const std::size_t w = winner[v];
            if (mode == AggregationMode::latest_message) {
                const float* row = feed.values.data() + w * dim;
                for (std::size_t j = 0; j < dim; ++j) x[j] = static_cast<double>(row[j]);
            } else {
                const std::size_t s = slot[v];
                const double inv = 1.0 / static_cast<double>(counts[s]);
                // Means are rounded through float so both routes feed the
                // update rule bit-identical inputs.
                for (std::size_t j = 0; j < dim; ++j)
                    x[j] = static_cast<double>(static_cast<float>(sums[s * dim + j] * inv));
            }
            store.apply(v, feed.time[w], x);
        }
    }
}

// ---------------------------------------------------------------------------
// Feed processing: reference path. Same batch semantics, written the naive
// way on purpose; kept independent of MemoryStore::apply.

template <typename Scalar>
void process_feed_loop(MemoryStore<Scalar>& store, const Feed& feed, std::size_t batch_size,
                       AggregationMode mode) {
    feed.validate();
    if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
    const MemoryConfig& cfg = store.config();
    const std::size_t dim = feed.dim;
    auto state = store.raw_state();
    auto last_update = store.raw_last_update();

    for (std::size_t begin = 0; begin < feed.size(); begin += batch_size) {
        const std::size_t end = std::min(begin + batch_size, feed.size());

        std::map<NodeId, std::vector<Message>> groups;
        for (std::size_t i = begin; i < end; ++i) {
            Message m;
            m.node = feed.node[i];
            m.event_time = feed.time[i];
            m.batch_pos = i - begin;
            m.vec.assign(feed.values.begin() + static_cast<std::ptrdiff_t>(i * dim),
                         feed.values.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
            groups[m.node].push_back(std::move(m));
        }

        for (auto& [node, msgs] : groups) {
            std::size_t w = 0;
            for (std::size_t k = 1; k < msgs.size(); ++k)
                if (msgs[k].event_time > msgs[w].event_time ||
                    (msgs[k].event_time == msgs[w].event_time && msgs[k].batch_pos >= msgs[w].batch_pos))
                    w = k;

            std::vector<double> x(dim, 0.0);
            if (mode == AggregationMode::latest_message) {
                for (std::size_t j = 0; j < dim; ++j) x[j] = static_cast<double>(msgs[w].vec[j]);
            } else {
                for (const auto& m : msgs)
                    for (std::size_t j = 0; j < dim; ++j) x[j] += static_cast<double>(m.vec[j]);
                for (std::size_t j = 0; j < dim; ++j)
                    x[j] = static_cast<double>(static_cast<float>(x[j] / static_cast<double>(msgs.size())));
            }
            const std::int64_t event_time = msgs[w].event_time;

            if (node >= store.num_nodes()) throw std::out_of_range("feed node outside memory store");
            if (event_time < last_update[node]) {
                if (cfg.strict) throw std::runtime_error("stale message for node " + std::to_string(node));
                store.count_stale_drop();
                continue;
            }
            Scalar* h = state.data() + static_cast<std::size_t>(node) * cfg.dim;
            switch (cfg.rule) {
                case UpdateRule::replace:
                    for (std::size_t i = 0; i < cfg.dim; ++i)
                        h[i] = i < x.size() ? static_cast<Scalar>(x[i]) : Scalar(0);
                    break;
                case UpdateRule::ema:
                    for (std::size_t i = 0; i < cfg.dim; ++i) {
                        const double xi = i < x.size() ? x[i] : 0.0;
                        h[i] = static_cast<Scalar>(cfg.ema_alpha * xi +
                                                   (1.0 - cfg.ema_alpha) * static_cast<double>(h[i]));
                    }
                    break;
                case UpdateRule::gru: {
                    const auto& wts = cfg.gru;
                    if (x.size() != wts.input_dim) throw std::invalid_argument("gru input dimension mismatch");
                    const std::size_t m = cfg.dim;
                    std::vector<double> hold(m), hnew(m);
                    for (std::size_t i = 0; i < m; ++i) hold[i] = static_cast<double>(h[i]);
                    for (std::size_t i = 0; i < m; ++i) {
                        double ar = wts.br[i], az = wts.bz[i], an = wts.bn[i], un_h = 0.0;
                        for (std::size_t j = 0; j < wts.input_dim; ++j) {
                            ar += wts.wr[i * wts.input_dim + j] * x[j];
                            az += wts.wz[i * wts.input_dim + j] * x[j];
                            an += wts.wn[i * wts.input_dim + j] * x[j];
                        }
                        for (std::size_t j = 0; j < m; ++j) {
                            ar += wts.ur[i * m + j] * hold[j];
                            az += wts.uz[i * m + j] * hold[j];
                            un_h += wts.un[i * m + j] * hold[j];
                        }
                        const double r = 1.0 / (1.0 + std::exp(-ar));
                        const double z = 1.0 / (1.0 + std::exp(-az));
                        const double nn = std::tanh(an + r * un_h);
                        hnew[i] = (1.0 - z) * nn + z * hold[i];
                    }
                    for (std::size_t i = 0; i < m; ++i) h[i] = static_cast<Scalar>(hnew[i]);
                    break;
                }
            }
            last_update[node] = event_time;
        }
    }
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchConfig {
    std::vector<std::size_t> feed_sizes = {100'000};
    std::vector<std::size_t> batch_sizes = {256, 1024, 4096};
    std::size_t dim = 32;
    std::size_t num_nodes = 16'384;
    unsigned runs = 5;
    AggregationMode mode = AggregationMode::latest_message;
    UpdateRule rule = UpdateRule::replace;
    double ema_alpha = 0.5;
    std::uint64_t seed = 0;
};

struct BenchEntry {
    std::size_t feed_size = 0;
    std::size_t batch_size = 0;
    double loop_ms = 0;    // median over runs
    double batched_ms = 0; // median over runs
    double speedup = 0;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchEntry> entries;
    double checksum = 0; // defeats dead-code elimination; equal across paths
};

namespace detail {

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <class F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

} // namespace detail

// When `fixed_feed` is non-null it is benchmarked as-is and feed_sizes is
// ignored; otherwise one synthetic feed per configured size is generated.
inline BenchReport run_bench(const BenchConfig& cfg, const Feed* fixed_feed = nullptr) {
    BenchReport report;
    report.config = cfg;
    MemoryConfig mem;
    mem.dim = fixed_feed ? fixed_feed->dim : cfg.dim;
    mem.rule = cfg.rule;
    mem.ema_alpha = cfg.ema_alpha;
    if (cfg.rule == UpdateRule::gru) mem.gru = GruWeights::random_toy(mem.dim, mem.dim, cfg.seed);

    std::vector<std::size_t> sizes = fixed_feed ? std::vector<std::size_t>{fixed_feed->size()}
                                                : cfg.feed_sizes;
    for (std::size_t events : sizes) {
        const Feed feed =
            fixed_feed ? *fixed_feed : make_random_feed(events, cfg.dim, cfg.num_nodes, cfg.seed);
        std::size_t store_nodes = cfg.num_nodes;
        for (NodeId v : feed.node) store_nodes = std::max<std::size_t>(store_nodes, v + std::size_t{1});
        for (std::size_t batch : cfg.batch_sizes) {
            std::vector<double> loop_times, batched_times;
            for (unsigned run = 0; run < cfg.runs; ++run) {
                MemoryStore<float> loop_store(store_nodes, mem);
                loop_times.push_back(detail::time_ms(
                    [&] { process_feed_loop(loop_store, feed, batch, cfg.mode); }));
                MemoryStore<float> batched_store(store_nodes, mem);
                batched_times.push_back(detail::time_ms(
                    [&] { process_feed_batched(batched_store, feed, batch, cfg.mode); }));
                for (float v : loop_store.raw_state()) report.checksum += v;
                for (float v : batched_store.raw_state()) report.checksum -= v;
            }
            BenchEntry entry;
            entry.feed_size = events;
            entry.batch_size = batch;
            entry.loop_ms = detail::median(loop_times);
            entry.batched_ms = detail::median(batched_times);
            entry.speedup = entry.batched_ms > 0 ? entry.loop_ms / entry.batched_ms : 0.0;
            report.entries.push_back(entry);
        }
    }
    return report;
}

inline nlohmann::json bench_report_json(const BenchReport& r) {
    nlohmann::json j;
    j["dim"] = r.config.dim;
    j["num_nodes"] = r.config.num_nodes;
    j["runs"] = r.config.runs;
    j["mode"] = to_string(r.config.mode);
    j["rule"] = to_string(r.config.rule);
    j["seed"] = r.config.seed;
    j["checksum_delta"] = r.checksum;
    auto rows = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json row;
        row["feed_size"] = e.feed_size;
        row["batch_size"] = e.batch_size;
        row["loop_ms"] = e.loop_ms;
        row["batched_ms"] = e.batched_ms;
        row["speedup"] = e.speedup;
        rows.push_back(row);
    }
    j["results"] = rows;
    return j;
}

// ---------------------------------------------------------------------------
// Feed wire format: node,event_time,v_0..v_{d-1} per line.

inline void write_feed_csv(std::ostream& out, const Feed& feed) {
    char num[64];
    for (std::size_t i = 0; i < feed.size(); ++i) {
        out << feed.node[i] << ',' << feed.time[i];
        for (std::size_t j = 0; j < feed.dim; ++j) {
            std::snprintf(num, sizeof num, "%.9g", static_cast<double>(feed.values[i * feed.dim + j]));
            out << ',' << num;
        }
        out << '\n';
    }
}

inline Feed read_feed_csv(std::istream& in) {
    Feed feed;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() < 3) throw ParseError(line_no, "expected node,event_time,values...");
        if (feed.dim == 0) feed.dim = fields.size() - 2;
        if (fields.size() - 2 != feed.dim) throw ParseError(line_no, "inconsistent vector dimension");
        try {
            feed.node.push_back(static_cast<NodeId>(std::stoul(fields[0])));
            feed.time.push_back(std::stoll(fields[1]));
            for (std::size_t j = 0; j < feed.dim; ++j) feed.values.push_back(std::stof(fields[2 + j]));
        } catch (const std::exception&) {
            throw ParseError(line_no, "bad numeric field");
        }
    }
    feed.validate();
    return feed;
}

} // namespace tim
