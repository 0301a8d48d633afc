#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "spreadnet/rng.hpp"
#include "spreadnet/types.hpp"

namespace spreadnet {

enum class GraphKind : std::uint8_t { BA, WS };

inline const char* to_string(GraphKind k) { return k == GraphKind::BA ? "ba" : "ws"; }

inline GraphKind graph_kind_from_string(const std::string& s) {
    if (s == "ba") return GraphKind::BA;
    if (s == "ws") return GraphKind::WS;
    throw std::invalid_argument("unknown network kind '" + s + "' (expected ba or ws)");
}

/// Recipe for a synthetic social network. For BA, target_avg_degree is the
/// desired mean degree (any positive rational); for WS it is the ring-lattice
/// degree k and must be a positive even integer with k < n.
struct GraphSpec {
    GraphKind kind = GraphKind::BA;
    NodeId n = 2000;
    double target_avg_degree = 5.0;
    double rewire_prob = 0.1;  // WS only
    std::uint64_t seed = 1;
};

using Edge = std::pair<NodeId, NodeId>;

/// Immutable undirected simple graph over dense node ids 0..N-1, with a CSR
/// adjacency for the spreading hot loop and cached degree statistics.
class NetworkGraph {
  public:
    NetworkGraph(NodeId node_count, std::vector<Edge> edges)
        : n_(node_count), edges_(std::move(edges)) {
        if (n_ == 0) throw std::invalid_argument("graph must have at least one node");
        for (auto& [u, v] : edges_) {
            if (u >= n_ || v >= n_) throw std::invalid_argument("edge endpoint out of range");
            if (u == v) throw std::invalid_argument("self-loops are not allowed");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges_.begin(), edges_.end());
        if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
            throw std::invalid_argument("duplicate edges are not allowed");

        std::vector<NodeId> degree(n_, 0);
        for (const auto& [u, v] : edges_) {
            ++degree[u];
            ++degree[v];
        }
        offsets_.assign(n_ + 1, 0);
        for (NodeId p = 0; p < n_; ++p) offsets_[p + 1] = offsets_[p] + degree[p];
        adjacency_.resize(2 * edges_.size());
        std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [u, v] : edges_) {
            adjacency_[cursor[u]++] = v;
            adjacency_[cursor[v]++] = u;
        }
        max_degree_ = *std::max_element(degree.begin(), degree.end());
    }

    NodeId node_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    NodeId degree(NodeId p) const { return static_cast<NodeId>(offsets_[p + 1] - offsets_[p]); }
    NodeId max_degree() const { return max_degree_; }
    double avg_degree() const { return 2.0 * static_cast<double>(edges_.size()) / n_; }

    std::span<const NodeId> neighbors(NodeId p) const {
        return {adjacency_.data() + offsets_[p], adjacency_.data() + offsets_[p + 1]};
    }

    /// Edges as (u, v) pairs with u < v, in lexicographic order.
    const std::vector<Edge>& edges() const { return edges_; }

    /// Edge-list dump: one "u v" line per edge, ids ascending within a pair,
    /// lines in lexicographic pair order. Bit-exact for golden tests.
    void write_edge_list(std::ostream& os) const {
        for (const auto& [u, v] : edges_) os << u << ' ' << v << '\n';
    }

  private:
    NodeId n_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
    NodeId max_degree_;
};

struct DegreeStats {
    std::vector<NodeId> degrees;
    double avg_degree;
    NodeId max_degree;
};

inline DegreeStats degree_stats(const NetworkGraph& g) {
    DegreeStats s;
    s.degrees.resize(g.node_count());
    for (NodeId p = 0; p < g.node_count(); ++p) s.degrees[p] = g.degree(p);
    s.avg_degree = g.avg_degree();
    s.max_degree = g.max_degree();
    return s;
}

namespace detail {

inline std::uint64_t edge_key(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

}  // namespace detail

/// Barabasi-Albert scale-free network by preferential attachment. The seed is
/// a complete graph on m0 = ceil(k/2)+1 nodes; each arriving node attaches to
/// floor(k/2) or ceil(k/2) distinct existing nodes, mixed so the running edge
/// budget tracks k/2 per arrival and the realized mean degree converges to
/// the target.
inline NetworkGraph generate_ba(const GraphSpec& spec) {
    if (spec.kind != GraphKind::BA) throw std::invalid_argument("generate_ba: spec.kind must be BA");
    if (spec.target_avg_degree <= 0.0)
        throw std::invalid_argument("generate_ba: target average degree must be positive");
    const double half = spec.target_avg_degree / 2.0;
    const NodeId m0 = static_cast<NodeId>(std::ceil(half)) + 1;
    if (spec.n < m0)
        throw std::invalid_argument("generate_ba: n too small for the seed clique (need n >= " +
                                    std::to_string(m0) + ")");

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(half * spec.n) + m0 * m0);
    // Attachment pool: node p appears once per unit of degree.
    std::vector<NodeId> pool;
    pool.reserve(2 * edges.capacity());
    for (NodeId u = 0; u < m0; ++u)
        for (NodeId v = u + 1; v < m0; ++v) {
            edges.emplace_back(u, v);
            pool.push_back(u);
            pool.push_back(v);
        }

    Rng rng(spec.seed);
    std::vector<NodeId> targets;
    double quota = 0.0;
    std::uint64_t attached = 0;
    for (NodeId arrival = m0; arrival < spec.n; ++arrival) {
        quota += half;
        std::uint64_t m = static_cast<std::uint64_t>(std::llround(quota)) - attached;
        m = std::max<std::uint64_t>(m, 1);  // keep the graph connected
        m = std::min<std::uint64_t>(m, arrival);
        attached += m;

        targets.clear();
        while (targets.size() < m) {
            const NodeId candidate = pool[rng.below(pool.size())];
            if (std::find(targets.begin(), targets.end(), candidate) == targets.end())
                targets.push_back(candidate);
        }
        for (const NodeId t : targets) {
            edges.emplace_back(t, arrival);
            pool.push_back(t);
            pool.push_back(arrival);
        }
    }
    return NetworkGraph(spec.n, std::move(edges));
}

/// Watts-Strogatz small world: ring lattice of degree k, each lattice edge
/// rewired independently with probability rewire_prob. Rewires that would
/// create a self-loop or duplicate edge are retried, so the edge count stays
/// exactly n*k/2.
inline NetworkGraph generate_ws(const GraphSpec& spec) {
    if (spec.kind != GraphKind::WS) throw std::invalid_argument("generate_ws: spec.kind must be WS");
    const double kd = spec.target_avg_degree;
    const NodeId k = static_cast<NodeId>(kd);
    if (kd != static_cast<double>(k) || k == 0 || k % 2 != 0)
        throw std::invalid_argument("generate_ws: lattice degree k must be a positive even integer");
    if (k >= spec.n) throw std::invalid_argument("generate_ws: k must be smaller than n");
    if (spec.rewire_prob < 0.0 || spec.rewire_prob > 1.0)
        throw std::invalid_argument("generate_ws: rewire probability must lie in [0,1]");

    const NodeId n = spec.n;
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * k / 2);
    std::unordered_set<std::uint64_t> present;
    present.reserve(edges.capacity() * 2);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId j = 1; j <= k / 2; ++j) {
            const NodeId v = (u + j) % n;
            edges.emplace_back(u, v);
            present.insert(detail::edge_key(u, v));
        }

    Rng rng(spec.seed);
    std::vector<NodeId> deg(n, k);
    for (auto& [u, v] : edges) {
        if (!rng.bernoulli(spec.rewire_prob)) continue;
        if (deg[u] == n - 1) continue;  // no non-adjacent target left
        for (;;) {
            const NodeId w = static_cast<NodeId>(rng.below(n));
            if (w == u) continue;
            const std::uint64_t key = detail::edge_key(u, w);
            if (present.count(key)) continue;
            present.erase(detail::edge_key(u, v));
            present.insert(key);
            --deg[v];
            ++deg[w];
            v = w;
            break;
        }
    }
    return NetworkGraph(n, std::move(edges));
}

inline NetworkGraph generate(const GraphSpec& spec) {
    return spec.kind == GraphKind::BA ? generate_ba(spec) : generate_ws(spec);
}

}  // namespace spreadnet
