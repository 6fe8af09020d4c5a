#include "memeflow/graph.hpp"

#include <algorithm>
#include <set>

namespace memeflow {

SocialNetwork SocialNetwork::build(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                                   EdgeMode mode, BuildReport* report) {
    BuildReport local;
    std::set<std::pair<NodeId, NodeId>> directed;
    std::set<std::pair<NodeId, NodeId>> undirected;

    for (const auto& [u, v] : pairs) {
        if (u >= n || v >= n) throw DataError("build_network: node id out of range");
        if (u == v) {
            ++local.self_loops_skipped;
            continue;
        }
        if (mode == EdgeMode::as_is) {
            auto e = std::minmax(u, v);
            if (!undirected.insert({e.first, e.second}).second) ++local.duplicate_edges;
        } else {
            if (!directed.insert({u, v}).second) {
                ++local.duplicate_edges;
                continue;
            }
            if (directed.count({v, u})) {
                auto e = std::minmax(u, v);
                undirected.insert({e.first, e.second});
            }
        }
    }
    if (mode == EdgeMode::reciprocal) {
        for (const auto& [u, v] : directed) {
            if (!directed.count({v, u})) ++local.unreciprocated_pairs;
        }
    }
    if (report) *report = local;

    std::vector<std::pair<NodeId, NodeId>> edges(undirected.begin(), undirected.end());
    return from_edges(n, std::move(edges));
}

SocialNetwork SocialNetwork::from_edges(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges) {
    SocialNetwork net;
    net.n_ = n;

    // Dedup defensively; callers may pass raw lists.
    for (auto& [u, v] : edges) {
        if (u >= n || v >= n) throw DataError("from_edges: node id out of range");
        if (u > v) std::swap(u, v);
        if (u == v) throw DataError("from_edges: self-loop");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    net.edge_count_ = edges.size();

    std::vector<std::size_t> deg(n, 0);
    for (const auto& [u, v] : edges) {
        ++deg[u];
        ++deg[v];
    }
    net.offsets_.assign(n + 1, 0);
    for (NodeId u = 0; u < n; ++u) net.offsets_[u + 1] = net.offsets_[u] + deg[u];
    net.adj_.assign(net.offsets_[n], 0);

    std::vector<std::size_t> cursor(net.offsets_.begin(), net.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        net.adj_[cursor[u]++] = v;
        net.adj_[cursor[v]++] = u;
    }
    for (NodeId u = 0; u < n; ++u) {
        std::sort(net.adj_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[u]),
                  net.adj_.begin() + static_cast<std::ptrdiff_t>(net.offsets_[u + 1]));
    }
    return net;
}

bool SocialNetwork::has_edge(NodeId u, NodeId v) const {
    if (u >= n_ || v >= n_) return false;
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

DegreeStats SocialNetwork::degree_stats() const {
    DegreeStats s;
    s.n = n_;
    s.m = edge_count_;
    if (n_ == 0) return s;
    s.min_degree = degree(0);
    for (NodeId u = 0; u < n_; ++u) {
        const std::size_t d = degree(u);
        s.min_degree = std::min(s.min_degree, d);
        s.max_degree = std::max(s.max_degree, d);
    }
    s.mean_degree = 2.0 * static_cast<double>(edge_count_) / static_cast<double>(n_);
    return s;
}

std::vector<std::pair<NodeId, NodeId>> SocialNetwork::edge_list() const {
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(edge_count_);
    for (NodeId u = 0; u < n_; ++u) {
        for (NodeId v : neighbors(u)) {
            if (u < v) edges.emplace_back(u, v);
        }
    }
    return edges;
}

}  // namespace memeflow
