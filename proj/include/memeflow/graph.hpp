#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "memeflow/types.hpp"

namespace memeflow {

// Bijective mapping between external string ids and dense node indices.
// Ids are assigned in first-seen order, so ingestion is deterministic.
class IdMap {
public:
    NodeId intern(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        const NodeId id = static_cast<NodeId>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    NodeId lookup(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? kInvalidNode : it->second;
    }

    const std::string& name(NodeId id) const { return names_.at(id); }
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, NodeId> index_;
};

enum class EdgeMode { reciprocal, as_is };

struct BuildReport {
    std::size_t self_loops_skipped = 0;
    std::size_t duplicate_edges = 0;
    std::size_t unreciprocated_pairs = 0;
};

struct DegreeStats {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t min_degree = 0;
    std::size_t max_degree = 0;
    double mean_degree = 0.0;
};

// Undirected, unweighted social graph. Immutable after construction;
// adjacency is CSR with sorted neighbor lists.
class SocialNetwork {
public:
    SocialNetwork() = default;

    // `pairs` are node pairs below `n`. In reciprocal mode they are directed
    // follows and an undirected edge requires both directions; in as-is mode
    // every pair becomes an undirected edge. Self-loops and duplicates are
    // dropped and counted. Nodes without edges stay as isolated nodes.
    static SocialNetwork build(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& pairs,
                               EdgeMode mode, BuildReport* report = nullptr);

    // Construction from an already-deduplicated undirected edge set.
    static SocialNetwork from_edges(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges);

    NodeId num_nodes() const { return n_; }
    std::size_t num_edges() const { return edge_count_; }

    std::span<const NodeId> neighbors(NodeId u) const {
        if (u >= n_) throw std::out_of_range("SocialNetwork::neighbors: node out of range");
        return {adj_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
    }

    std::size_t degree(NodeId u) const { return neighbors(u).size(); }

    bool has_edge(NodeId u, NodeId v) const;

    DegreeStats degree_stats() const;

    // Canonical undirected edge list (u < v, lexicographically sorted).
    std::vector<std::pair<NodeId, NodeId>> edge_list() const;

private:
    NodeId n_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adj_;
};

}  // namespace memeflow
