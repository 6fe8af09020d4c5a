#pragma once

#include <cstddef>
#include <vector>

#include "memeflow/graph.hpp"
#include "memeflow/types.hpp"

namespace memeflow {

// Node -> community assignment with dense labels 0..C-1.
struct Partition {
    std::vector<CommunityId> assignment;
    bool converged = true;

    std::size_t size() const { return assignment.size(); }

    std::size_t num_communities() const;

    CommunityId community_of(NodeId u) const;

    // Relabels communities to 0..C-1 in order of first occurrence by node id.
    void normalize();

    std::vector<std::size_t> community_sizes() const;

    static Partition singletons(std::size_t n);
};

// Newman modularity of an unweighted undirected graph:
//   Q = sum_c [ m_c/m - (d_c / 2m)^2 ]
// where m_c counts intra-community edges and d_c sums member degrees.
// Throws DataError when the graph has no edges.
double modularity(const SocialNetwork& net, const Partition& part);

// Louvain method. Node visit order within each pass is a seeded shuffle;
// gain ties are broken toward the lowest community id. A graph with no
// edges yields singleton communities.
Partition detect_louvain(const SocialNetwork& net, std::uint64_t seed, double resolution = 1.0);

// Asynchronous label propagation with seeded per-sweep visit order.
// A node keeps its current label when that label is among the most common
// neighbor labels; otherwise it adopts the smallest label of the plurality
// set. Stops when a sweep changes nothing, capped at 100 sweeps (the cap
// clears Partition::converged).
Partition detect_label_propagation(const SocialNetwork& net, std::uint64_t seed);

}  // namespace memeflow
