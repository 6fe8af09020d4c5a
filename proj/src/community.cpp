#include "memeflow/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "memeflow/rng.hpp"

namespace memeflow {

std::size_t Partition::num_communities() const {
    CommunityId max_id = 0;
    bool any = false;
    for (CommunityId c : assignment) {
        max_id = std::max(max_id, c);
        any = true;
    }
    return any ? static_cast<std::size_t>(max_id) + 1 : 0;
}

CommunityId Partition::community_of(NodeId u) const {
    if (u >= assignment.size()) throw std::out_of_range("Partition::community_of: node out of range");
    return assignment[u];
}

void Partition::normalize() {
    std::unordered_map<CommunityId, CommunityId> relabel;
    relabel.reserve(assignment.size());
    CommunityId next = 0;
    for (CommunityId& c : assignment) {
        auto it = relabel.find(c);
        if (it == relabel.end()) {
            it = relabel.emplace(c, next++).first;
        }
        c = it->second;
    }
}

std::vector<std::size_t> Partition::community_sizes() const {
    std::vector<std::size_t> sizes(num_communities(), 0);
    for (CommunityId c : assignment) ++sizes[c];
    return sizes;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.assignment.resize(n);
    std::iota(p.assignment.begin(), p.assignment.end(), CommunityId{0});
    p.converged = true;
    return p;
}

double modularity(const SocialNetwork& net, const Partition& part) {
    if (part.assignment.size() != net.num_nodes())
        throw std::invalid_argument("modularity: partition size does not match graph");
    const double m = static_cast<double>(net.num_edges());
    if (net.num_edges() == 0) throw DataError("modularity: graph has no edges");

    const std::size_t n_comm = part.num_communities();
    std::vector<double> intra(n_comm, 0.0);   // m_c
    std::vector<double> degsum(n_comm, 0.0);  // d_c
    for (NodeId u = 0; u < net.num_nodes(); ++u) {
        const CommunityId cu = part.assignment[u];
        degsum[cu] += static_cast<double>(net.degree(u));
        for (NodeId v : net.neighbors(u)) {
            if (v > u && part.assignment[v] == cu) intra[cu] += 1.0;
        }
    }
    double q = 0.0;
    for (std::size_t c = 0; c < n_comm; ++c) {
        const double frac = degsum[c] / (2.0 * m);
        q += intra[c] / m - frac * frac;
    }
    return q;
}

namespace {

// Weighted multigraph used by the Louvain aggregation levels. Self-loop
// weight is stored separately and counts twice toward a node's strength.
struct WeightedGraph {
    std::vector<std::vector<std::pair<NodeId, double>>> adj;  // no self entries
    std::vector<double> self_loop;
    double total_strength = 0.0;  // sum over nodes of strength(u) == 2m

    std::size_t size() const { return adj.size(); }

    double strength(NodeId u) const {
        double s = 2.0 * self_loop[u];
        for (const auto& [v, w] : adj[u]) s += w;
        return s;
    }
};

struct LocalMoveResult {
    std::vector<CommunityId> community;  // dense labels
    bool improved = false;
};

// One Louvain level: greedy local moves until a full pass moves nothing.
LocalMoveResult local_moves(const WeightedGraph& g, double resolution, Rng& rng) {
    const std::size_t n = g.size();
    LocalMoveResult out;
    out.community.resize(n);
    std::iota(out.community.begin(), out.community.end(), CommunityId{0});

    std::vector<double> strength(n);
    for (NodeId u = 0; u < n; ++u) strength[u] = g.strength(u);
    std::vector<double> sum_tot(n);  // total strength per community
    for (NodeId u = 0; u < n; ++u) sum_tot[u] = strength[u];

    const double two_m = g.total_strength;
    if (two_m <= 0.0) return out;

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    rng.shuffle(order);

    std::vector<double> weight_to(n, 0.0);
    std::vector<CommunityId> touched;
    bool moved_any = true;
    while (moved_any) {
        moved_any = false;
        for (NodeId u : order) {
            const CommunityId old_c = out.community[u];
            touched.clear();
            touched.push_back(old_c);
            for (const auto& [v, w] : g.adj[u]) {
                const CommunityId c = out.community[v];
                if (weight_to[c] == 0.0 && c != old_c) touched.push_back(c);
                weight_to[c] += w;
            }
            sum_tot[old_c] -= strength[u];

            CommunityId best_c = old_c;
            double best_gain = weight_to[old_c] - resolution * sum_tot[old_c] * strength[u] / two_m;
            for (CommunityId c : touched) {
                const double gain = weight_to[c] - resolution * sum_tot[c] * strength[u] / two_m;
                if (gain > best_gain || (gain == best_gain && c < best_c)) {
                    best_gain = gain;
                    best_c = c;
                }
            }
            sum_tot[best_c] += strength[u];
            out.community[u] = best_c;
            if (best_c != old_c) {
                moved_any = true;
                out.improved = true;
            }
            for (CommunityId c : touched) weight_to[c] = 0.0;
        }
    }

    // Dense relabel in first-occurrence-by-node-id order.
    std::unordered_map<CommunityId, CommunityId> relabel;
    CommunityId next = 0;
    for (CommunityId& c : out.community) {
        auto it = relabel.find(c);
        if (it == relabel.end()) it = relabel.emplace(c, next++).first;
        c = it->second;
    }
    return out;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<CommunityId>& community) {
    CommunityId n_comm = 0;
    for (CommunityId c : community) n_comm = std::max(n_comm, static_cast<CommunityId>(c + 1));
    WeightedGraph agg;
    agg.adj.resize(n_comm);
    agg.self_loop.assign(n_comm, 0.0);
    agg.total_strength = g.total_strength;

    std::vector<std::unordered_map<CommunityId, double>> acc(n_comm);
    for (NodeId u = 0; u < g.size(); ++u) {
        const CommunityId cu = community[u];
        agg.self_loop[cu] += g.self_loop[u];
        for (const auto& [v, w] : g.adj[u]) {
            const CommunityId cv = community[v];
            if (cu == cv) {
                if (v > u) agg.self_loop[cu] += w;  // count each intra edge once
            } else {
                acc[cu][cv] += w;
            }
        }
    }
    for (CommunityId c = 0; c < n_comm; ++c) {
        agg.adj[c].assign(acc[c].begin(), acc[c].end());
        std::sort(agg.adj[c].begin(), agg.adj[c].end());
    }
    return agg;
}

WeightedGraph lift(const SocialNetwork& net) {
    WeightedGraph g;
    g.adj.resize(net.num_nodes());
    g.self_loop.assign(net.num_nodes(), 0.0);
    for (NodeId u = 0; u < net.num_nodes(); ++u) {
        auto nbrs = net.neighbors(u);
        g.adj[u].reserve(nbrs.size());
        for (NodeId v : nbrs) g.adj[u].emplace_back(v, 1.0);
    }
    g.total_strength = 2.0 * static_cast<double>(net.num_edges());
    return g;
}

}  // namespace

Partition detect_louvain(const SocialNetwork& net, std::uint64_t seed, double resolution) {
    const std::size_t n = net.num_nodes();
    if (net.num_edges() == 0) return Partition::singletons(n);

    Rng rng = Rng::substream(seed, 0x4c4f55u, 0);  // "LOU"

    // node -> community at the finest level, refined as levels coarsen
    std::vector<CommunityId> node_comm(n);
    std::iota(node_comm.begin(), node_comm.end(), CommunityId{0});

    WeightedGraph g = lift(net);
    while (true) {
        LocalMoveResult lvl = local_moves(g, resolution, rng);
        if (!lvl.improved) break;
        for (CommunityId& c : node_comm) c = lvl.community[c];
        WeightedGraph agg = aggregate(g, lvl.community);
        if (agg.size() == g.size()) break;  // nothing merged
        g = std::move(agg);
    }

    Partition part;
    part.assignment = std::move(node_comm);
    part.converged = true;
    part.normalize();
    return part;
}

Partition detect_label_propagation(const SocialNetwork& net, std::uint64_t seed) {
    const std::size_t n = net.num_nodes();
    Partition part;
    part.assignment.resize(n);
    std::iota(part.assignment.begin(), part.assignment.end(), CommunityId{0});

    Rng rng = Rng::substream(seed, 0x4c5041u, 0);  // "LPA"
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});

    std::unordered_map<CommunityId, std::size_t> counts;
    constexpr int kMaxSweeps = 100;
    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        rng.shuffle(order);
        bool changed = false;
        for (NodeId u : order) {
            auto nbrs = net.neighbors(u);
            if (nbrs.empty()) continue;
            counts.clear();
            std::size_t best_count = 0;
            for (NodeId v : nbrs) {
                const std::size_t c = ++counts[part.assignment[v]];
                best_count = std::max(best_count, c);
            }
            const CommunityId own = part.assignment[u];
            auto own_it = counts.find(own);
            if (own_it != counts.end() && own_it->second == best_count) continue;
            CommunityId best_label = kInvalidNode;
            for (const auto& [label, cnt] : counts) {
                if (cnt == best_count && label < best_label) best_label = label;
            }
            part.assignment[u] = best_label;
            changed = true;
        }
        if (!changed) {
            converged = true;
            break;
        }
    }
    part.converged = converged;
    part.normalize();
    return part;
}

}  // namespace memeflow
