#include "memeflow/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace memeflow {

void CascadeParams::validate() const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("CascadeParams: p must be in [0,1]");
    if (target_tweets < 1) throw std::invalid_argument("CascadeParams: target_tweets must be >= 1");
    if (oversample_factor < 1)
        throw std::invalid_argument("CascadeParams: oversample_factor must be >= 1");
    if (sample_rate <= 0.0 || sample_rate > 1.0)
        throw std::invalid_argument("CascadeParams: sample_rate must be in (0,1]");
}

const char* model_name(DiffusionModel m) {
    switch (m) {
        case DiffusionModel::M1: return "m1";
        case DiffusionModel::M2: return "m2";
        case DiffusionModel::M3: return "m3";
        case DiffusionModel::M4: return "m4";
    }
    return "?";
}

namespace {

// Eligible-neighbor lookup shared by M2 (all neighbors) and M4 (neighbors in
// the spreader's own community). Keeping one code path means both models
// consume the random stream identically whenever the filters coincide.
class NeighborPool {
public:
    NeighborPool(const SocialNetwork& net, const Partition* part) : net_(net), part_(part) {
        if (part_) cache_.resize(net.num_nodes());
    }

    std::span<const NodeId> of(NodeId u) {
        if (!part_) return net_.neighbors(u);
        Entry& entry = cache_[u];
        if (!entry.built) {
            const CommunityId cu = part_->assignment[u];
            for (NodeId v : net_.neighbors(u)) {
                if (part_->assignment[v] == cu) entry.nbrs.push_back(v);
            }
            entry.built = true;
        }
        return entry.nbrs;
    }

private:
    struct Entry {
        std::vector<NodeId> nbrs;
        bool built = false;
    };
    const SocialNetwork& net_;
    const Partition* part_;
    std::vector<Entry> cache_;
};

MemeTrace run_simple_cascade(const SocialNetwork& net, const Partition* part,
                             const CascadeParams& params, Rng& rng, SimDebug* debug) {
    params.validate();
    if (net.num_edges() == 0) throw DataError("cascade: network has no edges");
    if (part && part->assignment.size() != net.num_nodes())
        throw DataError("cascade: partition does not cover the network");

    const std::size_t n_events = params.raw_events();
    const NodeId n = static_cast<NodeId>(net.num_nodes());
    NeighborPool pool(net, part);

    MemeTrace trace;
    trace.events.reserve(n_events);
    if (debug) {
        debug->is_restart.clear();
        debug->is_restart.reserve(n_events);
    }

    std::vector<bool> infected(n, false);
    std::vector<NodeId> spreaders;  // infected nodes that can still spread

    auto emit = [&](NodeId u, bool is_restart) {
        const auto seq = static_cast<std::uint32_t>(trace.events.size());
        trace.events.push_back({u, seq, static_cast<std::int64_t>(seq)});
        if (debug) debug->is_restart.push_back(is_restart);
        if (!infected[u]) {
            infected[u] = true;
            if (!pool.of(u).empty()) spreaders.push_back(u);
        }
    };

    if (params.initial_seed) {
        if (*params.initial_seed >= n) throw DataError("cascade: initial seed out of range");
        emit(*params.initial_seed, true);
    } else {
        emit(static_cast<NodeId>(rng.below(n)), true);
    }

    while (trace.events.size() < n_events) {
        if (rng.bernoulli(params.p) && !spreaders.empty()) {
            const NodeId spreader = spreaders[rng.below(spreaders.size())];
            const auto nbrs = pool.of(spreader);
            emit(nbrs[rng.below(nbrs.size())], false);
        } else {
            emit(static_cast<NodeId>(rng.below(n)), true);
        }
    }
    return trace;
}

}  // namespace

MemeTrace simulate_m1(const SocialNetwork& net, const CascadeParams& params, M1Mode mode,
                      Rng& rng) {
    params.validate();
    if (net.num_nodes() == 0) throw DataError("cascade: network is empty");
    const std::size_t n_events = params.raw_events();
    const auto n = static_cast<std::uint32_t>(net.num_nodes());

    MemeTrace trace;
    trace.events.reserve(n_events);
    if (mode == M1Mode::users) {
        if (n_events > n)
            throw DataError("simulate_m1: users mode needs target <= number of users");
        const auto picked = rng.sample_without_replacement(n, static_cast<std::uint32_t>(n_events));
        for (std::uint32_t i = 0; i < picked.size(); ++i) {
            trace.events.push_back({picked[i], i, static_cast<std::int64_t>(i)});
        }
    } else {
        for (std::uint32_t i = 0; i < n_events; ++i) {
            trace.events.push_back({static_cast<NodeId>(rng.below(n)), i, static_cast<std::int64_t>(i)});
        }
    }
    return trace;
}

MemeTrace simulate_m2(const SocialNetwork& net, const CascadeParams& params, Rng& rng,
                      SimDebug* debug) {
    return run_simple_cascade(net, nullptr, params, rng, debug);
}

MemeTrace simulate_m4(const SocialNetwork& net, const Partition& part, const CascadeParams& params,
                      Rng& rng, SimDebug* debug) {
    return run_simple_cascade(net, &part, params, rng, debug);
}

MemeTrace simulate_m3(const SocialNetwork& net, const CascadeParams& params, Rng& rng,
                      SimDebug* debug) {
    params.validate();
    if (net.num_edges() == 0) throw DataError("cascade: network has no edges");

    const std::size_t n_events = params.raw_events();
    const NodeId n = static_cast<NodeId>(net.num_nodes());

    MemeTrace trace;
    trace.events.reserve(n_events);
    if (debug) {
        debug->is_restart.clear();
        debug->is_restart.reserve(n_events);
    }

    std::vector<bool> infected(n, false);
    std::vector<std::uint32_t> inf_nbrs(n, 0);
    std::vector<NodeId> candidates;  // nodes with >= 1 infected neighbor
    std::vector<bool> is_candidate(n, false);

    auto emit = [&](NodeId u, bool is_restart) {
        const auto seq = static_cast<std::uint32_t>(trace.events.size());
        trace.events.push_back({u, seq, static_cast<std::int64_t>(seq)});
        if (debug) debug->is_restart.push_back(is_restart);
        if (!infected[u]) {
            infected[u] = true;
            for (NodeId v : net.neighbors(u)) {
                ++inf_nbrs[v];
                if (!is_candidate[v]) {
                    is_candidate[v] = true;
                    candidates.push_back(v);
                }
            }
        }
    };

    if (params.initial_seed) {
        if (*params.initial_seed >= n) throw DataError("cascade: initial seed out of range");
        emit(*params.initial_seed, true);
    } else {
        emit(static_cast<NodeId>(rng.below(n)), true);
    }

    while (trace.events.size() < n_events) {
        if (rng.bernoulli(params.p) && !candidates.empty()) {
            NodeId best = kInvalidNode;
            std::uint32_t best_count = 0;
            for (NodeId u : candidates) {
                if (inf_nbrs[u] > best_count || (inf_nbrs[u] == best_count && u < best)) {
                    best_count = inf_nbrs[u];
                    best = u;
                }
            }
            emit(best, false);
        } else {
            emit(static_cast<NodeId>(rng.below(n)), true);
        }
    }
    return trace;
}

MemeTrace simulate_m1(const SocialNetwork& net, const CascadeParams& params, M1Mode mode) {
    Rng rng = Rng::substream(params.seed, 0x100 + static_cast<std::uint64_t>(DiffusionModel::M1), 0);
    return simulate_m1(net, params, mode, rng);
}

MemeTrace simulate_m2(const SocialNetwork& net, const CascadeParams& params) {
    Rng rng = Rng::substream(params.seed, 0x100 + static_cast<std::uint64_t>(DiffusionModel::M2), 0);
    return simulate_m2(net, params, rng);
}

MemeTrace simulate_m3(const SocialNetwork& net, const CascadeParams& params) {
    Rng rng = Rng::substream(params.seed, 0x100 + static_cast<std::uint64_t>(DiffusionModel::M3), 0);
    return simulate_m3(net, params, rng);
}

MemeTrace simulate_m4(const SocialNetwork& net, const Partition& part, const CascadeParams& params) {
    Rng rng = Rng::substream(params.seed, 0x100 + static_cast<std::uint64_t>(DiffusionModel::M4), 0);
    return simulate_m4(net, part, params, rng);
}

MemeTrace subsample(const MemeTrace& trace, double rate, std::uint64_t seed) {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("subsample: rate must be in (0,1]");
    MemeTrace out;
    out.meme_id = trace.meme_id;
    const std::size_t n = trace.events.size();
    if (n == 0) {
        out.flagged_empty = true;
        return out;
    }
    // Exact-count rule with an epsilon guard so e.g. 0.1 * 500 does not round
    // up to 51 through floating-point noise.
    auto k = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);

    Rng rng(seed);
    auto idx = rng.sample_without_replacement(static_cast<std::uint32_t>(n),
                                              static_cast<std::uint32_t>(k));
    std::sort(idx.begin(), idx.end());
    out.events.reserve(k);
    for (std::uint32_t i : idx) out.events.push_back(trace.events[i]);
    out.reindex_seq();
    return out;
}

Ensemble run_ensemble(const SocialNetwork& net, const Partition* part, DiffusionModel model,
                      const CascadeParams& params, std::uint32_t n_sims, std::uint32_t n_samples,
                      M1Mode m1_mode, bool paired_streams) {
    if (model == DiffusionModel::M4 && part == nullptr)
        throw std::invalid_argument("run_ensemble: M4 requires a partition");
    if (n_sims < 1 || n_samples < 1)
        throw std::invalid_argument("run_ensemble: n_sims and n_samples must be >= 1");

    const auto model_idx = static_cast<std::uint64_t>(model);
    const std::uint64_t sim_stream = paired_streams ? 0x300 : 0x100 + model_idx;
    const std::uint64_t samp_stream = paired_streams ? 0x310 : 0x200 + model_idx;

    Ensemble out;
    out.model = model;
    out.traces.reserve(static_cast<std::size_t>(n_sims) * n_samples);
    for (std::uint32_t sim = 0; sim < n_sims; ++sim) {
        Rng rng = Rng::substream(params.seed, sim_stream, sim);
        MemeTrace raw;
        switch (model) {
            case DiffusionModel::M1: raw = simulate_m1(net, params, m1_mode, rng); break;
            case DiffusionModel::M2: raw = simulate_m2(net, params, rng); break;
            case DiffusionModel::M3: raw = simulate_m3(net, params, rng); break;
            case DiffusionModel::M4: raw = simulate_m4(net, *part, params, rng); break;
        }
        for (std::uint32_t s = 0; s < n_samples; ++s) {
            const std::uint64_t sub_seed =
                derive_seed(params.seed, samp_stream, static_cast<std::uint64_t>(sim) * 65536 + s);
            MemeTrace t = subsample(raw, params.sample_rate, sub_seed);
            t.meme_id = std::string(model_name(model)) + "_" + std::to_string(sim) + "_" +
                        std::to_string(s);
            if (t.events.empty()) {
                ++out.empty_dropped;
                continue;
            }
            out.traces.push_back({sim, s, std::move(t)});
        }
    }
    return out;
}

}  // namespace memeflow
