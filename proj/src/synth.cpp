#include "memeflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "memeflow/cascade.hpp"
#include "memeflow/metrics.hpp"
#include "memeflow/rng.hpp"
#include "memeflow/stats.hpp"

namespace memeflow {

void PlantedPartitionSpec::validate() const {
    if (n == 0) throw std::invalid_argument("PlantedPartitionSpec: n must be positive");
    if (k == 0) throw std::invalid_argument("PlantedPartitionSpec: k must be positive");
    if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0))
        throw std::invalid_argument("PlantedPartitionSpec: need 0 <= p_out < p_in <= 1");
    if (sizes.empty()) {
        if (n % k != 0)
            throw std::invalid_argument(
                "PlantedPartitionSpec: k must divide n unless sizes are given");
    } else {
        if (sizes.size() != k)
            throw std::invalid_argument("PlantedPartitionSpec: sizes list must have k entries");
        std::uint64_t total = 0;
        for (std::uint32_t s : sizes) {
            if (s == 0) throw std::invalid_argument("PlantedPartitionSpec: zero-size block");
            total += s;
        }
        if (total != n) throw std::invalid_argument("PlantedPartitionSpec: sizes must sum to n");
    }
}

std::vector<std::uint32_t> PlantedPartitionSpec::block_sizes() const {
    if (!sizes.empty()) return sizes;
    return std::vector<std::uint32_t>(k, n / k);
}

PlantedNetwork gen_network(const PlantedPartitionSpec& spec) {
    spec.validate();
    const auto blocks = spec.block_sizes();

    PlantedNetwork out;
    out.ground_truth.assignment.resize(spec.n);
    {
        NodeId next = 0;
        for (std::uint32_t c = 0; c < blocks.size(); ++c) {
            for (std::uint32_t i = 0; i < blocks[c]; ++i) out.ground_truth.assignment[next++] = c;
        }
    }

    Rng rng = Rng::substream(spec.seed, 0x6e6574u, 0);  // "net"
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < spec.n; ++u) {
        for (NodeId v = u + 1; v < spec.n; ++v) {
            const bool intra = out.ground_truth.assignment[u] == out.ground_truth.assignment[v];
            if (rng.bernoulli(intra ? spec.p_in : spec.p_out)) edges.emplace_back(u, v);
        }
    }
    out.net = SocialNetwork::from_edges(spec.n, edges);

    // Expected degrees for the equal-size case (reported for diagnostics).
    const double mean_block = static_cast<double>(spec.n) / static_cast<double>(spec.k);
    out.expected_intra_degree = (mean_block - 1.0) * spec.p_in;
    out.expected_inter_degree = (static_cast<double>(spec.n) - mean_block) * spec.p_out;
    out.low_degree_warning = out.expected_intra_degree + out.expected_inter_degree < 1.0;
    return out;
}

void PlantedCascadeSpec::validate() const {
    if (n_memes < 10) throw std::invalid_argument("PlantedCascadeSpec: n_memes must be >= 10");
    if (simple_fraction < 0.0 || simple_fraction > 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: simple_fraction must be in [0,1]");
    if (alpha <= 1.0) throw std::invalid_argument("PlantedCascadeSpec: alpha must exceed 1");
    if (simple_pop_min < 5 || simple_pop_min > simple_pop_max)
        throw std::invalid_argument("PlantedCascadeSpec: bad simple popularity range");
    if (complex_pop_min < 5 || complex_pop_min > complex_pop_max)
        throw std::invalid_argument("PlantedCascadeSpec: bad complex popularity range");
    if (complex_geom_q <= 0.0 || complex_geom_q >= 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: complex_geom_q must be in (0,1)");
    if (complex_threshold < 2)
        throw std::invalid_argument("PlantedCascadeSpec: complex_threshold must be >= 2");
    if (simple_p < 0.0 || simple_p > 1.0 || complex_p < 0.0 || complex_p > 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: probabilities must be in [0,1]");
    if (match_noise < 0.0) throw std::invalid_argument("PlantedCascadeSpec: match_noise < 0");
    if (interaction_base_rate < 0.0 || interaction_base_rate > 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: interaction_base_rate must be in [0,1]");
    if (intra_rate_multiplier < 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: intra_rate_multiplier must be >= 1");
    if (mention_fraction < 0.0 || mention_fraction > 1.0)
        throw std::invalid_argument("PlantedCascadeSpec: mention_fraction must be in [0,1]");
    if (early_n < 1) throw std::invalid_argument("PlantedCascadeSpec: early_n must be >= 1");
    if (max_retries < 1) throw std::invalid_argument("PlantedCascadeSpec: max_retries must be >= 1");
}

namespace {

std::string meme_name(std::size_t idx) {
    std::string num = std::to_string(idx);
    if (num.size() < 4) num.insert(0, 4 - num.size(), '0');
    return "meme_" + num;
}

// Distinct not-yet-adopting neighbors of a window's adopters — the raw reach
// count a community-blind observer sees. Used to orthogonalize the planted
// popularity signal against it.
double neighbor_reach(const MemeTrace& early, const SocialNetwork& net) {
    std::vector<char> adopter(net.num_nodes(), 0);
    for (const TraceEvent& ev : early.events) adopter[ev.user] = 1;
    std::vector<char> seen(net.num_nodes(), 0);
    for (const TraceEvent& ev : early.events)
        for (const NodeId v : net.neighbors(ev.user)) seen[v] = 1;
    std::size_t count = 0;
    for (NodeId v = 0; v < net.num_nodes(); ++v)
        if (seen[v] && !adopter[v]) ++count;
    return static_cast<double>(count);
}

// Discrete power-law draw with exponent alpha on [lo, hi] (tail mass at the
// truncation point collapses onto hi).
std::uint32_t draw_power_law(Rng& rng, double alpha, std::uint32_t lo, std::uint32_t hi) {
    const double u = rng.unit();
    const double x = static_cast<double>(lo) * std::pow(1.0 - u, -1.0 / (alpha - 1.0));
    if (x >= static_cast<double>(hi)) return hi;
    return std::max(lo, static_cast<std::uint32_t>(x));
}

// Truncated geometric on [lo, hi] by CDF inversion.
std::uint32_t draw_trunc_geometric(Rng& rng, double q, std::uint32_t lo, std::uint32_t hi) {
    const double span = static_cast<double>(hi - lo);
    const double decay = 1.0 - q;
    const double norm = 1.0 - std::pow(decay, span + 1.0);
    const double u = rng.unit();
    const double t = std::floor(std::log(1.0 - u * norm) / std::log(decay));
    const auto offset = static_cast<std::uint32_t>(std::max(0.0, std::min(t, span)));
    return lo + offset;
}

std::size_t communities_in_prefix(const MemeTrace& trace, const Partition& part, std::size_t n) {
    std::vector<CommunityId> seen;
    const std::size_t m = std::min(n, trace.events.size());
    for (std::size_t i = 0; i < m; ++i) seen.push_back(part.assignment[trace.events[i].user]);
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    return seen.size();
}

// Threshold-contagion trace: inside the seed community one infected neighbor
// suffices; outside, `threshold` distinct infected neighbors are required
// (kInfiniteThreshold forbids outside adoption entirely). No restarts — the
// budget not spent on adoptions is spent on repeat events.
MemeTrace run_complex_cascade(const SocialNetwork& net, const Partition& part,
                              const PlantedCascadeSpec& spec, std::uint32_t n_events,
                              const std::vector<std::pair<NodeId, NodeId>>& intra_edges, Rng& rng,
                              CommunityId* seed_community) {
    const auto& seed_edge = intra_edges[rng.below(intra_edges.size())];
    const CommunityId seed_c = part.assignment[seed_edge.first];
    if (seed_community) *seed_community = seed_c;

    MemeTrace trace;
    trace.events.reserve(n_events);
    std::vector<bool> adopted(net.num_nodes(), false);
    std::vector<std::uint32_t> inf_nbrs(net.num_nodes(), 0);
    std::vector<NodeId> adopters;
    std::vector<NodeId> eligible;
    std::vector<std::uint32_t> eligible_pos(net.num_nodes(), 0xffffffffu);

    auto meets_rule = [&](NodeId v) {
        if (part.assignment[v] == seed_c) return inf_nbrs[v] >= 1;
        if (spec.complex_threshold == kInfiniteThreshold) return false;
        return inf_nbrs[v] >= spec.complex_threshold;
    };

    auto drop_eligible = [&](NodeId v) {
        const std::uint32_t pos = eligible_pos[v];
        if (pos == 0xffffffffu) return;
        eligible_pos[eligible.back()] = pos;
        std::swap(eligible[pos], eligible.back());
        eligible.pop_back();
        eligible_pos[v] = 0xffffffffu;
    };

    auto emit = [&](NodeId u) {
        const auto seq = static_cast<std::uint32_t>(trace.events.size());
        trace.events.push_back({u, seq, static_cast<std::int64_t>(seq)});
    };

    auto adopt = [&](NodeId u) {
        adopted[u] = true;
        adopters.push_back(u);
        drop_eligible(u);
        emit(u);
        for (NodeId v : net.neighbors(u)) {
            ++inf_nbrs[v];
            if (!adopted[v] && eligible_pos[v] == 0xffffffffu && meets_rule(v)) {
                eligible_pos[v] = static_cast<std::uint32_t>(eligible.size());
                eligible.push_back(v);
            }
        }
    };

    adopt(seed_edge.first);
    if (trace.events.size() < n_events) adopt(seed_edge.second);

    while (trace.events.size() < n_events) {
        if (rng.bernoulli(spec.complex_p) && !eligible.empty()) {
            adopt(eligible[rng.below(eligible.size())]);
        } else {
            emit(adopters[rng.below(adopters.size())]);
        }
    }
    return trace;
}

// Interactions ride edges of the diffusion: each event after the first picks
// a uniform already-adopted neighbor as its source and logs an interaction
// with probability base_rate (intra-community edges get the multiplier).
// Interaction timestamps use the meme's own event clock.
void add_interactions(const MemeTrace& trace, const SocialNetwork& net, const Partition& part,
                      const PlantedCascadeSpec& spec, Rng& rng, InteractionLog& log) {
    std::vector<std::int64_t> adopted_at(net.num_nodes(), -1);
    std::vector<NodeId> candidates;
    const double intra_rate = std::min(1.0, spec.interaction_base_rate * spec.intra_rate_multiplier);
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const NodeId w = trace.events[i].user;
        if (i > 0) {
            candidates.clear();
            for (NodeId v : net.neighbors(w)) {
                if (adopted_at[v] >= 0 && adopted_at[v] < static_cast<std::int64_t>(i))
                    candidates.push_back(v);
            }
            if (!candidates.empty()) {
                const NodeId source = candidates[rng.below(candidates.size())];
                const bool intra = part.assignment[w] == part.assignment[source];
                if (rng.bernoulli(intra ? intra_rate : spec.interaction_base_rate)) {
                    InteractionEvent ev;
                    ev.actor = w;
                    ev.target = source;
                    ev.kind = rng.bernoulli(spec.mention_fraction) ? InteractionKind::mention
                                                                   : InteractionKind::retweet;
                    ev.ts = trace.events[i].ts;
                    ev.memes.push_back(trace.meme_id);
                    log.events.push_back(std::move(ev));
                }
            }
        }
        if (adopted_at[w] < 0) adopted_at[w] = static_cast<std::int64_t>(i);
    }
}

}  // namespace

PlantedWorld gen_cascades(const SocialNetwork& net, const Partition& part,
                          const PlantedCascadeSpec& spec) {
    spec.validate();
    if (part.assignment.size() != net.num_nodes())
        throw DataError("gen_cascades: partition does not cover the network");
    if (net.num_edges() == 0) throw DataError("gen_cascades: network has no edges");

    const auto n_simple =
        static_cast<std::size_t>(std::llround(spec.simple_fraction * spec.n_memes));
    const std::size_t n_complex = spec.n_memes - n_simple;

    PlantedWorld world;
    world.memes.reserve(spec.n_memes);

    // --- simple memes -----------------------------------------------------
    std::vector<double> early_entropy(n_simple, 0.0);
    std::vector<double> early_reach(n_simple, 0.0);
    for (std::size_t i = 0; i < n_simple; ++i) {
        CascadeParams params;
        params.p = spec.simple_p;
        params.target_tweets = spec.simple_pop_max;
        params.oversample_factor = 1;
        Rng rng = Rng::substream(spec.seed, 0x51u, i);
        PlantedMeme meme;
        meme.trace = simulate_m2(net, params, rng);
        meme.trace.meme_id = meme_name(i);
        meme.is_simple = true;
        meme.seed_community = part.assignment[meme.trace.events.front().user];
        const MemeTrace early = early_stage(meme.trace, spec.early_n);
        early_entropy[i] = usage_entropy(early, part);
        early_reach[i] = neighbor_reach(early, net);
        world.memes.push_back(std::move(meme));
    }

    if (n_simple > 0) {
        // Noisy rank-match on the community-structure part of the early
        // signal: entropy is residualized against raw neighbor reach before
        // ranking, so final popularity tracks how evenly a meme spread over
        // communities rather than how many users it happened to touch.
        // Memes whose early window crossed more communities still receive
        // the larger popularity draws.
        const auto standardize = [](const std::vector<double>& xs) {
            const MeanStderr m = mean_stderr(xs);
            const double sd = m.stderr_ * std::sqrt(static_cast<double>(xs.size()));
            std::vector<double> z(xs.size(), 0.0);
            if (sd > 0.0)
                for (std::size_t i = 0; i < xs.size(); ++i) z[i] = (xs[i] - m.mean) / sd;
            return z;
        };
        const std::vector<double> hz = standardize(early_entropy);
        const std::vector<double> uz = standardize(early_reach);
        double slope = 0.0;
        {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < n_simple; ++i) {
                num += hz[i] * uz[i];
                den += uz[i] * uz[i];
            }
            if (den > 0.0) slope = num / den;
        }
        std::vector<double> resid(n_simple);
        for (std::size_t i = 0; i < n_simple; ++i) resid[i] = hz[i] - slope * uz[i];
        const MeanStderr rm = mean_stderr(resid);
        const double rsd = rm.stderr_ * std::sqrt(static_cast<double>(n_simple));
        Rng noise_rng = Rng::substream(spec.seed, 0x52u, 0);
        std::vector<std::pair<double, std::size_t>> scored(n_simple);
        for (std::size_t i = 0; i < n_simple; ++i) {
            scored[i] = {resid[i] + spec.match_noise * rsd * noise_rng.normal(), i};
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });

        Rng pop_rng = Rng::substream(spec.seed, 0x53u, 0);
        std::vector<std::uint32_t> pops(n_simple);
        for (auto& f : pops) f = draw_power_law(pop_rng, spec.alpha, spec.simple_pop_min, spec.simple_pop_max);
        std::sort(pops.begin(), pops.end(), std::greater<>());

        for (std::size_t rank = 0; rank < n_simple; ++rank) {
            PlantedMeme& meme = world.memes[scored[rank].second];
            meme.final_popularity = pops[rank];
            meme.trace.events.resize(pops[rank]);
        }
    }

    // --- complex memes ----------------------------------------------------
    std::vector<std::pair<NodeId, NodeId>> intra_edges;
    for (const auto& [u, v] : net.edge_list()) {
        if (part.assignment[u] == part.assignment[v]) intra_edges.emplace_back(u, v);
    }
    if (n_complex > 0 && intra_edges.empty())
        throw DataError("gen_cascades: no intra-community edges to seed complex cascades");

    Rng pop_rng = Rng::substream(spec.seed, 0x55u, 0);
    for (std::size_t j = 0; j < n_complex; ++j) {
        const std::uint32_t pop =
            draw_trunc_geometric(pop_rng, spec.complex_geom_q, spec.complex_pop_min, spec.complex_pop_max);
        PlantedMeme meme;
        meme.is_simple = false;
        meme.final_popularity = pop;
        bool ok = false;
        for (std::uint32_t attempt = 0; attempt < spec.max_retries && !ok; ++attempt) {
            Rng rng = Rng::substream(spec.seed, 0x54u, j * 64 + attempt);
            meme.trace = run_complex_cascade(net, part, spec, pop, intra_edges, rng,
                                             &meme.seed_community);
            ok = meme.trace.events.size() >= 5;
        }
        if (!ok) throw DataError("gen_cascades: complex cascade failed to reach 5 events");
        meme.trace.meme_id = meme_name(n_simple + j);
        world.memes.push_back(std::move(meme));
    }

    // --- finalize ---------------------------------------------------------
    for (std::size_t i = 0; i < world.memes.size(); ++i) {
        PlantedMeme& meme = world.memes[i];
        meme.final_popularity = static_cast<std::uint32_t>(meme.trace.events.size());
        meme.communities_touched_early = communities_in_prefix(meme.trace, part, spec.early_n);
        Rng rng = Rng::substream(spec.seed, 0x56u, i);
        add_interactions(meme.trace, net, part, spec, rng, world.log);
    }
    world.log.sort_by_ts();
    return world;
}

}  // namespace memeflow
