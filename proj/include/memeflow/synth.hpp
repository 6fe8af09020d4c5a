#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memeflow/community.hpp"
#include "memeflow/events.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/types.hpp"

namespace memeflow {

// Planted-partition random graph: k equal-size blocks (or explicit sizes),
// intra-block edge probability p_in, inter-block p_out.
struct PlantedPartitionSpec {
    std::uint32_t n = 1000;
    std::uint32_t k = 10;
    double p_in = 0.1;
    double p_out = 0.002;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> sizes;  // optional explicit block sizes (sum == n)

    void validate() const;
    std::vector<std::uint32_t> block_sizes() const;
};

struct PlantedNetwork {
    SocialNetwork net;
    Partition ground_truth;
    double expected_intra_degree = 0.0;
    double expected_inter_degree = 0.0;
    bool low_degree_warning = false;  // expected mean degree < 1
};

PlantedNetwork gen_network(const PlantedPartitionSpec& spec);

// Planted cascade ensemble. Simple memes spread by unrestricted simple
// cascades; their final popularity is a heavy-tailed draw rank-matched to a
// noisy copy of each cascade's early usage entropy, which plants the
// "spreads across communities -> popular" correlation without leaking it
// into adopter-count features. Complex memes spread by threshold dynamics
// confined around a seed community and take small popularity draws.
struct PlantedCascadeSpec {
    std::uint32_t n_memes = 500;
    double simple_fraction = 0.3;

    // simple memes: discrete power law on [simple_pop_min, simple_pop_max]
    double alpha = 2.2;
    std::uint32_t simple_pop_min = 100;
    std::uint32_t simple_pop_max = 2000;
    double simple_p = 0.85;        // cascade continue probability
    double match_noise = 0.3;      // entropy-rank-match noise, in residual-sd units

    // complex memes: truncated geometric on [complex_pop_min, complex_pop_max]
    double complex_geom_q = 0.034;  // per-step stop probability
    std::uint32_t complex_pop_min = 50;
    std::uint32_t complex_pop_max = 120;
    std::uint32_t complex_threshold = 2;  // infected neighbors needed outside the seed community
    double complex_p = 0.85;              // probability an eligible adoption happens vs. a repeat

    // interaction log
    double interaction_base_rate = 0.2;  // per-event chance on inter-community edges
    double intra_rate_multiplier = 5.0;
    double mention_fraction = 0.2;  // remaining interactions are retweets

    std::uint64_t seed = 0;
    std::uint32_t max_retries = 20;
    std::size_t early_n = 50;

    void validate() const;
};

struct PlantedMeme {
    MemeTrace trace;
    bool is_simple = false;
    std::uint32_t final_popularity = 0;  // == trace event count
    CommunityId seed_community = 0;
    std::size_t communities_touched_early = 0;  // distinct communities in first early_n events
};

struct PlantedWorld {
    std::vector<PlantedMeme> memes;
    InteractionLog log;
};

// `complex_threshold` may be set to kInfiniteThreshold to forbid adoption
// outside the seed community entirely.
constexpr std::uint32_t kInfiniteThreshold = 0xffffffffu;

PlantedWorld gen_cascades(const SocialNetwork& net, const Partition& part,
                          const PlantedCascadeSpec& spec);

}  // namespace memeflow
