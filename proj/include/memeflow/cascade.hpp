#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memeflow/community.hpp"
#include "memeflow/events.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/rng.hpp"

namespace memeflow {

// Parameters shared by the four baseline diffusion models. `p` is the
// probability of continuing an ongoing cascade; with probability 1-p the
// process restarts from a fresh uniform-random seed user (the restart event
// itself counts as a tweet). Each simulation produces
// target_tweets * oversample_factor raw events; subsampling then keeps a
// `sample_rate` fraction of them.
struct CascadeParams {
    double p = 0.85;
    std::uint32_t target_tweets = 50;
    std::uint32_t oversample_factor = 10;
    double sample_rate = 0.10;
    std::uint64_t seed = 0;
    std::optional<NodeId> initial_seed;  // fixes the first seed user (tests)

    std::size_t raw_events() const {
        return static_cast<std::size_t>(target_tweets) * oversample_factor;
    }

    void validate() const;
};

enum class M1Mode { tweets, users };

enum class DiffusionModel { M1, M2, M3, M4 };

const char* model_name(DiffusionModel m);

// Per-event provenance for property tests: which raw events were restarts
// (including the initial seed event).
struct SimDebug {
    std::vector<bool> is_restart;
};

// M1: random sampling. `users` mode draws the target number of distinct
// users uniformly without replacement, one event each; `tweets` mode draws
// each event's author uniformly with replacement.
MemeTrace simulate_m1(const SocialNetwork& net, const CascadeParams& params, M1Mode mode, Rng& rng);

// M2: simple cascade. With prob p an infected node is picked uniformly and
// one of its neighbors (uniform) emits an event, becoming infected if new;
// with prob 1-p the process restarts from a uniform-random user.
MemeTrace simulate_m2(const SocialNetwork& net, const CascadeParams& params, Rng& rng,
                      SimDebug* debug = nullptr);

// M3: like M2, but the adopter of a non-restart step is the user with the
// maximum number of infected neighbors (infected users included; ties break
// to the lowest node id). No eligible candidate forces a restart.
MemeTrace simulate_m3(const SocialNetwork& net, const CascadeParams& params, Rng& rng,
                      SimDebug* debug = nullptr);

// M4: like M2, but the chosen neighbor is drawn only from the spreader's
// same-community neighbors; infected users with none are not selectable.
// Shares its engine with M2, so on a single-community partition it consumes
// the random stream identically and reproduces M2 trace-for-trace.
MemeTrace simulate_m4(const SocialNetwork& net, const Partition& part, const CascadeParams& params,
                      Rng& rng, SimDebug* debug = nullptr);

// Convenience overloads deriving the stream from params.seed.
MemeTrace simulate_m1(const SocialNetwork& net, const CascadeParams& params, M1Mode mode);
MemeTrace simulate_m2(const SocialNetwork& net, const CascadeParams& params);
MemeTrace simulate_m3(const SocialNetwork& net, const CascadeParams& params);
MemeTrace simulate_m4(const SocialNetwork& net, const Partition& part, const CascadeParams& params);

// Keeps ceil(rate * |events|) events chosen uniformly without replacement,
// order preserved, seq reindexed from 0. An empty input yields a
// flagged-empty trace.
MemeTrace subsample(const MemeTrace& trace, double rate, std::uint64_t seed);

struct EnsembleTrace {
    std::uint32_t sim = 0;
    std::uint32_t sample = 0;
    MemeTrace trace;
};

struct Ensemble {
    DiffusionModel model = DiffusionModel::M1;
    std::vector<EnsembleTrace> traces;  // n_sims * n_samples, sim-major order
    std::size_t empty_dropped = 0;
};

// Runs n_sims independent simulations (per-sim substreams of params.seed),
// subsamples each n_samples times. `part` is required for M4 and ignored
// otherwise. `paired_streams` makes the per-sim stream ids independent of
// the model so two models can be compared on identical randomness.
Ensemble run_ensemble(const SocialNetwork& net, const Partition* part, DiffusionModel model,
                      const CascadeParams& params, std::uint32_t n_sims = 100,
                      std::uint32_t n_samples = 10, M1Mode m1_mode = M1Mode::tweets,
                      bool paired_streams = false);

}  // namespace memeflow
