#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "memeflow/cascade.hpp"
#include "memeflow/community.hpp"
#include "memeflow/events.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/stats.hpp"
#include "memeflow/types.hpp"

namespace memeflow {

enum class ExposureMode { tweets, users };

struct DominanceResult {
    double value = 0.0;
    CommunityId dominant = 0;
    bool tie = false;
};

// Raw concentration metrics of a single trace.
struct MetricValues {
    std::size_t T = 0;  // tweets
    std::size_t U = 0;  // distinct adopters
    double r = 0.0;     // usage dominance
    double g = 0.0;     // adoption dominance
    double Ht = 0.0;    // usage entropy (nats)
    double Hu = 0.0;    // adoption entropy (nats)
    double Nt = 0.0;    // mean tweet-exposures before first adoption
    double Nu = 0.0;    // mean user-exposures before first adoption
    CommunityId r_dominant = 0;
    CommunityId g_dominant = 0;
    bool r_tie = false;
    bool g_tie = false;
};

struct EnsembleSummary {
    std::size_t n_traces = 0;
    MeanStderr T, U, r, g, Ht, Hu, Nt, Nu;
    std::vector<MetricValues> samples;  // one entry per ensemble trace
};

struct ConcentrationReport {
    std::string meme_id;
    MetricValues raw;
    // Each ratio = raw / M1-ensemble mean; absent when the mean is zero.
    std::optional<double> r_rel, g_rel, Ht_rel, Hu_rel, Nt_rel, Nu_rel;
};

// First min(n, |events|) events; seq values are preserved (prefix property).
MemeTrace early_stage(const MemeTrace& trace, std::size_t n = 50);

// r = share of tweets in the busiest community; ties break to the lowest
// community id and set the tie flag. Throws DataError on an empty trace or
// a user outside the partition.
DominanceResult usage_dominance(const MemeTrace& trace, const Partition& part);

// g = share of distinct adopters in the most-adopting community.
DominanceResult adoption_dominance(const MemeTrace& trace, const Partition& part);

// Ht = -sum_c q_c ln q_c over community tweet shares (0 ln 0 := 0).
double usage_entropy(const MemeTrace& trace, const Partition& part);

// Hu = same over community adopter shares.
double adoption_entropy(const MemeTrace& trace, const Partition& part);

// Mean, over adopters, of the number of exposures strictly before the
// adopter's first event: events by network-neighbors (tweets mode counts
// events, users mode counts distinct neighbor authors).
double average_exposures(const MemeTrace& trace, const SocialNetwork& net, ExposureMode mode);

MetricValues metric_values(const MemeTrace& trace, const SocialNetwork& net,
                           const Partition& part);

// Per-trace metrics on early_stage(trace, early_n), aggregated to
// mean/stderr. Flagged-empty traces must already have been dropped.
EnsembleSummary summarize_ensemble(const Ensemble& ensemble, const SocialNetwork& net,
                                   const Partition& part, std::size_t early_n = 50);

// Raw metrics of `trace` plus ratios against an M1 ensemble baseline.
ConcentrationReport relative_report(const MemeTrace& trace, const SocialNetwork& net,
                                    const Partition& part, const EnsembleSummary& m1_summary);

struct CommunityFlowStats {
    std::optional<double> w_intra_mean;  // absent when the community has no such edges
    std::optional<double> w_inter_mean;
    std::size_t n_intra_edges = 0;
    std::size_t n_inter_edges = 0;
};

struct UserFocus {
    NodeId user = kInvalidNode;
    std::size_t n_events = 0;  // this user's events that ride a network edge
    double f_intra = 0.0;
    double f_inter = 0.0;
};

struct CommunityFlowReport {
    std::vector<CommunityFlowStats> per_community;
    std::vector<UserFocus> per_user;          // users with >= 1 on-edge event, ascending id
    std::vector<double> intra_weights;        // every intra-community network edge
    std::vector<double> inter_weights;        // every inter-community network edge
    std::optional<double> w_intra_mean;
    std::optional<double> w_inter_mean;
    MannWhitneyResult weight_test;            // intra vs. inter edge weights
    MannWhitneyResult focus_test;             // per-user f_intra vs. f_inter
    std::size_t non_adjacent_events = 0;      // actor-target pairs off the network
    std::size_t events_used = 0;
};

// Edge weights = interaction counts per network edge (zero-weight edges
// included); per-community and aggregate intra/inter means plus per-user
// focus fractions. Events between non-adjacent users are counted separately
// and excluded. `kind` filters the log when set.
CommunityFlowReport community_flow(const InteractionLog& log, const SocialNetwork& net,
                                   const Partition& part,
                                   std::optional<InteractionKind> kind = std::nullopt);

// Keeps memes whose prior-period tweet count is below `threshold`
// (memes absent from the history count as 0).
std::vector<MemeTrace> new_meme_filter(const std::vector<MemeTrace>& traces,
                                       const std::unordered_map<std::string, std::size_t>& history,
                                       std::size_t threshold = 20);

struct BinnedPoint {
    double lo = 0.0;  // bin is [lo, hi)
    double hi = 0.0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Buckets (x, y) points into base-2 logarithmic bins on x (x must be >= 1)
// and reports per-bin mean/stderr of y. Empty bins are omitted.
std::vector<BinnedPoint> log2_binned_curve(const std::vector<std::pair<double, double>>& xy);

}  // namespace memeflow
