#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memeflow/community.hpp"
#include "memeflow/events.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/types.hpp"

namespace memeflow {

inline constexpr std::size_t kNumFeatures = 7;
inline constexpr std::size_t kNumBasicFeatures = 2;  // community-blind subset
inline constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "n_early_adopters",     "n_uninfected_neighbors", "n_infected_communities",
    "usage_entropy",        "adoption_entropy",       "frac_intra",
    "frac_intra_present"};

// Early-stage feature vector of one meme. frac_intra is -1 when the meme has
// no early interactions; frac_intra_present is the matching 0/1 indicator.
struct FeatureVector {
    std::string meme_id;
    std::array<double, kNumFeatures> values{};
    bool short_trace = false;     // total trace shorter than the early window
    std::size_t skipped_users = 0;  // adopters missing from the network

    double n_early_adopters() const { return values[0]; }
    double n_uninfected_neighbors() const { return values[1]; }
    double n_infected_communities() const { return values[2]; }
    double usage_entropy() const { return values[3]; }
    double adoption_entropy() const { return values[4]; }
    double frac_intra() const { return values[5]; }
    double frac_intra_present() const { return values[6]; }
};

// Features from the meme's first `n` tweets: distinct early adopters, their
// distinct uninfected (non-adopter) neighbors, communities touched, usage and
// adoption entropy, and the same-community fraction of the meme's early
// interactions. Events after the early window never influence the result.
FeatureVector extract_features(const MemeTrace& trace, const SocialNetwork& net,
                               const Partition& part, const InteractionLog& log,
                               std::size_t n = 50);

struct ViralLabels {
    std::vector<char> viral;  // 1 = viral
    double threshold_value = 0.0;
    std::size_t n_viral = 0;
};

// Viral iff popularity strictly exceeds the theta-th nearest-rank percentile
// of all memes. Throws DataError when fewer than 10 memes are given.
ViralLabels label_viral(const std::vector<double>& popularity, double theta);

struct ForestParams {
    std::uint32_t n_trees = 500;
    std::uint32_t features_per_tree = 4;
    bool per_split_features = false;  // resample candidate features at every split
    std::uint64_t seed = 0;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t label = 0;  // leaf vote
};

struct DecisionTree {
    std::vector<std::uint32_t> features;  // this tree's feature subset
    std::vector<TreeNode> nodes;          // nodes[0] is the root

    int predict(const std::vector<double>& x) const;
};

struct ForestModel {
    ForestParams params;
    std::size_t n_features = 0;
    std::vector<DecisionTree> trees;
    // training metadata
    double theta = 0.0;
    std::string label_mode;

    // Strict-majority vote; ties go to 0 (non-viral).
    int predict(const std::vector<double>& x) const;
    std::size_t positive_votes(const std::vector<double>& x) const;
};

// Bagged Gini decision trees, each grown to purity (min leaf 1) on a
// bootstrap sample over a fixed per-tree feature subset (or per-split
// subsets when params.per_split_features). Throws DataError when the
// training labels hold a single class.
ForestModel train_forest(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                         const ForestParams& params);

struct PRPoint {
    std::optional<double> precision;  // absent when nothing was predicted positive
    double recall = 0.0;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct CVResult {
    PRPoint pooled;                 // micro: counts pooled over folds (primary)
    std::vector<PRPoint> per_fold;  // macro ingredients
    std::optional<double> macro_precision;  // mean over folds where defined
    double macro_recall = 0.0;
};

// Stratified k-fold cross-validation. Each class is shuffled by the seed and
// dealt round-robin, so fold sizes differ by at most one per class. Throws
// DataError (with the counts) when a class has fewer samples than folds.
CVResult cross_validate(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                        std::uint32_t folds, std::uint64_t seed, const ForestParams& params);

struct RandomGuessResult {
    std::size_t n = 0;
    std::size_t n_viral = 0;
    double expected = 0.0;  // n_viral / n: expected precision == recall
    double mean_precision = 0.0;
    double stderr_precision = 0.0;
};

// Monte-Carlo baseline drawing n_viral memes uniformly without replacement
// per trial (precision == recall by construction).
RandomGuessResult baseline_random_guess(const std::vector<char>& y, std::uint64_t seed,
                                        std::uint32_t trials = 1000);

// Same pipeline restricted to the two basic (community-free) features.
CVResult baseline_community_blind(const std::vector<std::vector<double>>& X,
                                  const std::vector<char>& y, std::uint32_t folds,
                                  std::uint64_t seed, const ForestParams& params);

struct GridCell {
    double theta = 0.0;
    char label_mode = 'T';  // 'T' = tweet counts, 'U' = adopter counts
    std::size_t n_viral = 0;
    double threshold_value = 0.0;
    CVResult full;
    CVResult blind;
    RandomGuessResult random;
};

// Precision/recall grid over theta x label-mode for the full model, the
// community-blind baseline, and random guessing.
std::vector<GridCell> evaluate_grid(const std::vector<std::vector<double>>& X,
                                    const std::vector<double>& popularity_tweets,
                                    const std::vector<double>& popularity_users,
                                    const std::vector<double>& thetas, std::uint32_t folds,
                                    std::uint64_t seed, const ForestParams& params);

}  // namespace memeflow
