#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "memeflow/graph.hpp"
#include "memeflow/synth.hpp"
#include "memeflow/types.hpp"

namespace memeflow::pipeline {

// Effective settings of one command invocation: config-file values overlaid
// by command-line flags. The seed is mandatory and never defaulted from the
// clock, so identical configs replay identically.
struct RunConfig {
    std::optional<std::uint64_t> seed;
    std::string out_dir;

    // input paths
    std::string edges_path;
    std::string tweets_path;
    std::string network_path;
    std::string partition_path;
    std::string traces_path;
    std::string interactions_path;
    std::string features_path;

    // graph / community options
    std::string edge_mode = "reciprocal";  // or "as_is"
    std::string algorithm = "louvain";     // or "labelprop"
    double resolution = 1.0;

    // cascade model options
    std::string model = "m2";  // m1..m4
    std::string m1_mode = "tweets";
    double p = 0.85;
    std::uint32_t target_tweets = 50;
    std::uint32_t oversample = 10;
    double sample_rate = 0.10;
    std::uint32_t n_sims = 100;
    std::uint32_t n_samples = 10;

    // metrics options
    std::size_t early_n = 50;
    std::uint32_t m1_sims = 100;     // per-meme M1 baseline ensembles
    std::uint32_t m1_samples = 10;
    std::string kind_filter = "all";  // "all" | "retweet" | "mention"

    // predictor options
    std::vector<double> thetas = {70.0, 80.0, 90.0};
    std::string label_mode = "U";  // "T" | "U"
    double theta = 90.0;
    std::uint32_t folds = 10;
    std::uint32_t n_trees = 500;
    std::uint32_t features_per_tree = 4;
    bool per_split_features = false;
    bool include_short_traces = false;

    // planted world. The default block sizes are deliberately uneven: the
    // size of a touched community then dominates neighbor-count features,
    // decoupling them from how many communities a meme reaches.
    PlantedPartitionSpec planted_network{
        .sizes = {200, 160, 130, 110, 90, 80, 70, 60, 50, 50}};
    PlantedCascadeSpec planted_cascades;

    std::uint32_t threads = 1;  // advisory cap; stages are sequential

    std::uint64_t require_seed() const;
};

// Reads a JSON config file; unknown keys are usage errors.
RunConfig load_config(const std::string& path);

// FNV-1a hash of the canonically serialized effective config.
std::uint64_t config_hash(const RunConfig& cfg);

// A network together with the external names of its nodes (when known).
struct GraphBundle {
    SocialNetwork net;
    IdMap names;
    bool names_are_ids = false;  // node names are their decimal indices
};

GraphBundle load_network(const std::string& path);

// Subcommand bodies. They throw std::invalid_argument for usage errors and
// DataError for bad data; the CLI maps those to exit codes 1 and 2.
void cmd_ingest(const RunConfig& cfg);
void cmd_communities(const RunConfig& cfg);
void cmd_simulate(const RunConfig& cfg);
void cmd_metrics(const RunConfig& cfg);
void cmd_features(const RunConfig& cfg);
void cmd_train(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_synth(const RunConfig& cfg);

// Full synthetic reproduction bundle. Returns true when every built-in
// acceptance check passed (the CLI exits 3 otherwise).
bool cmd_reproduce(const RunConfig& cfg);

}  // namespace memeflow::pipeline
