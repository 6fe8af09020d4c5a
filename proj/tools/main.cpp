// Command-line front end: one subcommand per pipeline stage, a JSON config
// file with flag overrides (flags win), and fixed exit codes:
//   0 success, 1 usage error, 2 data error, 3 acceptance-check failure.
#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "memeflow/pipeline.hpp"
#include "memeflow/types.hpp"

namespace {

namespace mp = memeflow::pipeline;

struct FlagValues {
    std::string config_path;
    std::uint64_t seed = 0;
    mp::RunConfig v;  // staging area for flag-supplied values
};

void add_options(CLI::App* s, FlagValues& f) {
    s->add_option("--config", f.config_path, "JSON config file (flags override it)");
    s->add_option("--seed", f.seed, "master seed (required; no wall-clock default)");
    s->add_option("--out", f.v.out_dir, "output directory");

    s->add_option("--edges", f.v.edges_path, "follow edge list (TSV)");
    s->add_option("--tweets", f.v.tweets_path, "raw tweets (JSONL)");
    s->add_option("--network", f.v.network_path, "ingested network (TSV)");
    s->add_option("--partition", f.v.partition_path, "community partition (CSV)");
    s->add_option("--traces", f.v.traces_path, "meme traces (JSONL)");
    s->add_option("--interactions", f.v.interactions_path, "interaction log (JSONL)");
    s->add_option("--features", f.v.features_path, "feature table (CSV)");

    s->add_option("--edge-mode", f.v.edge_mode, "reciprocal|as_is (default reciprocal)");
    s->add_option("--algorithm", f.v.algorithm, "louvain|labelprop (default louvain)");
    s->add_option("--resolution", f.v.resolution, "louvain resolution (default 1.0)");

    s->add_option("--model", f.v.model, "m1|m2|m3|m4 (default m2)");
    s->add_option("--m1-mode", f.v.m1_mode, "tweets|users (default tweets)");
    s->add_option("--p", f.v.p, "cascade continuation probability (default 0.85)");
    s->add_option("--target-tweets", f.v.target_tweets, "tweets per subsampled trace (default 50)");
    s->add_option("--oversample", f.v.oversample, "oversampling factor (default 10)");
    s->add_option("--sample-rate", f.v.sample_rate, "subsample keep fraction (default 0.10)");
    s->add_option("--n-sims", f.v.n_sims, "simulations per ensemble (default 100)");
    s->add_option("--n-samples", f.v.n_samples, "subsamples per simulation (default 10)");

    s->add_option("--early-n", f.v.early_n, "early-stage window in tweets (default 50)");
    s->add_option("--m1-sims", f.v.m1_sims, "baseline ensemble simulations (default 100)");
    s->add_option("--m1-samples", f.v.m1_samples, "baseline subsamples per simulation (default 10)");
    s->add_option("--kind-filter", f.v.kind_filter, "all|retweet|mention (default all)");

    s->add_option("--thetas", f.v.thetas, "percentile grid (default 70,80,90)")->delimiter(',');
    s->add_option("--label-mode", f.v.label_mode, "T|U: popularity axis for labels (default U)");
    s->add_option("--theta", f.v.theta, "viral percentile for train/checks (default 90)");
    s->add_option("--folds", f.v.folds, "cross-validation folds (default 10)");
    s->add_option("--n-trees", f.v.n_trees, "forest size (default 500)");
    s->add_option("--features-per-tree", f.v.features_per_tree, "feature subset size (default 4)");
    s->add_flag("--per-split-features", f.v.per_split_features,
                "resample candidate features at every split");
    s->add_flag("--include-short-traces", f.v.include_short_traces,
                "keep short-trace rows when training/evaluating");
    s->add_option("--threads", f.v.threads, "advisory thread cap (stages are sequential)");
}

mp::RunConfig effective_config(const CLI::App* sub, const FlagValues& f) {
    mp::RunConfig cfg;
    if (sub->count("--config") > 0) cfg = mp::load_config(f.config_path);
    const auto given = [&](const char* name) { return sub->count(name) > 0; };

    if (given("--seed")) cfg.seed = f.seed;
    if (given("--out")) cfg.out_dir = f.v.out_dir;
    if (given("--edges")) cfg.edges_path = f.v.edges_path;
    if (given("--tweets")) cfg.tweets_path = f.v.tweets_path;
    if (given("--network")) cfg.network_path = f.v.network_path;
    if (given("--partition")) cfg.partition_path = f.v.partition_path;
    if (given("--traces")) cfg.traces_path = f.v.traces_path;
    if (given("--interactions")) cfg.interactions_path = f.v.interactions_path;
    if (given("--features")) cfg.features_path = f.v.features_path;
    if (given("--edge-mode")) cfg.edge_mode = f.v.edge_mode;
    if (given("--algorithm")) cfg.algorithm = f.v.algorithm;
    if (given("--resolution")) cfg.resolution = f.v.resolution;
    if (given("--model")) cfg.model = f.v.model;
    if (given("--m1-mode")) cfg.m1_mode = f.v.m1_mode;
    if (given("--p")) cfg.p = f.v.p;
    if (given("--target-tweets")) cfg.target_tweets = f.v.target_tweets;
    if (given("--oversample")) cfg.oversample = f.v.oversample;
    if (given("--sample-rate")) cfg.sample_rate = f.v.sample_rate;
    if (given("--n-sims")) cfg.n_sims = f.v.n_sims;
    if (given("--n-samples")) cfg.n_samples = f.v.n_samples;
    if (given("--early-n")) cfg.early_n = f.v.early_n;
    if (given("--m1-sims")) cfg.m1_sims = f.v.m1_sims;
    if (given("--m1-samples")) cfg.m1_samples = f.v.m1_samples;
    if (given("--kind-filter")) cfg.kind_filter = f.v.kind_filter;
    if (given("--thetas")) cfg.thetas = f.v.thetas;
    if (given("--label-mode")) cfg.label_mode = f.v.label_mode;
    if (given("--theta")) cfg.theta = f.v.theta;
    if (given("--folds")) cfg.folds = f.v.folds;
    if (given("--n-trees")) cfg.n_trees = f.v.n_trees;
    if (given("--features-per-tree")) cfg.features_per_tree = f.v.features_per_tree;
    if (given("--per-split-features")) cfg.per_split_features = true;
    if (given("--include-short-traces")) cfg.include_short_traces = true;
    if (given("--threads")) cfg.threads = f.v.threads;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meme virality and community-structure analysis pipeline"};
    app.require_subcommand(1);
    FlagValues f;

    const std::pair<const char*, const char*> subs[] = {
        {"ingest", "build network, trace, and interaction artifacts from raw data"},
        {"communities", "detect communities on an ingested network"},
        {"simulate", "run a diffusion-model ensemble"},
        {"metrics", "per-meme concentration metrics and binned curves"},
        {"features", "early-stage feature extraction"},
        {"train", "train the virality random forest"},
        {"eval", "cross-validated precision/recall grid with baselines"},
        {"synth", "generate a planted network and cascade world"},
        {"reproduce", "self-contained synthetic reproduction with built-in checks"},
    };
    for (const auto& [name, desc] : subs) add_options(app.add_subcommand(name, desc), f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        const mp::RunConfig cfg = effective_config(sub, f);
        if (name == "ingest")
            mp::cmd_ingest(cfg);
        else if (name == "communities")
            mp::cmd_communities(cfg);
        else if (name == "simulate")
            mp::cmd_simulate(cfg);
        else if (name == "metrics")
            mp::cmd_metrics(cfg);
        else if (name == "features")
            mp::cmd_features(cfg);
        else if (name == "train")
            mp::cmd_train(cfg);
        else if (name == "eval")
            mp::cmd_eval(cfg);
        else if (name == "synth")
            mp::cmd_synth(cfg);
        else if (name == "reproduce") {
            if (!mp::cmd_reproduce(cfg)) {
                std::fprintf(stderr, "reproduce: one or more acceptance checks failed\n");
                return 3;
            }
        }
    } catch (const memeflow::DataError& e) {
        std::fprintf(stderr, "%s: data error: %s\n", name.c_str(), e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s: usage error: %s\n", name.c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: error: %s\n", name.c_str(), e.what());
        return 2;
    }
    return 0;
}
