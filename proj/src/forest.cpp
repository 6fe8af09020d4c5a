#include "memeflow/forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "memeflow/metrics.hpp"
#include "memeflow/rng.hpp"
#include "memeflow/stats.hpp"

namespace memeflow {

FeatureVector extract_features(const MemeTrace& trace, const SocialNetwork& net,
                               const Partition& part, const InteractionLog& log, std::size_t n) {
    if (trace.flagged_empty || trace.events.empty())
        throw DataError("extract_features: empty trace");
    if (part.assignment.size() != net.num_nodes())
        throw DataError("extract_features: partition does not cover the network");

    FeatureVector fv;
    fv.meme_id = trace.meme_id;
    fv.short_trace = trace.events.size() < n;

    MemeTrace early = early_stage(trace, n);

    // Users outside the network are dropped from every feature and counted.
    std::vector<NodeId> missing;
    MemeTrace covered;
    covered.meme_id = early.meme_id;
    for (const auto& e : early.events) {
        if (e.user < net.num_nodes()) {
            covered.events.push_back(e);
        } else {
            missing.push_back(e.user);
        }
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    fv.skipped_users = missing.size();
    if (covered.events.empty()) throw DataError("extract_features: no trace user is in the network");

    const std::vector<NodeId> adopters = covered.adopters();
    fv.values[0] = static_cast<double>(adopters.size());

    std::vector<NodeId> nbrs;
    for (NodeId a : adopters) {
        for (NodeId v : net.neighbors(a)) nbrs.push_back(v);
    }
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    std::vector<NodeId> uninfected;
    std::set_difference(nbrs.begin(), nbrs.end(), adopters.begin(), adopters.end(),
                        std::back_inserter(uninfected));
    fv.values[1] = static_cast<double>(uninfected.size());

    std::vector<CommunityId> comms;
    comms.reserve(adopters.size());
    for (NodeId a : adopters) comms.push_back(part.assignment[a]);
    std::sort(comms.begin(), comms.end());
    comms.erase(std::unique(comms.begin(), comms.end()), comms.end());
    fv.values[2] = static_cast<double>(comms.size());

    fv.values[3] = usage_entropy(covered, part);
    fv.values[4] = adoption_entropy(covered, part);

    // Early-window interactions tagged with this meme: the window closes at
    // the timestamp of the last kept early event.
    const std::int64_t window_end = early.events.back().ts;
    std::size_t total = 0;
    std::size_t intra = 0;
    for (const auto& ev : log.events) {
        if (ev.ts > window_end) continue;
        if (ev.actor >= net.num_nodes() || ev.target >= net.num_nodes()) continue;
        if (std::find(ev.memes.begin(), ev.memes.end(), trace.meme_id) == ev.memes.end()) continue;
        ++total;
        if (part.assignment[ev.actor] == part.assignment[ev.target]) ++intra;
    }
    if (total > 0) {
        fv.values[5] = static_cast<double>(intra) / static_cast<double>(total);
        fv.values[6] = 1.0;
    } else {
        fv.values[5] = -1.0;
        fv.values[6] = 0.0;
    }
    return fv;
}

ViralLabels label_viral(const std::vector<double>& popularity, double theta) {
    if (popularity.size() < 10)
        throw DataError("label_viral: need at least 10 memes for percentile labels");
    ViralLabels out;
    out.threshold_value = nearest_rank_percentile(popularity, theta);
    out.viral.resize(popularity.size());
    for (std::size_t i = 0; i < popularity.size(); ++i) {
        out.viral[i] = popularity[i] > out.threshold_value ? 1 : 0;
        out.n_viral += out.viral[i];
    }
    return out;
}

int DecisionTree::predict(const std::vector<double>& x) const {
    std::int32_t at = 0;
    while (nodes[at].feature >= 0) {
        const TreeNode& nd = nodes[at];
        at = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[at].label;
}

std::size_t ForestModel::positive_votes(const std::vector<double>& x) const {
    std::size_t votes = 0;
    for (const auto& t : trees) votes += static_cast<std::size_t>(t.predict(x));
    return votes;
}

int ForestModel::predict(const std::vector<double>& x) const {
    return 2 * positive_votes(x) > trees.size() ? 1 : 0;
}

namespace {

double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& X;
    const std::vector<char>& y;
    const ForestParams& params;
    std::size_t n_features;
    Rng& rng;
    DecisionTree& tree;

    std::int32_t build(std::vector<std::uint32_t>& idx) {
        std::size_t pos = 0;
        for (std::uint32_t i : idx) pos += static_cast<std::size_t>(y[i]);
        const std::size_t total = idx.size();

        const auto leaf = [&](int label) {
            tree.nodes.push_back({-1, 0.0, -1, -1, label});
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        };
        const int majority = 2 * pos > total ? 1 : 0;  // tie -> non-viral
        if (pos == 0 || pos == total) return leaf(majority);

        const std::vector<std::uint32_t>* candidates = &tree.features;
        std::vector<std::uint32_t> per_split;
        if (params.per_split_features) {
            const auto k = static_cast<std::uint32_t>(
                std::min<std::size_t>(params.features_per_tree, n_features));
            per_split = rng.sample_without_replacement(static_cast<std::uint32_t>(n_features), k);
            std::sort(per_split.begin(), per_split.end());
            candidates = &per_split;
        }

        // Best split: max Gini decrease; ties keep the first candidate
        // feature (ascending index) and the lowest threshold.
        const double parent = gini(pos, total);
        double best_gain = 0.0;
        std::uint32_t best_feature = 0;
        double best_threshold = 0.0;
        std::vector<std::pair<double, char>> vals(total);
        for (std::uint32_t f : *candidates) {
            for (std::size_t i = 0; i < total; ++i) vals[i] = {X[idx[i]][f], y[idx[i]]};
            std::sort(vals.begin(), vals.end());
            std::size_t left_pos = 0;
            for (std::size_t i = 0; i + 1 < total; ++i) {
                left_pos += static_cast<std::size_t>(vals[i].second);
                if (vals[i].first == vals[i + 1].first) continue;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = total - left_n;
                const double weighted =
                    (static_cast<double>(left_n) * gini(left_pos, left_n) +
                     static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
                    static_cast<double>(total);
                const double gain = parent - weighted;
                if (gain > best_gain + 1e-15) {
                    // Midpoint of two adjacent doubles can round up to the
                    // upper value; fall back to the lower one so "x <= t"
                    // always separates the pair.
                    double mid = vals[i].first + 0.5 * (vals[i + 1].first - vals[i].first);
                    if (!(mid < vals[i + 1].first)) mid = vals[i].first;
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = mid;
                }
            }
        }
        if (best_gain <= 0.0) return leaf(majority);

        std::vector<std::uint32_t> left_idx, right_idx;
        for (std::uint32_t i : idx) {
            (X[i][best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
        }
        // The threshold is >= the lower and < the upper of two observed
        // values, so both sides are non-empty.
        const auto node_at = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({static_cast<std::int32_t>(best_feature), best_threshold, -1, -1, 0});
        idx.clear();
        idx.shrink_to_fit();
        const std::int32_t l = build(left_idx);
        const std::int32_t r = build(right_idx);
        tree.nodes[node_at].left = l;
        tree.nodes[node_at].right = r;
        return node_at;
    }
};

}  // namespace

ForestModel train_forest(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                         const ForestParams& params) {
    if (X.empty() || X.size() != y.size())
        throw std::invalid_argument("train_forest: features and labels must align");
    if (params.n_trees < 1) throw std::invalid_argument("train_forest: n_trees must be >= 1");
    const std::size_t n = X.size();
    const std::size_t n_features = X[0].size();
    if (n_features == 0) throw std::invalid_argument("train_forest: no features");

    std::size_t pos = 0;
    for (char label : y) pos += static_cast<std::size_t>(label);
    if (pos == 0 || pos == n)
        throw DataError("train_forest: training set has a single class (" + std::to_string(pos) +
                        " positive of " + std::to_string(n) + ")");

    ForestModel model;
    model.params = params;
    model.n_features = n_features;
    model.trees.resize(params.n_trees);
    const auto k =
        static_cast<std::uint32_t>(std::min<std::size_t>(params.features_per_tree, n_features));

    for (std::uint32_t t = 0; t < params.n_trees; ++t) {
        Rng rng = Rng::substream(params.seed, 0x7265e5u, t);  // per-tree stream
        DecisionTree& tree = model.trees[t];
        tree.features = rng.sample_without_replacement(static_cast<std::uint32_t>(n_features), k);
        std::sort(tree.features.begin(), tree.features.end());

        std::vector<std::uint32_t> boot(n);
        for (auto& b : boot) b = static_cast<std::uint32_t>(rng.below(n));

        TreeBuilder builder{X, y, params, n_features, rng, tree};
        builder.build(boot);
    }
    return model;
}

namespace {

PRPoint pr_from_counts(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    PRPoint p;
    p.tp = tp;
    p.fp = fp;
    p.fn = fn;
    p.tn = tn;
    if (tp + fp > 0) p.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    p.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    return p;
}

}  // namespace

CVResult cross_validate(const std::vector<std::vector<double>>& X, const std::vector<char>& y,
                        std::uint32_t folds, std::uint64_t seed, const ForestParams& params) {
    if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
    if (X.size() != y.size()) throw std::invalid_argument("cross_validate: size mismatch");

    std::vector<std::uint32_t> pos_idx, neg_idx;
    for (std::uint32_t i = 0; i < y.size(); ++i) (y[i] ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < folds || neg_idx.size() < folds)
        throw DataError("cross_validate: class too small to stratify (" +
                        std::to_string(pos_idx.size()) + " positive, " +
                        std::to_string(neg_idx.size()) + " negative, " + std::to_string(folds) +
                        " folds)");

    Rng shuffle_rng = Rng::substream(seed, 0xcfc0u, 0);
    shuffle_rng.shuffle(pos_idx);
    shuffle_rng.shuffle(neg_idx);

    std::vector<std::uint32_t> fold_of(y.size(), 0);
    for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_of[pos_idx[i]] = i % folds;
    for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_of[neg_idx[i]] = i % folds;

    CVResult out;
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::uint32_t k = 0; k < folds; ++k) {
        std::vector<std::vector<double>> x_train;
        std::vector<char> y_train;
        std::vector<std::uint32_t> test_idx;
        for (std::uint32_t i = 0; i < y.size(); ++i) {
            if (fold_of[i] == k) {
                test_idx.push_back(i);
            } else {
                x_train.push_back(X[i]);
                y_train.push_back(y[i]);
            }
        }
        ForestParams fold_params = params;
        fold_params.seed = derive_seed(seed, 0xf01du, k);
        const ForestModel model = train_forest(x_train, y_train, fold_params);

        std::size_t ktp = 0, kfp = 0, kfn = 0, ktn = 0;
        for (std::uint32_t i : test_idx) {
            const int pred = model.predict(X[i]);
            if (pred == 1 && y[i] == 1) ++ktp;
            else if (pred == 1) ++kfp;
            else if (y[i] == 1) ++kfn;
            else ++ktn;
        }
        out.per_fold.push_back(pr_from_counts(ktp, kfp, kfn, ktn));
        tp += ktp;
        fp += kfp;
        fn += kfn;
        tn += ktn;
    }
    out.pooled = pr_from_counts(tp, fp, fn, tn);

    double prec_sum = 0.0, recall_sum = 0.0;
    std::size_t prec_n = 0;
    for (const auto& f : out.per_fold) {
        if (f.precision) {
            prec_sum += *f.precision;
            ++prec_n;
        }
        recall_sum += f.recall;
    }
    if (prec_n > 0) out.macro_precision = prec_sum / static_cast<double>(prec_n);
    out.macro_recall = recall_sum / static_cast<double>(out.per_fold.size());
    return out;
}

RandomGuessResult baseline_random_guess(const std::vector<char>& y, std::uint64_t seed,
                                        std::uint32_t trials) {
    RandomGuessResult out;
    out.n = y.size();
    for (char label : y) out.n_viral += static_cast<std::size_t>(label);
    if (out.n_viral < 1) throw std::invalid_argument("baseline_random_guess: no viral memes");
    out.expected = static_cast<double>(out.n_viral) / static_cast<double>(out.n);

    Rng rng = Rng::substream(seed, 0x93e55u, 0);
    std::vector<double> precisions;
    precisions.reserve(trials);
    for (std::uint32_t t = 0; t < trials; ++t) {
        const auto picked = rng.sample_without_replacement(static_cast<std::uint32_t>(out.n),
                                                           static_cast<std::uint32_t>(out.n_viral));
        std::size_t hits = 0;
        for (std::uint32_t i : picked) hits += static_cast<std::size_t>(y[i]);
        precisions.push_back(static_cast<double>(hits) / static_cast<double>(out.n_viral));
    }
    const MeanStderr ms = mean_stderr(precisions);
    out.mean_precision = ms.mean;
    out.stderr_precision = ms.stderr_;
    return out;
}

CVResult baseline_community_blind(const std::vector<std::vector<double>>& X,
                                  const std::vector<char>& y, std::uint32_t folds,
                                  std::uint64_t seed, const ForestParams& params) {
    std::vector<std::vector<double>> basic(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i].size() < kNumBasicFeatures)
            throw std::invalid_argument("baseline_community_blind: too few columns");
        basic[i].assign(X[i].begin(), X[i].begin() + kNumBasicFeatures);
    }
    ForestParams blind_params = params;
    blind_params.features_per_tree =
        std::min<std::uint32_t>(params.features_per_tree, kNumBasicFeatures);
    return cross_validate(basic, y, folds, seed, blind_params);
}

std::vector<GridCell> evaluate_grid(const std::vector<std::vector<double>>& X,
                                    const std::vector<double>& popularity_tweets,
                                    const std::vector<double>& popularity_users,
                                    const std::vector<double>& thetas, std::uint32_t folds,
                                    std::uint64_t seed, const ForestParams& params) {
    if (X.size() != popularity_tweets.size() || X.size() != popularity_users.size())
        throw std::invalid_argument("evaluate_grid: size mismatch");

    std::vector<GridCell> grid;
    for (const double theta : thetas) {
        for (const char mode : {'T', 'U'}) {
            const auto& pop = mode == 'T' ? popularity_tweets : popularity_users;
            const ViralLabels labels = label_viral(pop, theta);
            GridCell cell;
            cell.theta = theta;
            cell.label_mode = mode;
            cell.n_viral = labels.n_viral;
            cell.threshold_value = labels.threshold_value;
            const std::uint64_t cell_seed =
                derive_seed(seed, 0x911du, static_cast<std::uint64_t>(theta) * 2 + (mode == 'U'));
            cell.full = cross_validate(X, labels.viral, folds, cell_seed, params);
            cell.blind = baseline_community_blind(X, labels.viral, folds, cell_seed, params);
            cell.random = baseline_random_guess(labels.viral, cell_seed);
            grid.push_back(std::move(cell));
        }
    }
    return grid;
}

}  // namespace memeflow
