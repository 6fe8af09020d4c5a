// Acceptance gate: exercises the seven release criteria end to end and
// prints exactly one PASS/FAIL line per criterion. Exit code is the number
// of failed criteria, so CI can gate on it directly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "memeflow/cascade.hpp"
#include "memeflow/community.hpp"
#include "memeflow/forest.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/io.hpp"
#include "memeflow/metrics.hpp"
#include "memeflow/pipeline.hpp"
#include "memeflow/rng.hpp"
#include "memeflow/stats.hpp"
#include "memeflow/synth.hpp"
#include "memeflow/types.hpp"

using namespace memeflow;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Records the first failed condition; empty err means the criterion passed.
struct Gate {
    std::string err;

    void check(bool ok, const std::string& what) {
        if (err.empty() && !ok) err = what;
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

PlantedNetwork canonical_world(std::uint64_t seed) {
    PlantedPartitionSpec ns;
    ns.n = 1000;
    ns.k = 10;  // equal 100-node blocks
    ns.p_in = 0.1;
    ns.p_out = 0.002;
    ns.seed = seed;
    return gen_network(ns);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::string("\x01<unreadable>") + path;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string make_temp_dir() {
    std::string tmpl = (fs::temp_directory_path() / "memeflow_accept_XXXXXX").string();
    char* got = mkdtemp(tmpl.data());
    return got ? std::string(got) : std::string();
}

// ---------------------------------------------------------------------------
// criterion 1: diffusion-model concentration ordering

std::string criterion_model_ordering() {
    Gate g;
    const auto t0 = Clock::now();
    const std::uint64_t kSeed = 816001;

    const PlantedNetwork world = canonical_world(kSeed);
    const Partition& part = world.ground_truth;

    const DiffusionModel models[4] = {DiffusionModel::M1, DiffusionModel::M2, DiffusionModel::M3,
                                      DiffusionModel::M4};
    EnsembleSummary sums[4];
    std::vector<double> r[4];
    for (std::size_t i = 0; i < 4; ++i) {
        CascadeParams cp;  // p=0.85, 50 tweets x oversample 10, keep 10%
        cp.seed = derive_seed(kSeed, 0xe0u + i);
        const Ensemble ens =
            run_ensemble(world.net, &part, models[i], cp, 100, 10, M1Mode::tweets);
        sums[i] = summarize_ensemble(ens, world.net, part, 50);
        g.check(sums[i].samples.size() == 1000,
                std::string(model_name(models[i])) + " ensemble is not 100 sims x 10 samples");
        for (const MetricValues& mv : sums[i].samples) r[i].push_back(mv.r);
    }

    const double rm[4] = {sums[0].r.mean, sums[1].r.mean, sums[2].r.mean, sums[3].r.mean};
    g.check(rm[0] < rm[1] && rm[1] < rm[2],
            "mean dominance not ordered m1 < m2 < m3 (" + fmt(rm[0]) + ", " + fmt(rm[1]) + ", " +
                fmt(rm[2]) + ")");
    g.check(rm[1] < rm[3], "mean dominance not ordered m2 < m4 (" + fmt(rm[1]) + " vs " +
                               fmt(rm[3]) + ")");

    const MannWhitneyResult mw21 = mann_whitney(r[1], r[0]);
    const MannWhitneyResult mw32 = mann_whitney(r[2], r[1]);
    const MannWhitneyResult mw42 = mann_whitney(r[3], r[1]);
    g.check(mw21.p_greater < 0.01, "m2 > m1 dominance gap p = " + fmt(mw21.p_greater));
    g.check(mw32.p_greater < 0.01, "m3 > m2 dominance gap p = " + fmt(mw32.p_greater));
    g.check(mw42.p_greater < 0.01, "m4 > m2 dominance gap p = " + fmt(mw42.p_greater));

    const double ht[4] = {sums[0].Ht.mean, sums[1].Ht.mean, sums[2].Ht.mean, sums[3].Ht.mean};
    const double hu[4] = {sums[0].Hu.mean, sums[1].Hu.mean, sums[2].Hu.mean, sums[3].Hu.mean};
    g.check(ht[0] > ht[1] && ht[1] > ht[2] && ht[1] > ht[3],
            "usage entropies not in the reversed order");
    g.check(hu[0] > hu[1] && hu[1] > hu[2] && hu[1] > hu[3],
            "adoption entropies not in the reversed order");

    const double elapsed = seconds_since(t0);
    g.check(elapsed < 120.0, "took " + fmt(elapsed) + " s (budget 120 s)");
    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 2: intra- vs inter-community interaction flow

std::string criterion_flow() {
    Gate g;
    const std::uint64_t kSeed = 816002;

    const PlantedNetwork world = canonical_world(kSeed);
    PlantedCascadeSpec cs;  // defaults: 500 memes, intra rate multiplier 5
    cs.seed = derive_seed(kSeed, 0xa2u);
    const PlantedWorld pw = gen_cascades(world.net, world.ground_truth, cs);

    const CommunityFlowReport flow = community_flow(pw.log, world.net, world.ground_truth);
    g.check(flow.w_intra_mean.has_value() && flow.w_inter_mean.has_value(),
            "edge-weight means undefined");
    if (!g.err.empty()) return g.err;
    g.check(*flow.w_intra_mean > *flow.w_inter_mean,
            "mean intra edge weight " + fmt(*flow.w_intra_mean) + " not above inter " +
                fmt(*flow.w_inter_mean));
    g.check(flow.weight_test.p_greater < 0.001,
            "edge-weight test p = " + fmt(flow.weight_test.p_greater));

    std::vector<double> fi, fe;
    for (const UserFocus& u : flow.per_user) {
        fi.push_back(u.f_intra);
        fe.push_back(u.f_inter);
    }
    g.check(!fi.empty(), "no users with on-edge interactions");
    if (!g.err.empty()) return g.err;
    const double mean_fi = mean_stderr(fi).mean;
    const double mean_fe = mean_stderr(fe).mean;
    g.check(mean_fi > mean_fe, "mean user focus f_intra " + fmt(mean_fi) + " not above f_inter " +
                                   fmt(mean_fe));
    g.check(flow.focus_test.p_greater < 0.001,
            "user-focus test p = " + fmt(flow.focus_test.p_greater));
    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 3: simple/complex dichotomy and entropy-popularity link

std::string criterion_dichotomy() {
    Gate g;
    const std::uint64_t kSeed = 816003;

    const PlantedNetwork world = canonical_world(kSeed);
    PlantedCascadeSpec cs;
    cs.seed = derive_seed(kSeed, 0xa2u);
    const PlantedWorld pw = gen_cascades(world.net, world.ground_truth, cs);

    g.check(pw.memes.size() >= 500, "world holds fewer than 500 memes");

    std::vector<double> touch_simple, touch_complex, early_ht, popularity;
    for (const PlantedMeme& m : pw.memes) {
        (m.is_simple ? touch_simple : touch_complex)
            .push_back(static_cast<double>(m.communities_touched_early));
        const MemeTrace early = early_stage(m.trace, 50);
        early_ht.push_back(usage_entropy(early, world.ground_truth));
        popularity.push_back(static_cast<double>(m.final_popularity));
    }
    g.check(!touch_simple.empty() && !touch_complex.empty(), "one meme class is empty");
    if (!g.err.empty()) return g.err;

    const double med_s = median_of(touch_simple);
    const double med_c = median_of(touch_complex);
    g.check(med_s - med_c >= 2.0, "median early community reach: simple " + fmt(med_s) +
                                      " vs complex " + fmt(med_c) + " (need a gap of 2)");

    const double rho = spearman_rho(early_ht, popularity);
    g.check(rho > 0.3, "entropy-popularity spearman rho = " + fmt(rho));
    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 4: prediction lift over community-blind and random baselines

std::string criterion_prediction() {
    Gate g;
    const auto t0 = Clock::now();
    const std::uint64_t kSeed = 42;

    // same derivations as the reproduce pipeline, so this exercises the
    // exact shipped configuration
    pipeline::RunConfig cfg;
    PlantedPartitionSpec ns = cfg.planted_network;
    ns.seed = derive_seed(kSeed, 0xa1u);
    PlantedCascadeSpec cs = cfg.planted_cascades;
    cs.seed = derive_seed(kSeed, 0xa2u);
    const PlantedNetwork pn = gen_network(ns);
    const PlantedWorld world = gen_cascades(pn.net, pn.ground_truth, cs);
    const Partition part = detect_louvain(pn.net, derive_seed(kSeed, 0xc0u));

    // per-meme interaction sublogs, then early-window features
    std::unordered_map<std::string, InteractionLog> by_meme;
    for (const InteractionEvent& ev : world.log.events)
        for (const std::string& m : ev.memes) by_meme[m].events.push_back(ev);
    static const InteractionLog kEmptyLog;

    std::vector<std::vector<double>> X;
    std::vector<double> pop_tweets, pop_users;
    for (const PlantedMeme& m : world.memes) {
        const auto it = by_meme.find(m.trace.meme_id);
        const InteractionLog& sub = it == by_meme.end() ? kEmptyLog : it->second;
        const FeatureVector fv = extract_features(m.trace, pn.net, part, sub, 50);
        if (fv.short_trace) continue;
        X.emplace_back(fv.values.begin(), fv.values.end());
        pop_tweets.push_back(static_cast<double>(m.trace.events.size()));
        pop_users.push_back(static_cast<double>(m.trace.adopter_count()));
    }
    g.check(X.size() >= 400, "too few usable feature rows: " + std::to_string(X.size()));
    if (!g.err.empty()) return g.err;

    ForestParams fp;  // 500 trees, 4 features per tree
    fp.seed = kSeed;
    const std::vector<GridCell> grid = evaluate_grid(X, pop_tweets, pop_users, {90.0}, 10,
                                                     derive_seed(kSeed, 0xe7a1u), fp);
    const GridCell* cell = nullptr;
    for (const GridCell& c : grid)
        if (c.label_mode == 'U') cell = &c;
    g.check(cell != nullptr, "no adopter-count cell in the grid");
    if (!g.err.empty()) return g.err;

    const double full_p = cell->full.pooled.precision.value_or(0.0);
    const double full_r = cell->full.pooled.recall;
    const double blind_p = cell->blind.pooled.precision.value_or(0.0);
    const double blind_r = cell->blind.pooled.recall;
    const double rand_e = cell->random.expected;

    g.check(std::fabs(rand_e - 0.10) < 0.02,
            "random-guess expectation " + fmt(rand_e) + " is not near 0.10");
    g.check(full_p >= 1.5 * blind_p, "precision lift over blind: " + fmt(full_p) + " vs " +
                                         fmt(blind_p));
    g.check(full_r >= 1.5 * blind_r, "recall lift over blind: " + fmt(full_r) + " vs " +
                                         fmt(blind_r));
    g.check(full_p >= 2.0 * rand_e, "precision " + fmt(full_p) + " below 2x random " +
                                        fmt(rand_e));
    g.check(full_r >= 2.0 * rand_e, "recall " + fmt(full_r) + " below 2x random " + fmt(rand_e));

    const double elapsed = seconds_since(t0);
    g.check(elapsed < 180.0, "took " + fmt(elapsed) + " s (budget 180 s)");
    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 5: closed-form values reproduced to 1e-12

std::string criterion_exact_values() {
    Gate g;
    const double kTol = 1e-12;

    // entropy of a trace spread uniformly over 5 communities is ln 5
    {
        MemeTrace tr;
        for (NodeId u = 0; u < 5; ++u)
            tr.events.push_back({u, u, static_cast<std::int64_t>(u)});
        Partition p;
        p.assignment = {0, 1, 2, 3, 4};
        const double h = usage_entropy(tr, p);
        g.check(std::fabs(h - std::log(5.0)) <= kTol, "uniform-over-5 usage entropy " + fmt(h));
        g.check(std::fabs(h - 1.6094379124341003) <= kTol, "entropy drifts from ln 5");
    }

    // two disjoint triangles split into their components: Q = 1/2
    {
        const auto net = SocialNetwork::from_edges(
            6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
        Partition p;
        p.assignment = {0, 0, 0, 1, 1, 1};
        const double q = modularity(net, p);
        g.check(std::fabs(q - 0.5) <= kTol, "two-clique modularity " + fmt(q));
    }

    // path 0-1-2 adopted in order 0, 2, 1: the middle node saw both prior
    // tweets, the others none, so the mean exposure count is 2/3
    {
        const auto net = SocialNetwork::from_edges(3, {{0, 1}, {1, 2}});
        MemeTrace tr;
        tr.events = {{0, 0, 0}, {2, 1, 1}, {1, 2, 2}};
        const double nt = average_exposures(tr, net, ExposureMode::tweets);
        const double nu = average_exposures(tr, net, ExposureMode::users);
        g.check(std::fabs(nt - 2.0 / 3.0) <= kTol, "path tweet exposures " + fmt(nt));
        g.check(std::fabs(nu - 2.0 / 3.0) <= kTol, "path user exposures " + fmt(nu));
    }

    // 90th-percentile threshold on 100 distinct popularity ranks: 10 viral
    {
        std::vector<double> pop(100);
        for (int i = 0; i < 100; ++i) pop[i] = i + 1;
        const ViralLabels labels = label_viral(pop, 90.0);
        g.check(labels.n_viral == 10,
                "theta=90 on ranks 1..100 marked " + std::to_string(labels.n_viral) + " viral");
        g.check(labels.threshold_value == 90.0, "threshold is not the 90th rank");
    }
    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 6: randomized property suites (1000 cases each)

std::string criterion_properties() {
    Gate g;
    const std::uint64_t kSeed = 816006;
    const int kCases = 1000;
    const double kTol = 1e-12;

    // entropy and dominance bounds on random traces/partitions
    for (int i = 0; i < kCases && g.err.empty(); ++i) {
        Rng rng = Rng::substream(kSeed, 0x61u, i);
        const std::size_t n = 40;
        const std::uint64_t C = 1 + rng.below(8);
        Partition p;
        p.assignment.resize(n);
        for (auto& a : p.assignment) a = static_cast<CommunityId>(rng.below(C));
        MemeTrace tr;
        const std::uint64_t L = 1 + rng.below(60);
        for (std::uint64_t e = 0; e < L; ++e)
            tr.events.push_back({static_cast<NodeId>(rng.below(n)),
                                 static_cast<std::uint32_t>(e), static_cast<std::int64_t>(e)});
        const double ht = usage_entropy(tr, p);
        const double hu = adoption_entropy(tr, p);
        const double r = usage_dominance(tr, p).value;
        const double gv = adoption_dominance(tr, p).value;
        const double hmax = std::log(static_cast<double>(C)) + 1e-9;
        g.check(ht >= -kTol && ht <= hmax, "usage entropy out of [0, ln C] at case " +
                                               std::to_string(i));
        g.check(hu >= -kTol && hu <= hmax, "adoption entropy out of [0, ln C] at case " +
                                               std::to_string(i));
        g.check(r >= 1.0 / static_cast<double>(C) - kTol && r <= 1.0 + kTol,
                "usage dominance out of [1/C, 1] at case " + std::to_string(i));
        g.check(gv >= 1.0 / static_cast<double>(C) - kTol && gv <= 1.0 + kTol,
                "adoption dominance out of [1/C, 1] at case " + std::to_string(i));
    }

    // relabeling communities never changes concentration values
    for (int i = 0; i < kCases && g.err.empty(); ++i) {
        Rng rng = Rng::substream(kSeed, 0x62u, i);
        const std::size_t n = 30;
        const std::uint64_t C = 2 + rng.below(6);
        Partition p;
        p.assignment.resize(n);
        for (auto& a : p.assignment) a = static_cast<CommunityId>(rng.below(C));
        std::vector<CommunityId> perm(C);
        for (std::uint64_t c = 0; c < C; ++c) perm[c] = static_cast<CommunityId>(c);
        rng.shuffle(perm);
        Partition q;
        q.assignment.resize(n);
        for (std::size_t u = 0; u < n; ++u) q.assignment[u] = perm[p.assignment[u]];

        MemeTrace tr;
        const std::uint64_t L = 1 + rng.below(40);
        for (std::uint64_t e = 0; e < L; ++e)
            tr.events.push_back({static_cast<NodeId>(rng.below(n)),
                                 static_cast<std::uint32_t>(e), static_cast<std::int64_t>(e)});
        g.check(std::fabs(usage_entropy(tr, p) - usage_entropy(tr, q)) <= kTol,
                "usage entropy changed under relabeling at case " + std::to_string(i));
        g.check(std::fabs(adoption_entropy(tr, p) - adoption_entropy(tr, q)) <= kTol,
                "adoption entropy changed under relabeling at case " + std::to_string(i));
        const DominanceResult da = usage_dominance(tr, p);
        const DominanceResult db = usage_dominance(tr, q);
        g.check(std::fabs(da.value - db.value) <= kTol,
                "usage dominance changed under relabeling at case " + std::to_string(i));
        if (!da.tie && !db.tie)
            g.check(db.dominant == perm[da.dominant],
                    "dominant community did not track the relabeling at case " +
                        std::to_string(i));
    }

    // full concentration (r = 1) holds exactly when usage entropy is zero
    for (int i = 0; i < kCases && g.err.empty(); ++i) {
        Rng rng = Rng::substream(kSeed, 0x63u, i);
        const std::size_t n = 36;
        const std::uint64_t C = 2 + rng.below(5);
        Partition p;
        p.assignment.resize(n);
        for (std::size_t u = 0; u < n; ++u) p.assignment[u] = static_cast<CommunityId>(u % C);
        MemeTrace tr;
        const std::uint64_t L = 1 + rng.below(30);
        if (i % 2 == 0) {
            // confined: every event from one community's nodes
            const std::uint64_t c = rng.below(C);
            for (std::uint64_t e = 0; e < L; ++e) {
                const auto u = static_cast<NodeId>(c + C * rng.below(n / C));
                tr.events.push_back({u, static_cast<std::uint32_t>(e),
                                     static_cast<std::int64_t>(e)});
            }
        } else {
            for (std::uint64_t e = 0; e < L; ++e)
                tr.events.push_back({static_cast<NodeId>(rng.below(n)),
                                     static_cast<std::uint32_t>(e),
                                     static_cast<std::int64_t>(e)});
        }
        const bool full = usage_dominance(tr, p).value > 1.0 - kTol;
        const bool zero = usage_entropy(tr, p) < kTol;
        g.check(full == zero, "r = 1 and Ht = 0 disagree at case " + std::to_string(i));
    }

    // the community-confined cascade equals the simple cascade when the
    // whole graph is one community, under identical random streams
    for (int i = 0; i < kCases && g.err.empty(); ++i) {
        Rng gen = Rng::substream(kSeed, 0x64u, i);
        const std::uint64_t n = 5 + gen.below(21);
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v = u + 1; v < n; ++v)
                if (gen.bernoulli(0.25)) edges.emplace_back(u, v);
        if (edges.empty()) edges.emplace_back(0, 1);
        const auto net = SocialNetwork::from_edges(static_cast<NodeId>(n), edges);
        Partition one;
        one.assignment.assign(n, 0);

        CascadeParams cp;
        cp.target_tweets = 10;
        cp.oversample_factor = 3;
        Rng ra = Rng::substream(kSeed, 0x65u, i);
        Rng rb = Rng::substream(kSeed, 0x65u, i);
        const MemeTrace a = simulate_m2(net, cp, ra);
        const MemeTrace b = simulate_m4(net, one, cp, rb);
        bool same = a.events.size() == b.events.size();
        for (std::size_t e = 0; same && e < a.events.size(); ++e)
            same = a.events[e].user == b.events[e].user && a.events[e].seq == b.events[e].seq &&
                   a.events[e].ts == b.events[e].ts;
        g.check(same, "confined run diverged from the simple cascade at case " +
                          std::to_string(i));
    }

    // events and interactions after the early window never change features
    PlantedPartitionSpec ns;
    ns.n = 60;
    ns.k = 3;
    ns.p_in = 0.3;
    ns.p_out = 0.05;
    ns.seed = derive_seed(kSeed, 0x66u);
    const PlantedNetwork world = gen_network(ns);
    for (int i = 0; i < kCases && g.err.empty(); ++i) {
        Rng rng = Rng::substream(kSeed, 0x67u, i);
        MemeTrace early;
        early.meme_id = "m";
        for (std::uint32_t e = 0; e < 50; ++e)
            early.events.push_back({static_cast<NodeId>(rng.below(60)), e,
                                    static_cast<std::int64_t>(e)});
        MemeTrace extended = early;
        const std::uint64_t tail = 1 + rng.below(30);
        for (std::uint64_t e = 0; e < tail; ++e)
            extended.events.push_back({static_cast<NodeId>(rng.below(60)),
                                       static_cast<std::uint32_t>(50 + e),
                                       static_cast<std::int64_t>(50 + e)});

        InteractionLog log_early;
        const std::uint64_t n_early = rng.below(6);
        for (std::uint64_t e = 0; e < n_early; ++e)
            log_early.events.push_back({static_cast<NodeId>(rng.below(60)),
                                        static_cast<NodeId>(rng.below(60)),
                                        rng.bernoulli(0.5) ? InteractionKind::retweet
                                                           : InteractionKind::mention,
                                        static_cast<std::int64_t>(rng.below(50)),
                                        {"m"}});
        InteractionLog log_full = log_early;
        const std::uint64_t n_late = rng.below(6);
        for (std::uint64_t e = 0; e < n_late; ++e)
            log_full.events.push_back({static_cast<NodeId>(rng.below(60)),
                                       static_cast<NodeId>(rng.below(60)),
                                       InteractionKind::retweet,
                                       static_cast<std::int64_t>(1000 + rng.below(100)),
                                       {"m"}});

        const FeatureVector fa =
            extract_features(early, world.net, world.ground_truth, log_early, 50);
        const FeatureVector fb =
            extract_features(extended, world.net, world.ground_truth, log_full, 50);
        bool same = fa.skipped_users == fb.skipped_users;
        for (std::size_t k = 0; k < kNumFeatures; ++k) same = same && fa.values[k] == fb.values[k];
        g.check(same, "late events leaked into early features at case " + std::to_string(i));
    }

    return g.err;
}

// ---------------------------------------------------------------------------
// criterion 7: the reproduction bundle is byte-stable per seed

std::string criterion_reproduce() {
    Gate g;
    const std::string dir_a = make_temp_dir();
    const std::string dir_b = make_temp_dir();
    g.check(!dir_a.empty() && !dir_b.empty(), "cannot create temp directories");
    if (!g.err.empty()) return g.err;

    pipeline::RunConfig cfg;
    cfg.seed = 42;
    cfg.out_dir = dir_a;
    const bool ok_a = pipeline::cmd_reproduce(cfg);
    g.check(ok_a, "first run failed its built-in checks");
    cfg.out_dir = dir_b;
    const bool ok_b = pipeline::cmd_reproduce(cfg);
    g.check(ok_b, "second run failed its built-in checks");

    // recursive byte comparison
    auto rel_files = [](const std::string& root) {
        std::vector<std::string> out;
        for (const auto& entry : fs::recursive_directory_iterator(root))
            if (entry.is_regular_file())
                out.push_back(fs::relative(entry.path(), root).string());
        std::sort(out.begin(), out.end());
        return out;
    };
    const std::vector<std::string> files_a = rel_files(dir_a);
    const std::vector<std::string> files_b = rel_files(dir_b);
    g.check(!files_a.empty(), "first run produced no files");
    g.check(files_a == files_b, "runs produced different file sets");
    if (g.err.empty()) {
        for (const std::string& rel : files_a) {
            if (slurp(dir_a + "/" + rel) != slurp(dir_b + "/" + rel)) {
                g.check(false, "file differs between runs: " + rel);
                break;
            }
        }
    }

    // bundle schema spot-checks
    if (g.err.empty()) {
        const std::string csv = slurp(dir_a + "/eval.csv");
        const auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
        g.check(lines == 19, "eval.csv has " + std::to_string(lines) +
                                 " lines (want header + 3 thetas x 2 modes x 3 methods)");
        g.check(csv.rfind("theta,label_mode,method,", 0) == 0, "eval.csv header mismatch");

        const json checks = json::parse(slurp(dir_a + "/acceptance_checks.json"));
        g.check(checks.at("all_passed").get<bool>(), "bundle reports failed checks");
        std::set<std::string> ids;
        for (const json& c : checks.at("checks")) {
            ids.insert(c.at("id").get<std::string>());
            g.check(c.at("pass").get<bool>(),
                    "bundle check failed: " + c.at("id").get<std::string>());
        }
        g.check(ids == std::set<std::string>{"intra_inter_flow", "model_ordering",
                                             "prediction_lift", "virality_dichotomy"},
                "bundle check ids are incomplete");

        const json ens = json::parse(slurp(dir_a + "/ensembles.json"));
        for (const char* key : {"r_m2_gt_m1", "r_m3_gt_m2", "r_m4_gt_m2"}) {
            g.check(ens.at("ordering_tests").contains(key),
                    std::string("ensembles.json lacks ordering test ") + key);
        }
    }

    std::error_code ec;
    fs::remove_all(dir_a, ec);
    fs::remove_all(dir_b, ec);
    return g.err;
}

struct Criterion {
    const char* name;
    std::string (*run)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"model ordering", criterion_model_ordering},
        {"intra/inter flow", criterion_flow},
        {"virality dichotomy", criterion_dichotomy},
        {"prediction lift", criterion_prediction},
        {"exact values", criterion_exact_values},
        {"property suites", criterion_properties},
        {"reproduce determinism", criterion_reproduce},
    };

    int failures = 0;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        std::string err;
        try {
            err = c.run();
        } catch (const std::exception& e) {
            err = std::string("exception: ") + e.what();
        }
        if (err.empty()) {
            std::printf("criterion %d (%s): PASS\n", idx, c.name);
        } else {
            std::printf("criterion %d (%s): FAIL - %s\n", idx, c.name, err.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures;
}
