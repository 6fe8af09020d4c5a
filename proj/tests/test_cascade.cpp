#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "memeflow/cascade.hpp"
#include "memeflow/metrics.hpp"
#include "memeflow/rng.hpp"
#include "memeflow/synth.hpp"

using namespace memeflow;

namespace {

SocialNetwork triangle() { return SocialNetwork::from_edges(3, {{0, 1}, {0, 2}, {1, 2}}); }

SocialNetwork two_cliques_bridge(NodeId clique_size) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < clique_size; ++u)
        for (NodeId v = u + 1; v < clique_size; ++v) edges.emplace_back(u, v);
    for (NodeId u = clique_size; u < 2 * clique_size; ++u)
        for (NodeId v = u + 1; v < 2 * clique_size; ++v) edges.emplace_back(u, v);
    edges.emplace_back(clique_size - 1, clique_size);
    return SocialNetwork::from_edges(2 * clique_size, edges);
}

CascadeParams params(double p, std::uint32_t target, std::uint32_t oversample = 1) {
    CascadeParams cp;
    cp.p = p;
    cp.target_tweets = target;
    cp.oversample_factor = oversample;
    return cp;
}

std::vector<NodeId> users_of(const MemeTrace& t) {
    std::vector<NodeId> us;
    us.reserve(t.events.size());
    for (const auto& e : t.events) us.push_back(e.user);
    return us;
}

}  // namespace

TEST_CASE("CascadeParams::validate rejects bad settings") {
    CHECK_THROWS_AS(params(1.1, 50).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(-0.1, 50).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(0.5, 0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(0.5, 50, 0).validate(), std::invalid_argument);
    auto cp = params(0.5, 50);
    cp.sample_rate = 0.0;
    CHECK_THROWS_AS(cp.validate(), std::invalid_argument);
    cp.sample_rate = 1.5;
    CHECK_THROWS_AS(cp.validate(), std::invalid_argument);
}

TEST_CASE("M1 users mode: n=100, 100 raw events -> every node adopts exactly once") {
    auto net = SocialNetwork::from_edges(100, {});
    Rng rng(1);
    auto trace = simulate_m1(net, params(0.85, 100), M1Mode::users, rng);
    REQUIRE(trace.events.size() == 100);
    auto us = users_of(trace);
    std::sort(us.begin(), us.end());
    for (NodeId u = 0; u < 100; ++u) CHECK(us[u] == u);
    for (std::uint32_t i = 0; i < 100; ++i) {
        CHECK(trace.events[i].seq == i);
        CHECK(trace.events[i].ts == static_cast<std::int64_t>(i));
    }
}

TEST_CASE("M1 tweets mode: event count equals the raw budget") {
    auto net = SocialNetwork::from_edges(10, {});
    Rng rng(2);
    auto trace = simulate_m1(net, params(0.85, 50), M1Mode::tweets, rng);
    CHECK(trace.events.size() == 50);
    auto t2 = simulate_m1(net, params(0.85, 50, 10), M1Mode::tweets, rng);
    CHECK(t2.events.size() == 500);
}

TEST_CASE("M1 users mode needs budget <= population; empty network rejected") {
    auto net = SocialNetwork::from_edges(10, {});
    Rng rng(3);
    CHECK_THROWS_AS(simulate_m1(net, params(0.85, 11), M1Mode::users, rng), DataError);
    SocialNetwork empty;
    CHECK_THROWS_AS(simulate_m1(empty, params(0.85, 5), M1Mode::tweets, rng), DataError);
}

TEST_CASE("M1 users mode community counts match the binomial oracle") {
    // 10^4 nodes in 10 equal communities; 50 draws without replacement.
    // Adopters landing in community 0 per run ~ Binomial(50, 0.1) up to a
    // without-replacement correction that only shrinks the variance, so the
    // binomial 3-sigma band on the mean over 1000 runs is conservative.
    auto net = SocialNetwork::from_edges(10000, {});
    const auto cp = params(0.85, 50);
    const int runs = 1000;
    double total_in_c0 = 0.0;
    for (int rep = 0; rep < runs; ++rep) {
        Rng rng = Rng::substream(424242, 0xb1, static_cast<std::uint64_t>(rep));
        auto trace = simulate_m1(net, cp, M1Mode::users, rng);
        for (const auto& e : trace.events) {
            if (e.user < 1000) total_in_c0 += 1.0;
        }
    }
    const double mean = total_in_c0 / runs;
    const double sigma_mean = std::sqrt(50.0 * 0.1 * 0.9 / runs);
    CHECK(std::fabs(mean - 5.0) <= 3.0 * sigma_mean);
}

TEST_CASE("M2 path graph: with p=1 the second event is the seed's only neighbor") {
    auto net = SocialNetwork::from_edges(3, {{0, 1}, {1, 2}});
    auto cp = params(1.0, 2);
    cp.initial_seed = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng = Rng::substream(7, 0x7a, s);
        auto trace = simulate_m2(net, cp, rng);
        REQUIRE(trace.events.size() == 2);
        CHECK(trace.events[0].user == 0);
        CHECK(trace.events[1].user == 1);
    }
}

TEST_CASE("M2 triangle: distinct-adopter distribution matches exhaustive enumeration") {
    // p=1, fixed seed node, 3 events. Enumerating the random choices: the
    // second event always infects a new node; the third is new with
    // probability 1/2 (each spreader choice offers one fresh and one stale
    // neighbor). So P(3 distinct adopters) = 1/2 exactly.
    auto net = triangle();
    auto cp = params(1.0, 3);
    cp.initial_seed = 0;
    const int runs = 4000;
    int three_distinct = 0;
    for (int rep = 0; rep < runs; ++rep) {
        Rng rng = Rng::substream(99, 0x7b, static_cast<std::uint64_t>(rep));
        auto trace = simulate_m2(net, cp, rng);
        if (trace.adopter_count() == 3) ++three_distinct;
    }
    const double sigma = std::sqrt(runs * 0.25);
    CHECK(std::fabs(three_distinct - runs / 2.0) <= 3.0 * sigma);
}

TEST_CASE("M2 star K_1,10: leaf event counts are uniform within 3 sigma") {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId leaf = 1; leaf <= 10; ++leaf) edges.emplace_back(0, leaf);
    auto net = SocialNetwork::from_edges(11, edges);
    auto cp = params(1.0, 3000);
    cp.initial_seed = 0;
    Rng rng = Rng::substream(5, 0x7c, 0);
    auto trace = simulate_m2(net, cp, rng);

    std::vector<std::size_t> leaf_events(11, 0);
    for (const auto& e : trace.events) ++leaf_events[e.user];
    std::size_t total_leaf = 0;
    for (NodeId leaf = 1; leaf <= 10; ++leaf) total_leaf += leaf_events[leaf];
    // at p=1 every event is a spread; the hub tweets whenever a leaf is the
    // spreader, so leaves collectively see ~1/11 of the 3000 events
    REQUIRE(total_leaf > 150);
    const double expect = static_cast<double>(total_leaf) / 10.0;
    const double sigma = std::sqrt(static_cast<double>(total_leaf) * 0.1 * 0.9);
    for (NodeId leaf = 1; leaf <= 10; ++leaf) {
        CHECK(std::fabs(static_cast<double>(leaf_events[leaf]) - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("M2 with p=0 restarts on every event") {
    auto net = triangle();
    SimDebug dbg;
    Rng rng = Rng::substream(11, 0x7d, 0);
    auto trace = simulate_m2(net, params(0.0, 10), rng, &dbg);
    REQUIRE(trace.events.size() == 10);
    REQUIRE(dbg.is_restart.size() == 10);
    for (bool r : dbg.is_restart) CHECK(r);
}

TEST_CASE("M3 argmax and tie rules") {
    // 0-1, 0-2, 1-2, 1-3; seed 0, p=1. Event 1: candidates {1,2} tie on one
    // infected neighbor -> lowest id 1. Event 2: node 2 then has two infected
    // neighbors, everyone else one -> unique argmax 2.
    auto net = SocialNetwork::from_edges(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}});
    auto cp = params(1.0, 3);
    cp.initial_seed = 0;
    Rng rng = Rng::substream(1, 0x7e, 0);
    auto trace = simulate_m3(net, cp, rng);
    REQUIRE(trace.events.size() == 3);
    CHECK(trace.events[0].user == 0);
    CHECK(trace.events[1].user == 1);  // tie -> lowest NodeId
    CHECK(trace.events[2].user == 2);  // unique argmax
}

TEST_CASE("M3 two 4-cliques + bridge: first clique fills before anything else") {
    auto net = two_cliques_bridge(4);
    auto cp = params(1.0, 8);
    cp.initial_seed = 0;
    Rng rng = Rng::substream(2, 0x7e, 1);
    auto trace = simulate_m3(net, cp, rng);
    REQUIRE(trace.events.size() == 8);
    CHECK(users_of(trace) == std::vector<NodeId>{0, 1, 2, 3, 0, 0, 0, 0});
    for (NodeId a : trace.adopters()) CHECK(a < 4);
}

TEST_CASE("M3 spread steps draw nothing from the stream") {
    // With p=1 and a fixed initial seed the whole trace is a deterministic
    // function of the graph, so two unrelated streams must agree.
    auto net = two_cliques_bridge(4);
    auto cp = params(1.0, 8);
    cp.initial_seed = 0;
    Rng ra(111), rb(999);
    auto ta = simulate_m3(net, cp, ra);
    auto tb = simulate_m3(net, cp, rb);
    CHECK(users_of(ta) == users_of(tb));
}

TEST_CASE("M3 without candidates restarts") {
    auto net = SocialNetwork::from_edges(3, {{0, 1}});  // node 2 isolated
    auto cp = params(1.0, 4);
    cp.initial_seed = 2;
    SimDebug dbg;
    Rng rng = Rng::substream(3, 0x7e, 2);
    auto trace = simulate_m3(net, cp, rng, &dbg);
    REQUIRE(trace.events.size() == 4);
    CHECK(dbg.is_restart[0]);
    CHECK(dbg.is_restart[1]);  // isolated seed forces a fresh draw
}

TEST_CASE("M4 stays inside the seed community when no restart happens") {
    auto net = two_cliques_bridge(4);
    Partition part;
    part.assignment = {0, 0, 0, 0, 1, 1, 1, 1};
    auto cp = params(1.0, 20);
    cp.initial_seed = 0;
    Rng rng = Rng::substream(4, 0x7f, 0);
    auto trace = simulate_m4(net, part, cp, rng);
    for (NodeId a : trace.adopters()) CHECK(a < 4);
}

TEST_CASE("M4 on a single-community graph replays M2 trace-for-trace") {
    Rng gen(2024);
    std::vector<std::pair<NodeId, NodeId>> edges;
    const NodeId n = 30;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (gen.bernoulli(0.2)) edges.emplace_back(u, v);
    if (edges.empty()) edges.emplace_back(0, 1);
    auto net = SocialNetwork::from_edges(n, edges);
    Partition one;
    one.assignment.assign(n, 0);

    auto cp = params(0.85, 50, 2);
    Rng ra = Rng::substream(5, 0x80, 0);
    Rng rb = Rng::substream(5, 0x80, 0);
    auto m2 = simulate_m2(net, cp, ra);
    auto m4 = simulate_m4(net, one, cp, rb);
    REQUIRE(m2.events.size() == m4.events.size());
    for (std::size_t i = 0; i < m2.events.size(); ++i) {
        CHECK(m2.events[i].user == m4.events[i].user);
        CHECK(m2.events[i].seq == m4.events[i].seq);
    }
}

TEST_CASE("M4 concentrates at least as hard as M2 on a planted graph") {
    PlantedPartitionSpec spec;
    spec.n = 200;
    spec.k = 4;
    spec.p_in = 0.15;
    spec.p_out = 0.01;
    spec.seed = 77;
    auto world = gen_network(spec);

    auto cp = params(0.85, 50, 10);
    cp.seed = 31;
    auto e2 = run_ensemble(world.net, nullptr, DiffusionModel::M2, cp, 100, 1,
                           M1Mode::tweets, true);
    auto e4 = run_ensemble(world.net, &world.ground_truth, DiffusionModel::M4, cp, 100, 1,
                           M1Mode::tweets, true);
    auto s2 = summarize_ensemble(e2, world.net, world.ground_truth, 50);
    auto s4 = summarize_ensemble(e4, world.net, world.ground_truth, 50);
    CHECK(s4.r.mean >= s2.r.mean);
}

TEST_CASE("cascades on an edgeless graph are rejected") {
    auto net = SocialNetwork::from_edges(5, {});
    Rng rng(1);
    CHECK_THROWS_AS(simulate_m2(net, params(0.85, 5), rng), DataError);
    CHECK_THROWS_AS(simulate_m3(net, params(0.85, 5), rng), DataError);
    Partition p = Partition::singletons(5);
    CHECK_THROWS_AS(simulate_m4(net, p, params(0.85, 5), rng), DataError);
}

TEST_CASE("initial seed must be a node") {
    auto net = triangle();
    auto cp = params(1.0, 3);
    cp.initial_seed = 3;
    Rng rng(1);
    CHECK_THROWS_AS(simulate_m2(net, cp, rng), DataError);
}

TEST_CASE("subsample keeps the exact count") {
    MemeTrace t;
    t.meme_id = "x";
    for (std::uint32_t i = 0; i < 500; ++i)
        t.events.push_back({i % 7, i, static_cast<std::int64_t>(i)});

    SUBCASE("rate=1 -> identical trace") {
        auto s = subsample(t, 1.0, 9);
        REQUIRE(s.events.size() == 500);
        for (std::size_t i = 0; i < 500; ++i) {
            CHECK(s.events[i].user == t.events[i].user);
            CHECK(s.events[i].seq == t.events[i].seq);
        }
    }
    SUBCASE("500 events at rate 0.1 -> exactly 50") {
        CHECK(subsample(t, 0.1, 9).events.size() == 50);
    }
    SUBCASE("count rule: ceil with epsilon guard, clamped to [1, n]") {
        MemeTrace small;
        for (std::uint32_t i = 0; i < 50; ++i) small.events.push_back({0, i, i});
        CHECK(subsample(small, 0.1, 1).events.size() == 5);  // 0.1*50 stays 5
        MemeTrace ten;
        for (std::uint32_t i = 0; i < 10; ++i) ten.events.push_back({0, i, i});
        CHECK(subsample(ten, 0.05, 1).events.size() == 1);   // ceil(0.5) = 1
        CHECK(subsample(ten, 1.0, 1).events.size() == 10);
        MemeTrace one;
        one.events.push_back({0, 0, 0});
        CHECK(subsample(one, 0.01, 1).events.size() == 1);   // floor of 1
    }
    SUBCASE("bad rates rejected") {
        CHECK_THROWS_AS(subsample(t, 0.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(subsample(t, 1.01, 1), std::invalid_argument);
    }
    SUBCASE("empty input -> flagged") {
        MemeTrace e;
        CHECK(subsample(e, 0.5, 1).flagged_empty);
    }
}

TEST_CASE("subsample preserves order, reindexes seq, keeps ts") {
    MemeTrace t;
    for (std::uint32_t i = 0; i < 100; ++i)
        t.events.push_back({i, i, static_cast<std::int64_t>(i)});
    auto s = subsample(t, 0.37, 123);
    REQUIRE(s.events.size() == 37);
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        CHECK(s.events[i].seq == i);                       // reindexed
        CHECK(s.events[i].ts == s.events[i].user);         // ts kept from input
        if (i > 0) CHECK(s.events[i].user > s.events[i - 1].user);  // subsequence
    }
}

TEST_CASE("subsample inclusion frequency matches the hypergeometric oracle") {
    // 100 events, keep 10: every event is included with probability 1/10.
    // Over 10^4 independent draws each event's inclusion count is
    // Binomial(10^4, 0.1): 1000 +- 3*sqrt(900).
    MemeTrace t;
    for (std::uint32_t i = 0; i < 100; ++i) t.events.push_back({i, i, i});
    std::vector<int> counts(100, 0);
    const int reps = 10000;
    for (int rep = 0; rep < reps; ++rep) {
        auto s = subsample(t, 0.1, derive_seed(77, 0x55aa, static_cast<std::uint64_t>(rep)));
        for (const auto& e : s.events) ++counts[e.user];
    }
    const double sigma = std::sqrt(reps * 0.1 * 0.9);
    for (int c : counts) CHECK(std::fabs(c - 1000.0) <= 3.0 * sigma);
}

TEST_CASE("run_ensemble: counts, order, and determinism") {
    auto net = two_cliques_bridge(5);
    auto cp = params(0.85, 50, 10);
    cp.seed = 404;
    auto ens = run_ensemble(net, nullptr, DiffusionModel::M2, cp, 100, 10);
    CHECK(ens.traces.size() == 1000);
    CHECK(ens.empty_dropped == 0);
    for (std::size_t i = 0; i < ens.traces.size(); ++i) {
        CHECK(ens.traces[i].sim == i / 10);      // sim-major order
        CHECK(ens.traces[i].sample == i % 10);
        CHECK(ens.traces[i].trace.events.size() == 50);  // ceil(0.1 * 500)
    }
    auto again = run_ensemble(net, nullptr, DiffusionModel::M2, cp, 100, 10);
    for (std::size_t i = 0; i < ens.traces.size(); ++i) {
        CHECK(users_of(ens.traces[i].trace) == users_of(again.traces[i].trace));
    }
}

TEST_CASE("run_ensemble argument errors") {
    auto net = triangle();
    auto cp = params(0.85, 10);
    CHECK_THROWS_AS(run_ensemble(net, nullptr, DiffusionModel::M4, cp, 2, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_ensemble(net, nullptr, DiffusionModel::M2, cp, 0, 2),
                    std::invalid_argument);
}

TEST_CASE("paired streams give M2 and single-community M4 identical ensembles") {
    auto net = two_cliques_bridge(5);
    Partition one;
    one.assignment.assign(net.num_nodes(), 0);
    auto cp = params(0.85, 20, 5);
    cp.seed = 88;
    auto e2 = run_ensemble(net, nullptr, DiffusionModel::M2, cp, 20, 3, M1Mode::tweets, true);
    auto e4 = run_ensemble(net, &one, DiffusionModel::M4, cp, 20, 3, M1Mode::tweets, true);
    REQUIRE(e2.traces.size() == e4.traces.size());
    for (std::size_t i = 0; i < e2.traces.size(); ++i) {
        CHECK(users_of(e2.traces[i].trace) == users_of(e4.traces[i].trace));
    }
}
