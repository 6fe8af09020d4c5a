#include "memeflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace memeflow {

namespace {

void require_usable(const MemeTrace& trace, const char* op) {
    if (trace.flagged_empty || trace.events.empty())
        throw DataError(std::string(op) + ": empty trace");
}

// Tweet or adopter counts per community.
std::vector<std::size_t> community_counts(const std::vector<NodeId>& users, const Partition& part) {
    std::vector<std::size_t> counts(part.num_communities(), 0);
    for (NodeId u : users) {
        if (u >= part.assignment.size())
            throw DataError("metrics: trace user not covered by the partition");
        ++counts[part.assignment[u]];
    }
    return counts;
}

std::vector<NodeId> event_users(const MemeTrace& trace) {
    std::vector<NodeId> users;
    users.reserve(trace.events.size());
    for (const auto& e : trace.events) users.push_back(e.user);
    return users;
}

DominanceResult dominance_of(const std::vector<std::size_t>& counts) {
    DominanceResult res;
    std::size_t total = 0;
    std::size_t best = 0;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        total += counts[c];
        if (counts[c] > best) {
            best = counts[c];
            res.dominant = static_cast<CommunityId>(c);
        }
    }
    std::size_t at_max = 0;
    for (std::size_t cnt : counts)
        if (cnt == best) ++at_max;
    res.tie = at_max > 1;
    res.value = static_cast<double>(best) / static_cast<double>(total);
    return res;
}

double entropy_of(const std::vector<std::size_t>& counts) {
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double q = static_cast<double>(c) / static_cast<double>(total);
        h -= q * std::log(q);
    }
    return std::max(h, 0.0);  // clamp -0.0 from the single-community case
}

}  // namespace

MemeTrace early_stage(const MemeTrace& trace, std::size_t n) {
    MemeTrace out;
    out.meme_id = trace.meme_id;
    out.flagged_empty = trace.flagged_empty;
    const std::size_t keep = std::min(n, trace.events.size());
    out.events.assign(trace.events.begin(), trace.events.begin() + static_cast<std::ptrdiff_t>(keep));
    return out;
}

DominanceResult usage_dominance(const MemeTrace& trace, const Partition& part) {
    require_usable(trace, "usage_dominance");
    return dominance_of(community_counts(event_users(trace), part));
}

DominanceResult adoption_dominance(const MemeTrace& trace, const Partition& part) {
    require_usable(trace, "adoption_dominance");
    return dominance_of(community_counts(trace.adopters(), part));
}

double usage_entropy(const MemeTrace& trace, const Partition& part) {
    require_usable(trace, "usage_entropy");
    return entropy_of(community_counts(event_users(trace), part));
}

double adoption_entropy(const MemeTrace& trace, const Partition& part) {
    require_usable(trace, "adoption_entropy");
    return entropy_of(community_counts(trace.adopters(), part));
}

double average_exposures(const MemeTrace& trace, const SocialNetwork& net, ExposureMode mode) {
    require_usable(trace, "average_exposures");

    // First event index per adopter, in adoption order.
    std::map<NodeId, std::size_t> first_idx;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const NodeId u = trace.events[i].user;
        if (u >= net.num_nodes()) throw DataError("average_exposures: trace user not in network");
        first_idx.emplace(u, i);  // keeps the earliest occurrence
    }

    double total = 0.0;
    std::vector<NodeId> seen;
    for (const auto& [u, cut] : first_idx) {
        if (mode == ExposureMode::tweets) {
            std::size_t count = 0;
            for (std::size_t i = 0; i < cut; ++i) {
                if (net.has_edge(u, trace.events[i].user)) ++count;
            }
            total += static_cast<double>(count);
        } else {
            seen.clear();
            for (std::size_t i = 0; i < cut; ++i) {
                const NodeId author = trace.events[i].user;
                if (net.has_edge(u, author)) seen.push_back(author);
            }
            std::sort(seen.begin(), seen.end());
            seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
            total += static_cast<double>(seen.size());
        }
    }
    return total / static_cast<double>(first_idx.size());
}

MetricValues metric_values(const MemeTrace& trace, const SocialNetwork& net,
                           const Partition& part) {
    MetricValues v;
    v.T = trace.events.size();
    v.U = trace.adopter_count();
    const DominanceResult r = usage_dominance(trace, part);
    const DominanceResult g = adoption_dominance(trace, part);
    v.r = r.value;
    v.r_dominant = r.dominant;
    v.r_tie = r.tie;
    v.g = g.value;
    v.g_dominant = g.dominant;
    v.g_tie = g.tie;
    v.Ht = usage_entropy(trace, part);
    v.Hu = adoption_entropy(trace, part);
    v.Nt = average_exposures(trace, net, ExposureMode::tweets);
    v.Nu = average_exposures(trace, net, ExposureMode::users);
    return v;
}

EnsembleSummary summarize_ensemble(const Ensemble& ensemble, const SocialNetwork& net,
                                   const Partition& part, std::size_t early_n) {
    EnsembleSummary out;
    out.samples.reserve(ensemble.traces.size());
    std::vector<double> t, u, r, g, ht, hu, nt, nu;
    for (const auto& et : ensemble.traces) {
        const MemeTrace early = early_stage(et.trace, early_n);
        const MetricValues v = metric_values(early, net, part);
        out.samples.push_back(v);
        t.push_back(static_cast<double>(v.T));
        u.push_back(static_cast<double>(v.U));
        r.push_back(v.r);
        g.push_back(v.g);
        ht.push_back(v.Ht);
        hu.push_back(v.Hu);
        nt.push_back(v.Nt);
        nu.push_back(v.Nu);
    }
    out.n_traces = out.samples.size();
    out.T = mean_stderr(t);
    out.U = mean_stderr(u);
    out.r = mean_stderr(r);
    out.g = mean_stderr(g);
    out.Ht = mean_stderr(ht);
    out.Hu = mean_stderr(hu);
    out.Nt = mean_stderr(nt);
    out.Nu = mean_stderr(nu);
    return out;
}

namespace {

std::optional<double> ratio(double raw, double denom) {
    if (denom == 0.0) return std::nullopt;
    return raw / denom;
}

}  // namespace

ConcentrationReport relative_report(const MemeTrace& trace, const SocialNetwork& net,
                                    const Partition& part, const EnsembleSummary& m1_summary) {
    ConcentrationReport rep;
    rep.meme_id = trace.meme_id;
    rep.raw = metric_values(trace, net, part);
    rep.r_rel = ratio(rep.raw.r, m1_summary.r.mean);
    rep.g_rel = ratio(rep.raw.g, m1_summary.g.mean);
    rep.Ht_rel = ratio(rep.raw.Ht, m1_summary.Ht.mean);
    rep.Hu_rel = ratio(rep.raw.Hu, m1_summary.Hu.mean);
    rep.Nt_rel = ratio(rep.raw.Nt, m1_summary.Nt.mean);
    rep.Nu_rel = ratio(rep.raw.Nu, m1_summary.Nu.mean);
    return rep;
}

CommunityFlowReport community_flow(const InteractionLog& log, const SocialNetwork& net,
                                   const Partition& part, std::optional<InteractionKind> kind) {
    if (part.assignment.size() != net.num_nodes())
        throw DataError("community_flow: partition does not cover the network");

    CommunityFlowReport rep;

    // Interaction counts per network edge, plus per-user intra/inter tallies.
    std::map<std::pair<NodeId, NodeId>, std::size_t> edge_events;
    std::map<NodeId, std::pair<std::size_t, std::size_t>> user_tally;  // intra, inter
    for (const auto& ev : log.events) {
        if (kind && ev.kind != *kind) continue;
        if (ev.actor >= net.num_nodes() || ev.target >= net.num_nodes())
            throw DataError("community_flow: interaction references an unknown user");
        if (!net.has_edge(ev.actor, ev.target)) {
            ++rep.non_adjacent_events;
            continue;
        }
        const auto key = std::minmax(ev.actor, ev.target);
        ++edge_events[{key.first, key.second}];
        auto& tally = user_tally[ev.actor];
        if (part.assignment[ev.actor] == part.assignment[ev.target]) {
            ++tally.first;
        } else {
            ++tally.second;
        }
        ++rep.events_used;
    }

    rep.per_community.resize(part.num_communities());
    std::vector<double> intra_sum(part.num_communities(), 0.0);
    std::vector<double> inter_sum(part.num_communities(), 0.0);

    for (const auto& [u, v] : net.edge_list()) {
        const auto it = edge_events.find({u, v});
        const double w = it == edge_events.end() ? 0.0 : static_cast<double>(it->second);
        const CommunityId cu = part.assignment[u];
        const CommunityId cv = part.assignment[v];
        if (cu == cv) {
            rep.intra_weights.push_back(w);
            intra_sum[cu] += w;
            ++rep.per_community[cu].n_intra_edges;
        } else {
            rep.inter_weights.push_back(w);
            inter_sum[cu] += w;
            inter_sum[cv] += w;
            ++rep.per_community[cu].n_inter_edges;
            ++rep.per_community[cv].n_inter_edges;
        }
    }
    for (std::size_t c = 0; c < rep.per_community.size(); ++c) {
        auto& stats = rep.per_community[c];
        if (stats.n_intra_edges > 0)
            stats.w_intra_mean = intra_sum[c] / static_cast<double>(stats.n_intra_edges);
        if (stats.n_inter_edges > 0)
            stats.w_inter_mean = inter_sum[c] / static_cast<double>(stats.n_inter_edges);
    }
    if (!rep.intra_weights.empty())
        rep.w_intra_mean = mean_stderr(rep.intra_weights).mean;
    if (!rep.inter_weights.empty())
        rep.w_inter_mean = mean_stderr(rep.inter_weights).mean;

    std::vector<double> f_intra, f_inter;
    for (const auto& [user, tally] : user_tally) {
        const std::size_t n_ev = tally.first + tally.second;
        UserFocus focus;
        focus.user = user;
        focus.n_events = n_ev;
        focus.f_intra = static_cast<double>(tally.first) / static_cast<double>(n_ev);
        focus.f_inter = static_cast<double>(tally.second) / static_cast<double>(n_ev);
        f_intra.push_back(focus.f_intra);
        f_inter.push_back(focus.f_inter);
        rep.per_user.push_back(focus);
    }

    if (!rep.intra_weights.empty() && !rep.inter_weights.empty())
        rep.weight_test = mann_whitney(rep.intra_weights, rep.inter_weights);
    if (!f_intra.empty())
        rep.focus_test = mann_whitney(f_intra, f_inter);
    return rep;
}

std::vector<MemeTrace> new_meme_filter(const std::vector<MemeTrace>& traces,
                                       const std::unordered_map<std::string, std::size_t>& history,
                                       std::size_t threshold) {
    std::vector<MemeTrace> kept;
    for (const auto& t : traces) {
        const auto it = history.find(t.meme_id);
        const std::size_t prior = it == history.end() ? 0 : it->second;
        if (prior < threshold) kept.push_back(t);
    }
    return kept;
}

std::vector<BinnedPoint> log2_binned_curve(const std::vector<std::pair<double, double>>& xy) {
    std::map<int, std::vector<double>> bins;
    for (const auto& [x, y] : xy) {
        if (x < 1.0) throw std::invalid_argument("log2_binned_curve: x must be >= 1");
        bins[static_cast<int>(std::floor(std::log2(x)))].push_back(y);
    }
    std::vector<BinnedPoint> out;
    out.reserve(bins.size());
    for (const auto& [k, ys] : bins) {
        BinnedPoint pt;
        pt.lo = std::exp2(k);
        pt.hi = std::exp2(k + 1);
        const MeanStderr ms = mean_stderr(ys);
        pt.mean = ms.mean;
        pt.stderr_ = ms.stderr_;
        pt.n = ys.size();
        out.push_back(pt);
    }
    return out;
}

}  // namespace memeflow
