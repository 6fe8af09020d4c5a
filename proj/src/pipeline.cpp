#include "memeflow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "memeflow/cascade.hpp"
#include "memeflow/community.hpp"
#include "memeflow/forest.hpp"
#include "memeflow/io.hpp"
#include "memeflow/metrics.hpp"
#include "memeflow/rng.hpp"
#include "memeflow/stats.hpp"

namespace memeflow::pipeline {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ms_json(const MeanStderr& m) {
    return json{{"mean", m.mean}, {"stderr", m.stderr_}, {"n", m.n}};
}

json mw_json(const MannWhitneyResult& r) {
    return json{{"u", r.u_a},
                {"z", r.z},
                {"p_greater", r.p_greater},
                {"p_less", r.p_less},
                {"p_two_sided", r.p_two_sided},
                {"n_a", r.n_a},
                {"n_b", r.n_b}};
}

// ---------------------------------------------------------------------------
// config plumbing

json config_json(const RunConfig& cfg) {
    // Everything that affects results, in stable key order. The output
    // directory is deliberately excluded so identical runs into different
    // directories produce byte-identical files.
    json pn{{"n", cfg.planted_network.n},
            {"k", cfg.planted_network.k},
            {"p_in", cfg.planted_network.p_in},
            {"p_out", cfg.planted_network.p_out}};
    if (!cfg.planted_network.sizes.empty()) pn["sizes"] = cfg.planted_network.sizes;

    const PlantedCascadeSpec& pc = cfg.planted_cascades;
    json pcj{{"n_memes", pc.n_memes},
             {"simple_fraction", pc.simple_fraction},
             {"alpha", pc.alpha},
             {"simple_pop_min", pc.simple_pop_min},
             {"simple_pop_max", pc.simple_pop_max},
             {"simple_p", pc.simple_p},
             {"match_noise", pc.match_noise},
             {"complex_geom_q", pc.complex_geom_q},
             {"complex_pop_min", pc.complex_pop_min},
             {"complex_pop_max", pc.complex_pop_max},
             {"complex_threshold", pc.complex_threshold},
             {"complex_p", pc.complex_p},
             {"interaction_base_rate", pc.interaction_base_rate},
             {"intra_rate_multiplier", pc.intra_rate_multiplier},
             {"mention_fraction", pc.mention_fraction},
             {"max_retries", pc.max_retries},
             {"early_n", pc.early_n}};

    json j;
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["edges"] = cfg.edges_path;
    j["tweets"] = cfg.tweets_path;
    j["network"] = cfg.network_path;
    j["partition"] = cfg.partition_path;
    j["traces"] = cfg.traces_path;
    j["interactions"] = cfg.interactions_path;
    j["features"] = cfg.features_path;
    j["edge_mode"] = cfg.edge_mode;
    j["algorithm"] = cfg.algorithm;
    j["resolution"] = cfg.resolution;
    j["model"] = cfg.model;
    j["m1_mode"] = cfg.m1_mode;
    j["p"] = cfg.p;
    j["target_tweets"] = cfg.target_tweets;
    j["oversample"] = cfg.oversample;
    j["sample_rate"] = cfg.sample_rate;
    j["n_sims"] = cfg.n_sims;
    j["n_samples"] = cfg.n_samples;
    j["early_n"] = cfg.early_n;
    j["m1_sims"] = cfg.m1_sims;
    j["m1_samples"] = cfg.m1_samples;
    j["kind_filter"] = cfg.kind_filter;
    j["thetas"] = cfg.thetas;
    j["label_mode"] = cfg.label_mode;
    j["theta"] = cfg.theta;
    j["folds"] = cfg.folds;
    j["n_trees"] = cfg.n_trees;
    j["features_per_tree"] = cfg.features_per_tree;
    j["per_split_features"] = cfg.per_split_features;
    j["include_short_traces"] = cfg.include_short_traces;
    j["threads"] = cfg.threads;
    j["planted_network"] = pn;
    j["planted_cascades"] = pcj;
    return j;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string ensure_out(const RunConfig& cfg) {
    if (cfg.out_dir.empty()) throw std::invalid_argument("an output directory is required (--out)");
    fs::create_directories(cfg.out_dir);
    return cfg.out_dir;
}

void require_input(const std::string& path, const char* what) {
    if (path.empty())
        throw std::invalid_argument(std::string("a ") + what + " path is required (--" + what + ")");
    if (!fs::exists(path))
        throw std::invalid_argument(std::string(what) + " file not found: " + path);
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    json extra = json::object()) {
    json j;
    j["command"] = command;
    j["config"] = config_json(cfg);
    j["config_hash"] = hex64(config_hash(cfg));
    j["seed"] = cfg.require_seed();
    for (auto& [k, v] : extra.items()) j[k] = v;
    io::write_text_file(cfg.out_dir + "/manifest.json", j.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// option parsing

EdgeMode parse_edge_mode(const std::string& s) {
    if (s == "reciprocal") return EdgeMode::reciprocal;
    if (s == "as_is") return EdgeMode::as_is;
    throw std::invalid_argument("unknown edge_mode: " + s + " (expected reciprocal|as_is)");
}

DiffusionModel parse_model(const std::string& s) {
    if (s == "m1") return DiffusionModel::M1;
    if (s == "m2") return DiffusionModel::M2;
    if (s == "m3") return DiffusionModel::M3;
    if (s == "m4") return DiffusionModel::M4;
    throw std::invalid_argument("unknown model: " + s + " (expected m1|m2|m3|m4)");
}

M1Mode parse_m1_mode(const std::string& s) {
    if (s == "tweets") return M1Mode::tweets;
    if (s == "users") return M1Mode::users;
    throw std::invalid_argument("unknown m1_mode: " + s + " (expected tweets|users)");
}

std::optional<InteractionKind> parse_kind_filter(const std::string& s) {
    if (s == "all") return std::nullopt;
    if (s == "retweet") return InteractionKind::retweet;
    if (s == "mention") return InteractionKind::mention;
    throw std::invalid_argument("unknown kind_filter: " + s + " (expected all|retweet|mention)");
}

void validate_label_mode(const std::string& s) {
    if (s != "T" && s != "U")
        throw std::invalid_argument("unknown label_mode: " + s + " (expected T|U)");
}

CascadeParams cascade_params(const RunConfig& cfg, std::uint64_t seed) {
    CascadeParams cp;
    cp.p = cfg.p;
    cp.target_tweets = cfg.target_tweets;
    cp.oversample_factor = cfg.oversample;
    cp.sample_rate = cfg.sample_rate;
    cp.seed = seed;
    cp.validate();
    return cp;
}

NodeId parse_decimal_node(const std::string& s, std::size_t n) {
    if (s.empty()) throw DataError("edge endpoint is empty");
    std::uint64_t v = 0;
    for (const char c : s) {
        if (c < '0' || c > '9')
            throw DataError("edge endpoint is not a decimal node index: " + s);
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
        if (v > std::numeric_limits<NodeId>::max())
            throw DataError("edge endpoint out of range: " + s);
    }
    if (v >= n) throw DataError("edge endpoint exceeds declared node count: " + s);
    return static_cast<NodeId>(v);
}

// ---------------------------------------------------------------------------
// shared report helpers

// One input trace reduced to its analyzable form: events by in-network users,
// cut to the early window for metric purposes.
struct PreppedTrace {
    MemeTrace early;
    std::size_t early_T = 0;
    std::size_t popularity_tweets = 0;  // full unfiltered event count
    std::size_t popularity_users = 0;   // full unfiltered distinct adopters
    std::size_t dropped_events = 0;     // events by users outside the network
};

std::vector<PreppedTrace> prep_traces(const std::vector<MemeTrace>& traces, NodeId n_nodes,
                                      std::size_t early_n) {
    std::vector<PreppedTrace> out;
    out.reserve(traces.size());
    for (const MemeTrace& tr : traces) {
        PreppedTrace pt;
        MemeTrace filtered;
        filtered.meme_id = tr.meme_id;
        for (const TraceEvent& ev : tr.events) {
            if (ev.user < n_nodes)
                filtered.events.push_back(ev);
            else
                ++pt.dropped_events;
        }
        filtered.reindex_seq();
        if (filtered.events.size() < 2)
            throw DataError("empty or sub-minimal trace: " + tr.meme_id);
        pt.early = early_stage(filtered, early_n);
        pt.early_T = pt.early.events.size();
        pt.popularity_tweets = tr.events.size();
        pt.popularity_users = tr.adopter_count();
        out.push_back(std::move(pt));
    }
    return out;
}

// Random-sampling baselines keyed by early tweet count, so each meme is
// compared against an ensemble with the same number of tweets.
std::map<std::size_t, EnsembleSummary> m1_baselines(const SocialNetwork& net,
                                                    const Partition& part,
                                                    const std::vector<PreppedTrace>& prepped,
                                                    const RunConfig& cfg, std::uint64_t seed) {
    std::set<std::size_t> targets;
    for (const PreppedTrace& pt : prepped) targets.insert(pt.early_T);
    const M1Mode mode = parse_m1_mode(cfg.m1_mode);
    std::map<std::size_t, EnsembleSummary> by_target;
    for (const std::size_t t : targets) {
        CascadeParams cp = cascade_params(cfg, derive_seed(seed, 0xb15eu, t));
        cp.target_tweets = static_cast<std::uint32_t>(t);
        const Ensemble ens =
            run_ensemble(net, &part, DiffusionModel::M1, cp, cfg.m1_sims, cfg.m1_samples, mode);
        by_target.emplace(t, summarize_ensemble(ens, net, part, cfg.early_n));
    }
    return by_target;
}

std::string opt_field(const std::optional<double>& v) {
    return v ? io::format_double(*v) : std::string();
}

void write_report_csv(const std::string& path, const std::vector<ConcentrationReport>& reports,
                      const std::vector<PreppedTrace>& prepped) {
    std::string out =
        "meme_id,T,U,r,g,Ht,Hu,Nt,Nu,r_dominant,g_dominant,r_tie,g_tie,"
        "r_rel,g_rel,Ht_rel,Hu_rel,Nt_rel,Nu_rel,popularity_tweets,popularity_users,"
        "dropped_events\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ConcentrationReport& r = reports[i];
        const PreppedTrace& pt = prepped[i];
        out += r.meme_id;
        out += ',' + std::to_string(r.raw.T);
        out += ',' + std::to_string(r.raw.U);
        out += ',' + io::format_double(r.raw.r);
        out += ',' + io::format_double(r.raw.g);
        out += ',' + io::format_double(r.raw.Ht);
        out += ',' + io::format_double(r.raw.Hu);
        out += ',' + io::format_double(r.raw.Nt);
        out += ',' + io::format_double(r.raw.Nu);
        out += ',' + std::to_string(r.raw.r_dominant);
        out += ',' + std::to_string(r.raw.g_dominant);
        out += ',' + std::string(r.raw.r_tie ? "1" : "0");
        out += ',' + std::string(r.raw.g_tie ? "1" : "0");
        out += ',' + opt_field(r.r_rel);
        out += ',' + opt_field(r.g_rel);
        out += ',' + opt_field(r.Ht_rel);
        out += ',' + opt_field(r.Hu_rel);
        out += ',' + opt_field(r.Nt_rel);
        out += ',' + opt_field(r.Nu_rel);
        out += ',' + std::to_string(pt.popularity_tweets);
        out += ',' + std::to_string(pt.popularity_users);
        out += ',' + std::to_string(pt.dropped_events);
        out += '\n';
    }
    io::write_text_file(path, out);
}

void write_curve_csv(const std::string& path, const std::vector<std::pair<double, double>>& xy) {
    std::string out = "bin_lo,bin_hi,mean,stderr,n\n";
    if (!xy.empty()) {
        for (const BinnedPoint& bp : log2_binned_curve(xy)) {
            out += io::format_double(bp.lo);
            out += ',' + io::format_double(bp.hi);
            out += ',' + io::format_double(bp.mean);
            out += ',' + io::format_double(bp.stderr_);
            out += ',' + std::to_string(bp.n);
            out += '\n';
        }
    }
    io::write_text_file(path, out);
}

// Binned concentration-vs-popularity curves: six relative metrics against
// both popularity axes (final tweet and adopter counts).
void write_curves(const std::string& dir, const std::vector<ConcentrationReport>& reports,
                  const std::vector<PreppedTrace>& prepped) {
    fs::create_directories(dir);
    const std::pair<const char*, std::optional<double> ConcentrationReport::*> metrics[] = {
        {"r", &ConcentrationReport::r_rel},   {"g", &ConcentrationReport::g_rel},
        {"Ht", &ConcentrationReport::Ht_rel}, {"Hu", &ConcentrationReport::Hu_rel},
        {"Nt", &ConcentrationReport::Nt_rel}, {"Nu", &ConcentrationReport::Nu_rel}};
    for (const auto& [name, member] : metrics) {
        for (const char axis : {'T', 'U'}) {
            std::vector<std::pair<double, double>> xy;
            for (std::size_t i = 0; i < reports.size(); ++i) {
                const std::optional<double>& rel = reports[i].*member;
                if (!rel) continue;
                const double x = axis == 'T' ? static_cast<double>(prepped[i].popularity_tweets)
                                             : static_cast<double>(prepped[i].popularity_users);
                xy.emplace_back(x, *rel);
            }
            write_curve_csv(dir + "/rel_" + name + "_vs_" + axis + ".csv", xy);
        }
    }
}

json flow_json(const CommunityFlowReport& flow) {
    const MeanStderr fi = mean_stderr([&] {
        std::vector<double> v;
        for (const UserFocus& u : flow.per_user) v.push_back(u.f_intra);
        return v;
    }());
    const MeanStderr fe = mean_stderr([&] {
        std::vector<double> v;
        for (const UserFocus& u : flow.per_user) v.push_back(u.f_inter);
        return v;
    }());
    json per_comm = json::array();
    for (std::size_t c = 0; c < flow.per_community.size(); ++c) {
        const CommunityFlowStats& st = flow.per_community[c];
        per_comm.push_back(json{{"community", c},
                                {"w_intra_mean", opt_num(st.w_intra_mean)},
                                {"w_inter_mean", opt_num(st.w_inter_mean)},
                                {"n_intra_edges", st.n_intra_edges},
                                {"n_inter_edges", st.n_inter_edges}});
    }
    return json{{"events_used", flow.events_used},
                {"non_adjacent_events", flow.non_adjacent_events},
                {"n_intra_edges", flow.intra_weights.size()},
                {"n_inter_edges", flow.inter_weights.size()},
                {"w_intra_mean", opt_num(flow.w_intra_mean)},
                {"w_inter_mean", opt_num(flow.w_inter_mean)},
                {"weight_test", mw_json(flow.weight_test)},
                {"focus",
                 json{{"n_users", flow.per_user.size()},
                      {"mean_f_intra", flow.per_user.empty() ? json(nullptr) : json(fi.mean)},
                      {"mean_f_inter", flow.per_user.empty() ? json(nullptr) : json(fe.mean)},
                      {"test", mw_json(flow.focus_test)}}},
                {"per_community", per_comm}};
}

json summary_metrics_json(const EnsembleSummary& s) {
    return json{{"n_traces", s.n_traces}, {"T", ms_json(s.T)},   {"U", ms_json(s.U)},
                {"r", ms_json(s.r)},      {"g", ms_json(s.g)},   {"Ht", ms_json(s.Ht)},
                {"Hu", ms_json(s.Hu)},    {"Nt", ms_json(s.Nt)}, {"Nu", ms_json(s.Nu)}};
}

// ---------------------------------------------------------------------------
// feature plumbing

struct FeatureBuild {
    std::vector<io::FeatureRow> rows;
    std::size_t skipped_empty = 0;
    std::size_t n_short = 0;
    std::size_t skipped_users_total = 0;
};

FeatureBuild build_feature_rows(const std::vector<MemeTrace>& traces, const SocialNetwork& net,
                                const Partition& part, const InteractionLog& log,
                                std::size_t early_n) {
    // extract_features filters the log by meme id itself; pre-splitting the
    // log per meme just avoids rescanning the full log for every meme.
    std::unordered_map<std::string, InteractionLog> by_meme;
    for (const InteractionEvent& ev : log.events)
        for (const std::string& m : ev.memes) by_meme[m].events.push_back(ev);

    static const InteractionLog kEmptyLog;
    FeatureBuild fb;
    for (const MemeTrace& tr : traces) {
        if (tr.events.empty()) {
            ++fb.skipped_empty;
            continue;
        }
        const auto it = by_meme.find(tr.meme_id);
        const InteractionLog& sub = it == by_meme.end() ? kEmptyLog : it->second;
        io::FeatureRow row;
        row.fv = extract_features(tr, net, part, sub, early_n);
        row.popularity_tweets = static_cast<double>(tr.events.size());
        row.popularity_users = static_cast<double>(tr.adopter_count());
        fb.n_short += row.fv.short_trace ? 1 : 0;
        fb.skipped_users_total += row.fv.skipped_users;
        fb.rows.push_back(std::move(row));
    }
    return fb;
}

struct FeatureMatrix {
    std::vector<std::vector<double>> X;
    std::vector<double> pop_tweets;
    std::vector<double> pop_users;
    std::size_t excluded_short = 0;
};

FeatureMatrix to_matrix(const std::vector<io::FeatureRow>& rows, bool include_short) {
    FeatureMatrix m;
    for (const io::FeatureRow& row : rows) {
        if (row.fv.short_trace && !include_short) {
            ++m.excluded_short;
            continue;
        }
        m.X.emplace_back(row.fv.values.begin(), row.fv.values.end());
        m.pop_tweets.push_back(row.popularity_tweets);
        m.pop_users.push_back(row.popularity_users);
    }
    return m;
}

json pr_json(const PRPoint& p) {
    return json{{"precision", opt_num(p.precision)},
                {"recall", p.recall},
                {"tp", p.tp},
                {"fp", p.fp},
                {"fn", p.fn},
                {"tn", p.tn}};
}

json cv_json(const CVResult& cv) {
    json folds = json::array();
    for (const PRPoint& p : cv.per_fold) folds.push_back(pr_json(p));
    return json{{"pooled", pr_json(cv.pooled)},
                {"per_fold", folds},
                {"macro_precision", opt_num(cv.macro_precision)},
                {"macro_recall", cv.macro_recall}};
}

json random_json(const RandomGuessResult& r) {
    return json{{"n", r.n},
                {"n_viral", r.n_viral},
                {"expected", r.expected},
                {"mean_precision", r.mean_precision},
                {"stderr_precision", r.stderr_precision}};
}

json grid_json(const std::vector<GridCell>& grid) {
    json cells = json::array();
    for (const GridCell& c : grid) {
        cells.push_back(json{{"theta", c.theta},
                             {"label_mode", std::string(1, c.label_mode)},
                             {"n_viral", c.n_viral},
                             {"threshold_value", c.threshold_value},
                             {"full", cv_json(c.full)},
                             {"blind", cv_json(c.blind)},
                             {"random", random_json(c.random)}});
    }
    return cells;
}

std::string grid_csv(const std::vector<GridCell>& grid) {
    std::string out = "theta,label_mode,method,precision,recall,tp,fp,fn,tn,n_viral\n";
    const auto add_cv = [&](const GridCell& c, const char* method, const PRPoint& p) {
        out += io::format_double(c.theta);
        out += ',' + std::string(1, c.label_mode);
        out += ',' + std::string(method);
        out += ',' + opt_field(p.precision);
        out += ',' + io::format_double(p.recall);
        out += ',' + std::to_string(p.tp);
        out += ',' + std::to_string(p.fp);
        out += ',' + std::to_string(p.fn);
        out += ',' + std::to_string(p.tn);
        out += ',' + std::to_string(c.n_viral);
        out += '\n';
    };
    for (const GridCell& c : grid) {
        add_cv(c, "full", c.full.pooled);
        add_cv(c, "blind", c.blind.pooled);
        out += io::format_double(c.theta);
        out += ',' + std::string(1, c.label_mode);
        out += ",random,";
        out += io::format_double(c.random.mean_precision);
        out += ',' + io::format_double(c.random.mean_precision);
        out += ",,,,,";
        out += std::to_string(c.n_viral);
        out += '\n';
    }
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t RunConfig::require_seed() const {
    if (!seed) throw std::invalid_argument("a master seed is required (--seed or config \"seed\")");
    return *seed;
}

RunConfig load_config(const std::string& path) {
    if (!fs::exists(path)) throw std::invalid_argument("config file not found: " + path);
    json j;
    try {
        j = json::parse(io::read_text_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    RunConfig cfg;
    try {
        for (const auto& [key, val] : j.items()) {
            if (key == "seed")
                cfg.seed = val.get<std::uint64_t>();
            else if (key == "out")
                cfg.out_dir = val.get<std::string>();
            else if (key == "edges")
                cfg.edges_path = val.get<std::string>();
            else if (key == "tweets")
                cfg.tweets_path = val.get<std::string>();
            else if (key == "network")
                cfg.network_path = val.get<std::string>();
            else if (key == "partition")
                cfg.partition_path = val.get<std::string>();
            else if (key == "traces")
                cfg.traces_path = val.get<std::string>();
            else if (key == "interactions")
                cfg.interactions_path = val.get<std::string>();
            else if (key == "features")
                cfg.features_path = val.get<std::string>();
            else if (key == "edge_mode")
                cfg.edge_mode = val.get<std::string>();
            else if (key == "algorithm")
                cfg.algorithm = val.get<std::string>();
            else if (key == "resolution")
                cfg.resolution = val.get<double>();
            else if (key == "model")
                cfg.model = val.get<std::string>();
            else if (key == "m1_mode")
                cfg.m1_mode = val.get<std::string>();
            else if (key == "p")
                cfg.p = val.get<double>();
            else if (key == "target_tweets")
                cfg.target_tweets = val.get<std::uint32_t>();
            else if (key == "oversample")
                cfg.oversample = val.get<std::uint32_t>();
            else if (key == "sample_rate")
                cfg.sample_rate = val.get<double>();
            else if (key == "n_sims")
                cfg.n_sims = val.get<std::uint32_t>();
            else if (key == "n_samples")
                cfg.n_samples = val.get<std::uint32_t>();
            else if (key == "early_n")
                cfg.early_n = val.get<std::size_t>();
            else if (key == "m1_sims")
                cfg.m1_sims = val.get<std::uint32_t>();
            else if (key == "m1_samples")
                cfg.m1_samples = val.get<std::uint32_t>();
            else if (key == "kind_filter")
                cfg.kind_filter = val.get<std::string>();
            else if (key == "thetas")
                cfg.thetas = val.get<std::vector<double>>();
            else if (key == "label_mode")
                cfg.label_mode = val.get<std::string>();
            else if (key == "theta")
                cfg.theta = val.get<double>();
            else if (key == "folds")
                cfg.folds = val.get<std::uint32_t>();
            else if (key == "n_trees")
                cfg.n_trees = val.get<std::uint32_t>();
            else if (key == "features_per_tree")
                cfg.features_per_tree = val.get<std::uint32_t>();
            else if (key == "per_split_features")
                cfg.per_split_features = val.get<bool>();
            else if (key == "include_short_traces")
                cfg.include_short_traces = val.get<bool>();
            else if (key == "threads")
                cfg.threads = val.get<std::uint32_t>();
            else if (key == "planted_network") {
                // An explicit network object replaces the default block
                // layout wholesale; stale default sizes must not constrain a
                // freshly configured n/k.
                cfg.planted_network.sizes.clear();
                for (const auto& [nk, nv] : val.items()) {
                    if (nk == "n")
                        cfg.planted_network.n = nv.get<std::uint32_t>();
                    else if (nk == "k")
                        cfg.planted_network.k = nv.get<std::uint32_t>();
                    else if (nk == "p_in")
                        cfg.planted_network.p_in = nv.get<double>();
                    else if (nk == "p_out")
                        cfg.planted_network.p_out = nv.get<double>();
                    else if (nk == "sizes")
                        cfg.planted_network.sizes = nv.get<std::vector<std::uint32_t>>();
                    else
                        throw std::invalid_argument("config: unknown planted_network key: " + nk);
                }
            } else if (key == "planted_cascades") {
                PlantedCascadeSpec& pc = cfg.planted_cascades;
                for (const auto& [ck, cv] : val.items()) {
                    if (ck == "n_memes")
                        pc.n_memes = cv.get<std::uint32_t>();
                    else if (ck == "simple_fraction")
                        pc.simple_fraction = cv.get<double>();
                    else if (ck == "alpha")
                        pc.alpha = cv.get<double>();
                    else if (ck == "simple_pop_min")
                        pc.simple_pop_min = cv.get<std::uint32_t>();
                    else if (ck == "simple_pop_max")
                        pc.simple_pop_max = cv.get<std::uint32_t>();
                    else if (ck == "simple_p")
                        pc.simple_p = cv.get<double>();
                    else if (ck == "match_noise")
                        pc.match_noise = cv.get<double>();
                    else if (ck == "complex_geom_q")
                        pc.complex_geom_q = cv.get<double>();
                    else if (ck == "complex_pop_min")
                        pc.complex_pop_min = cv.get<std::uint32_t>();
                    else if (ck == "complex_pop_max")
                        pc.complex_pop_max = cv.get<std::uint32_t>();
                    else if (ck == "complex_threshold")
                        pc.complex_threshold = cv.get<std::uint32_t>();
                    else if (ck == "complex_p")
                        pc.complex_p = cv.get<double>();
                    else if (ck == "interaction_base_rate")
                        pc.interaction_base_rate = cv.get<double>();
                    else if (ck == "intra_rate_multiplier")
                        pc.intra_rate_multiplier = cv.get<double>();
                    else if (ck == "mention_fraction")
                        pc.mention_fraction = cv.get<double>();
                    else if (ck == "max_retries")
                        pc.max_retries = cv.get<std::uint32_t>();
                    else if (ck == "early_n")
                        pc.early_n = cv.get<std::size_t>();
                    else
                        throw std::invalid_argument("config: unknown planted_cascades key: " + ck);
                }
            } else {
                throw std::invalid_argument("config: unknown key: " + key);
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return cfg;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a(config_json(cfg).dump()); }

GraphBundle load_network(const std::string& path) {
    const io::EdgeListFile file = io::read_edge_tsv(path);
    GraphBundle b;
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(file.edges.size());
    if (file.declared_nodes) {
        const std::size_t n = *file.declared_nodes;
        if (n > std::numeric_limits<NodeId>::max())
            throw DataError("declared node count too large");
        for (const auto& [us, vs] : file.edges)
            pairs.emplace_back(parse_decimal_node(us, n), parse_decimal_node(vs, n));
        b.names_are_ids = true;
        for (std::size_t i = 0; i < n; ++i) b.names.intern(std::to_string(i));
        b.net = SocialNetwork::build(static_cast<NodeId>(n), pairs, EdgeMode::as_is);
    } else {
        for (const auto& [us, vs] : file.edges) {
            // intern in two statements: argument evaluation order inside a
            // call is unspecified, and ids must follow first-seen order
            const NodeId u = b.names.intern(us);
            const NodeId v = b.names.intern(vs);
            pairs.emplace_back(u, v);
        }
        b.net = SocialNetwork::build(static_cast<NodeId>(b.names.size()), pairs, EdgeMode::as_is);
    }
    return b;
}

// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
    cfg.require_seed();
    require_input(cfg.edges_path, "edges");
    const std::string out = ensure_out(cfg);

    // Edge file: raw follow pairs (named) or a canonical node-count-declared
    // list. cfg.edge_mode decides whether pairs must be reciprocated.
    const io::EdgeListFile edge_file = io::read_edge_tsv(cfg.edges_path);
    IdMap ids;
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(edge_file.edges.size());
    if (edge_file.declared_nodes) {
        const std::size_t n = *edge_file.declared_nodes;
        for (std::size_t i = 0; i < n; ++i) ids.intern(std::to_string(i));
        for (const auto& [us, vs] : edge_file.edges)
            pairs.emplace_back(parse_decimal_node(us, n), parse_decimal_node(vs, n));
    } else {
        for (const auto& [us, vs] : edge_file.edges) {
            // intern in two statements: argument evaluation order inside a
            // call is unspecified, and ids must follow first-seen order
            const NodeId u = ids.intern(us);
            const NodeId v = ids.intern(vs);
            pairs.emplace_back(u, v);
        }
    }
    const NodeId n_graph = static_cast<NodeId>(ids.size());
    BuildReport brep;
    const SocialNetwork net =
        SocialNetwork::build(n_graph, pairs, parse_edge_mode(cfg.edge_mode), &brep);

    // Tweets: every hashtag contributes one trace event; retweets and
    // mentions feed the interaction log. Users unseen in the edge list are
    // interned past the network size and excluded from network-bound
    // analyses downstream.
    std::vector<io::RawTweet> tweets;
    io::ParseReport tweet_rep;
    if (!cfg.tweets_path.empty()) {
        require_input(cfg.tweets_path, "tweets");
        tweets = io::read_tweets_jsonl(cfg.tweets_path, &tweet_rep);
    }

    struct PendingEvent {
        NodeId user;
        std::int64_t ts;
    };
    std::vector<std::string> meme_order;
    std::unordered_map<std::string, std::size_t> meme_idx;
    std::vector<std::vector<PendingEvent>> pending;
    InteractionLog log;
    std::size_t tweets_without_hashtags = 0;

    for (const io::RawTweet& tw : tweets) {
        const NodeId actor = ids.intern(tw.user);
        if (tw.hashtags.empty()) ++tweets_without_hashtags;
        for (const std::string& tag : tw.hashtags) {
            const auto [it, fresh] = meme_idx.try_emplace(tag, meme_order.size());
            if (fresh) {
                meme_order.push_back(tag);
                pending.emplace_back();
            }
            pending[it->second].push_back({actor, tw.ts});
        }
        const auto add_interaction = [&](const std::string& other, InteractionKind kind) {
            const NodeId target = ids.intern(other);
            if (target == actor) {
                ++log.self_events_skipped;
                return;
            }
            InteractionEvent ev;
            ev.actor = actor;
            ev.target = target;
            ev.kind = kind;
            ev.ts = tw.ts;
            ev.memes = tw.hashtags;
            log.events.push_back(std::move(ev));
        };
        if (tw.retweet_of) add_interaction(*tw.retweet_of, InteractionKind::retweet);
        for (const std::string& m : tw.mentions) add_interaction(m, InteractionKind::mention);
    }
    log.sort_by_ts();

    std::vector<MemeTrace> traces;
    traces.reserve(meme_order.size());
    std::size_t trace_events = 0;
    for (std::size_t i = 0; i < meme_order.size(); ++i) {
        std::stable_sort(pending[i].begin(), pending[i].end(),
                         [](const PendingEvent& a, const PendingEvent& b) { return a.ts < b.ts; });
        MemeTrace tr;
        tr.meme_id = meme_order[i];
        tr.events.reserve(pending[i].size());
        for (const PendingEvent& pe : pending[i]) {
            tr.events.push_back({pe.user, static_cast<std::uint32_t>(tr.events.size()), pe.ts});
        }
        trace_events += tr.events.size();
        traces.push_back(std::move(tr));
    }

    // network.tsv uses decimal ids so traces.jsonl and every downstream
    // command share one id space; nodes.csv carries the name mapping
    io::write_edge_tsv(out + "/network.tsv", net);
    io::write_nodes_csv(out + "/nodes.csv", ids);
    io::write_traces_jsonl(out + "/traces.jsonl", traces);
    io::write_interactions_jsonl(out + "/interactions.jsonl", log);

    const auto bad_lines_json = [](const io::ParseReport& rep) {
        json arr = json::array();
        for (const auto& [line_no, msg] : rep.bad_lines)
            arr.push_back(json{{"line", line_no}, {"error", msg}});
        return json{{"lines", rep.lines}, {"bad", arr}};
    };
    json report{{"network_nodes", net.num_nodes()},
                {"network_edges", net.num_edges()},
                {"nodes_total", ids.size()},
                {"users_beyond_network", ids.size() - n_graph},
                {"self_loops_skipped", brep.self_loops_skipped},
                {"duplicate_edges", brep.duplicate_edges},
                {"unreciprocated_pairs", brep.unreciprocated_pairs},
                {"edge_file", bad_lines_json(edge_file.report)},
                {"tweet_file", bad_lines_json(tweet_rep)},
                {"n_tweets", tweets.size()},
                {"tweets_without_hashtags", tweets_without_hashtags},
                {"n_memes", traces.size()},
                {"n_trace_events", trace_events},
                {"n_interactions", log.events.size()},
                {"self_interactions_skipped", log.self_events_skipped}};
    io::write_text_file(out + "/ingest_report.json", report.dump(1) + "\n");
    write_manifest(cfg, "ingest",
                   json{{"outputs", json::array({"network.tsv", "nodes.csv", "traces.jsonl",
                                                 "interactions.jsonl", "ingest_report.json"})}});
}

void cmd_communities(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    require_input(cfg.network_path, "network");
    const std::string out = ensure_out(cfg);

    const GraphBundle bundle = load_network(cfg.network_path);
    Partition part;
    if (cfg.algorithm == "louvain")
        part = detect_louvain(bundle.net, seed, cfg.resolution);
    else if (cfg.algorithm == "labelprop")
        part = detect_label_propagation(bundle.net, seed);
    else
        throw std::invalid_argument("unknown algorithm: " + cfg.algorithm +
                                    " (expected louvain|labelprop)");

    std::optional<double> q;
    try {
        q = modularity(bundle.net, part);
    } catch (const DataError&) {
        // edgeless graph: modularity undefined, partition is all singletons
    }

    io::write_partition_csv(out + "/partition.csv", part);
    json sizes = json::array();
    for (const std::size_t s : part.community_sizes()) sizes.push_back(s);
    json summary{{"algorithm", cfg.algorithm},      {"n_nodes", part.size()},
                 {"n_communities", part.num_communities()},
                 {"converged", part.converged},     {"modularity", opt_num(q)},
                 {"community_sizes", sizes}};
    if (cfg.algorithm == "louvain") summary["resolution"] = cfg.resolution;
    io::write_text_file(out + "/communities_summary.json", summary.dump(1) + "\n");
    write_manifest(cfg, "communities",
                   json{{"outputs", json::array({"partition.csv", "communities_summary.json"})}});
}

void cmd_simulate(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    require_input(cfg.network_path, "network");
    require_input(cfg.partition_path, "partition");
    const std::string out = ensure_out(cfg);

    const GraphBundle bundle = load_network(cfg.network_path);
    const Partition part = io::read_partition_csv(cfg.partition_path, bundle.net.num_nodes());
    const DiffusionModel model = parse_model(cfg.model);
    const CascadeParams params = cascade_params(cfg, seed);

    const Ensemble ens = run_ensemble(bundle.net, &part, model, params, cfg.n_sims,
                                      cfg.n_samples, parse_m1_mode(cfg.m1_mode));
    std::vector<MemeTrace> traces;
    traces.reserve(ens.traces.size());
    for (const EnsembleTrace& et : ens.traces) traces.push_back(et.trace);
    io::write_traces_jsonl(out + "/traces.jsonl", traces);

    const EnsembleSummary summary = summarize_ensemble(ens, bundle.net, part, cfg.early_n);
    json sj{{"model", cfg.model},
            {"n_sims", cfg.n_sims},
            {"n_samples", cfg.n_samples},
            {"empty_dropped", ens.empty_dropped},
            {"p", cfg.p},
            {"target_tweets", cfg.target_tweets},
            {"oversample", cfg.oversample},
            {"sample_rate", cfg.sample_rate},
            {"early_n", cfg.early_n},
            {"metrics", summary_metrics_json(summary)}};
    if (model == DiffusionModel::M1) sj["m1_mode"] = cfg.m1_mode;
    io::write_text_file(out + "/ensemble_summary.json", sj.dump(1) + "\n");
    write_manifest(cfg, "simulate",
                   json{{"outputs", json::array({"traces.jsonl", "ensemble_summary.json"})}});
}

void cmd_metrics(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    require_input(cfg.network_path, "network");
    require_input(cfg.partition_path, "partition");
    require_input(cfg.traces_path, "traces");
    const std::string out = ensure_out(cfg);

    const GraphBundle bundle = load_network(cfg.network_path);
    const SocialNetwork& net = bundle.net;
    const Partition part = io::read_partition_csv(cfg.partition_path, net.num_nodes());
    const std::vector<MemeTrace> traces = io::read_traces_jsonl(cfg.traces_path);

    const std::vector<PreppedTrace> prepped = prep_traces(traces, net.num_nodes(), cfg.early_n);
    const std::map<std::size_t, EnsembleSummary> baselines =
        m1_baselines(net, part, prepped, cfg, seed);

    std::vector<ConcentrationReport> reports;
    reports.reserve(prepped.size());
    std::size_t dropped_total = 0;
    for (const PreppedTrace& pt : prepped) {
        reports.push_back(relative_report(pt.early, net, part, baselines.at(pt.early_T)));
        dropped_total += pt.dropped_events;
    }
    write_report_csv(out + "/report.csv", reports, prepped);
    write_curves(out + "/curves", reports, prepped);

    json baselines_json = json::array();
    for (const auto& [t, summary] : baselines) {
        json bj = summary_metrics_json(summary);
        bj["target_tweets"] = t;
        baselines_json.push_back(bj);
    }
    json summary{{"n_memes", reports.size()},
                 {"dropped_events", dropped_total},
                 {"early_n", cfg.early_n},
                 {"m1_mode", cfg.m1_mode},
                 {"m1_sims", cfg.m1_sims},
                 {"m1_samples", cfg.m1_samples},
                 {"m1_baselines", baselines_json}};
    json outputs = json::array({"report.csv", "curves/", "metrics_summary.json"});

    if (!cfg.interactions_path.empty()) {
        require_input(cfg.interactions_path, "interactions");
        const InteractionLog log = io::read_interactions_jsonl(cfg.interactions_path);
        const CommunityFlowReport flow =
            community_flow(log, net, part, parse_kind_filter(cfg.kind_filter));
        json fj = flow_json(flow);
        fj["kind_filter"] = cfg.kind_filter;
        io::write_text_file(out + "/flow.json", fj.dump(1) + "\n");
        outputs.push_back("flow.json");
    }

    io::write_text_file(out + "/metrics_summary.json", summary.dump(1) + "\n");
    write_manifest(cfg, "metrics", json{{"outputs", outputs}});
}

void cmd_features(const RunConfig& cfg) {
    cfg.require_seed();
    require_input(cfg.network_path, "network");
    require_input(cfg.partition_path, "partition");
    require_input(cfg.traces_path, "traces");
    const std::string out = ensure_out(cfg);

    const GraphBundle bundle = load_network(cfg.network_path);
    const Partition part = io::read_partition_csv(cfg.partition_path, bundle.net.num_nodes());
    const std::vector<MemeTrace> traces = io::read_traces_jsonl(cfg.traces_path);
    InteractionLog log;
    if (!cfg.interactions_path.empty()) {
        require_input(cfg.interactions_path, "interactions");
        log = io::read_interactions_jsonl(cfg.interactions_path);
    }

    const FeatureBuild fb = build_feature_rows(traces, bundle.net, part, log, cfg.early_n);
    io::write_features_csv(out + "/features.csv", fb.rows);
    json summary{{"n_rows", fb.rows.size()},
                 {"n_short_traces", fb.n_short},
                 {"skipped_empty_traces", fb.skipped_empty},
                 {"skipped_users_total", fb.skipped_users_total},
                 {"early_n", cfg.early_n}};
    io::write_text_file(out + "/features_summary.json", summary.dump(1) + "\n");
    write_manifest(cfg, "features",
                   json{{"outputs", json::array({"features.csv", "features_summary.json"})}});
}

void cmd_train(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    require_input(cfg.features_path, "features");
    validate_label_mode(cfg.label_mode);
    const std::string out = ensure_out(cfg);

    const std::vector<io::FeatureRow> rows = io::read_features_csv(cfg.features_path);
    const FeatureMatrix m = to_matrix(rows, cfg.include_short_traces);
    if (m.X.empty()) throw DataError("no usable feature rows in " + cfg.features_path);

    const std::vector<double>& pop = cfg.label_mode == "T" ? m.pop_tweets : m.pop_users;
    const ViralLabels labels = label_viral(pop, cfg.theta);

    ForestParams params;
    params.n_trees = cfg.n_trees;
    params.features_per_tree = cfg.features_per_tree;
    params.per_split_features = cfg.per_split_features;
    params.seed = seed;
    ForestModel model = train_forest(m.X, labels.viral, params);
    model.theta = cfg.theta;
    model.label_mode = cfg.label_mode;
    io::write_model_json(out + "/model.json", model);

    // in-sample fit, mostly a sanity signal (bagged trees approach 100%)
    PRPoint fit;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < m.X.size(); ++i) {
        const int pred = model.predict(m.X[i]);
        const int truth = labels.viral[i];
        correct += pred == truth ? 1 : 0;
        if (pred == 1 && truth == 1) ++fit.tp;
        if (pred == 1 && truth == 0) ++fit.fp;
        if (pred == 0 && truth == 1) ++fit.fn;
        if (pred == 0 && truth == 0) ++fit.tn;
    }
    if (fit.tp + fit.fp > 0)
        fit.precision = static_cast<double>(fit.tp) / static_cast<double>(fit.tp + fit.fp);
    fit.recall =
        fit.tp + fit.fn > 0 ? static_cast<double>(fit.tp) / static_cast<double>(fit.tp + fit.fn) : 0.0;

    json report{{"n_samples", m.X.size()},
                {"excluded_short_traces", m.excluded_short},
                {"label_mode", cfg.label_mode},
                {"theta", cfg.theta},
                {"n_viral", labels.n_viral},
                {"threshold_value", labels.threshold_value},
                {"train_accuracy", static_cast<double>(correct) / static_cast<double>(m.X.size())},
                {"train_fit", pr_json(fit)}};
    io::write_text_file(out + "/train_report.json", report.dump(1) + "\n");
    write_manifest(cfg, "train",
                   json{{"outputs", json::array({"model.json", "train_report.json"})}});
}

void cmd_eval(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    require_input(cfg.features_path, "features");
    const std::string out = ensure_out(cfg);

    const std::vector<io::FeatureRow> rows = io::read_features_csv(cfg.features_path);
    const FeatureMatrix m = to_matrix(rows, cfg.include_short_traces);
    if (m.X.empty()) throw DataError("no usable feature rows in " + cfg.features_path);

    ForestParams params;
    params.n_trees = cfg.n_trees;
    params.features_per_tree = cfg.features_per_tree;
    params.per_split_features = cfg.per_split_features;
    params.seed = seed;
    const std::vector<GridCell> grid =
        evaluate_grid(m.X, m.pop_tweets, m.pop_users, cfg.thetas, cfg.folds, seed, params);

    json ej{{"n_rows", m.X.size()},
            {"excluded_short_traces", m.excluded_short},
            {"folds", cfg.folds},
            {"n_trees", cfg.n_trees},
            {"features_per_tree", cfg.features_per_tree},
            {"per_split_features", cfg.per_split_features},
            {"cells", grid_json(grid)}};
    io::write_text_file(out + "/eval.json", ej.dump(1) + "\n");
    io::write_text_file(out + "/eval.csv", grid_csv(grid));
    write_manifest(cfg, "eval", json{{"outputs", json::array({"eval.json", "eval.csv"})}});
}

void cmd_synth(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    const std::string out = ensure_out(cfg);

    PlantedPartitionSpec ns = cfg.planted_network;
    ns.seed = derive_seed(seed, 0xa1u);
    PlantedCascadeSpec cs = cfg.planted_cascades;
    cs.seed = derive_seed(seed, 0xa2u);

    const PlantedNetwork pn = gen_network(ns);
    const PlantedWorld world = gen_cascades(pn.net, pn.ground_truth, cs);

    io::write_edge_tsv(out + "/network.tsv", pn.net);
    io::write_partition_csv(out + "/partition.csv", pn.ground_truth);
    std::vector<MemeTrace> traces;
    traces.reserve(world.memes.size());
    for (const PlantedMeme& m : world.memes) traces.push_back(m.trace);
    io::write_traces_jsonl(out + "/traces.jsonl", traces);
    io::write_interactions_jsonl(out + "/interactions.jsonl", world.log);

    const DegreeStats ds = pn.net.degree_stats();
    json memes = json::array();
    std::size_t n_simple = 0;
    for (const PlantedMeme& m : world.memes) {
        n_simple += m.is_simple ? 1 : 0;
        memes.push_back(json{{"meme_id", m.trace.meme_id},
                             {"type", m.is_simple ? "simple" : "complex"},
                             {"final_popularity", m.final_popularity},
                             {"seed_community", m.seed_community},
                             {"communities_touched_early", m.communities_touched_early}});
    }
    json report{{"network",
                 json{{"n", ns.n},
                      {"k", ns.k},
                      {"p_in", ns.p_in},
                      {"p_out", ns.p_out},
                      {"expected_intra_degree", pn.expected_intra_degree},
                      {"expected_inter_degree", pn.expected_inter_degree},
                      {"low_degree_warning", pn.low_degree_warning},
                      {"edges", ds.m},
                      {"mean_degree", ds.mean_degree},
                      {"min_degree", ds.min_degree},
                      {"max_degree", ds.max_degree}}},
                {"cascades",
                 json{{"n_memes", world.memes.size()},
                      {"n_simple", n_simple},
                      {"n_complex", world.memes.size() - n_simple},
                      {"n_interactions", world.log.events.size()},
                      {"early_n", cs.early_n}}},
                {"memes", memes}};
    io::write_text_file(out + "/synth_report.json", report.dump(1) + "\n");
    write_manifest(cfg, "synth",
                   json{{"outputs",
                         json::array({"network.tsv", "partition.csv", "traces.jsonl",
                                      "interactions.jsonl", "synth_report.json"})}});
}

bool cmd_reproduce(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.require_seed();
    const std::string out = ensure_out(cfg);
    fs::create_directories(out + "/world");

    // --- planted world (same derivation as cmd_synth, so `synth` with the
    // same seed regenerates exactly this world) ---
    PlantedPartitionSpec ns = cfg.planted_network;
    ns.seed = derive_seed(seed, 0xa1u);
    PlantedCascadeSpec cs = cfg.planted_cascades;
    cs.seed = derive_seed(seed, 0xa2u);
    const PlantedNetwork pn = gen_network(ns);
    const PlantedWorld world = gen_cascades(pn.net, pn.ground_truth, cs);
    const SocialNetwork& net = pn.net;

    io::write_edge_tsv(out + "/world/network.tsv", net);
    io::write_partition_csv(out + "/world/partition_truth.csv", pn.ground_truth);
    std::vector<MemeTrace> traces;
    traces.reserve(world.memes.size());
    for (const PlantedMeme& m : world.memes) traces.push_back(m.trace);
    io::write_traces_jsonl(out + "/world/traces.jsonl", traces);
    io::write_interactions_jsonl(out + "/world/interactions.jsonl", world.log);

    // --- community detection; every analysis below uses the detected
    // partition, with ground truth kept only for the agreement score ---
    const Partition part = detect_louvain(net, derive_seed(seed, 0xc0u), cfg.resolution);
    const double ari = adjusted_rand_index(part.assignment, pn.ground_truth.assignment);
    std::optional<double> q;
    try {
        q = modularity(net, part);
    } catch (const DataError&) {
    }
    io::write_partition_csv(out + "/partition.csv", part);
    io::write_text_file(out + "/communities_summary.json",
                        json{{"algorithm", "louvain"},
                             {"resolution", cfg.resolution},
                             {"n_nodes", part.size()},
                             {"n_communities", part.num_communities()},
                             {"modularity", opt_num(q)},
                             {"ari_vs_planted", ari},
                             {"converged", part.converged}}
                                .dump(1) +
                            "\n");

    // --- model ensembles and the concentration ordering ---
    const M1Mode m1_mode = parse_m1_mode(cfg.m1_mode);
    const DiffusionModel models[] = {DiffusionModel::M1, DiffusionModel::M2, DiffusionModel::M3,
                                     DiffusionModel::M4};
    EnsembleSummary sums[4];
    for (std::size_t i = 0; i < 4; ++i) {
        CascadeParams cp = cascade_params(cfg, derive_seed(seed, 0xe0u + i));
        const Ensemble ens =
            run_ensemble(net, &part, models[i], cp, cfg.n_sims, cfg.n_samples, m1_mode);
        sums[i] = summarize_ensemble(ens, net, part, cfg.early_n);
    }
    const auto metric_vec = [](const EnsembleSummary& s, double MetricValues::*mem) {
        std::vector<double> v;
        v.reserve(s.samples.size());
        for (const MetricValues& mv : s.samples) v.push_back(mv.*mem);
        return v;
    };
    const std::vector<double> r1 = metric_vec(sums[0], &MetricValues::r);
    const std::vector<double> r2 = metric_vec(sums[1], &MetricValues::r);
    const std::vector<double> r3 = metric_vec(sums[2], &MetricValues::r);
    const std::vector<double> r4 = metric_vec(sums[3], &MetricValues::r);
    const MannWhitneyResult mw_21 = mann_whitney(r2, r1);
    const MannWhitneyResult mw_32 = mann_whitney(r3, r2);
    const MannWhitneyResult mw_42 = mann_whitney(r4, r2);

    const double rm[4] = {sums[0].r.mean, sums[1].r.mean, sums[2].r.mean, sums[3].r.mean};
    const double ht[4] = {sums[0].Ht.mean, sums[1].Ht.mean, sums[2].Ht.mean, sums[3].Ht.mean};
    const double hu[4] = {sums[0].Hu.mean, sums[1].Hu.mean, sums[2].Hu.mean, sums[3].Hu.mean};
    const bool r_order = rm[0] < rm[1] && rm[1] < rm[2] && rm[1] < rm[3];
    const bool entropy_order = ht[0] > ht[1] && ht[1] > ht[2] && ht[1] > ht[3] &&
                               hu[0] > hu[1] && hu[1] > hu[2] && hu[1] > hu[3];
    const bool p_order = mw_21.p_greater < 0.01 && mw_32.p_greater < 0.01 && mw_42.p_greater < 0.01;
    const bool check_ordering = r_order && entropy_order && p_order;

    json ens_json{{"params",
                   json{{"p", cfg.p},
                        {"target_tweets", cfg.target_tweets},
                        {"oversample", cfg.oversample},
                        {"sample_rate", cfg.sample_rate},
                        {"n_sims", cfg.n_sims},
                        {"n_samples", cfg.n_samples},
                        {"early_n", cfg.early_n},
                        {"m1_mode", cfg.m1_mode}}},
                  {"models", json{{"m1", summary_metrics_json(sums[0])},
                                  {"m2", summary_metrics_json(sums[1])},
                                  {"m3", summary_metrics_json(sums[2])},
                                  {"m4", summary_metrics_json(sums[3])}}},
                  {"ordering_tests", json{{"r_m2_gt_m1", mw_json(mw_21)},
                                          {"r_m3_gt_m2", mw_json(mw_32)},
                                          {"r_m4_gt_m2", mw_json(mw_42)}}}};
    io::write_text_file(out + "/ensembles.json", ens_json.dump(1) + "\n");

    // --- intra- vs. inter-community interaction flow ---
    const CommunityFlowReport flow = community_flow(world.log, net, part);
    std::vector<double> fi, fe;
    fi.reserve(flow.per_user.size());
    fe.reserve(flow.per_user.size());
    for (const UserFocus& u : flow.per_user) {
        fi.push_back(u.f_intra);
        fe.push_back(u.f_inter);
    }
    const double mean_fi = mean_stderr(fi).mean;
    const double mean_fe = mean_stderr(fe).mean;
    const bool check_flow = flow.w_intra_mean && flow.w_inter_mean &&
                            *flow.w_intra_mean > *flow.w_inter_mean &&
                            flow.weight_test.p_greater < 0.001 && !flow.per_user.empty() &&
                            mean_fi > mean_fe && flow.focus_test.p_greater < 0.001;
    io::write_text_file(out + "/flow.json", flow_json(flow).dump(1) + "\n");

    // --- per-meme concentration vs. popularity ---
    const std::vector<PreppedTrace> prepped = prep_traces(traces, net.num_nodes(), cfg.early_n);
    const std::map<std::size_t, EnsembleSummary> baselines =
        m1_baselines(net, part, prepped, cfg, seed);
    std::vector<ConcentrationReport> reports;
    reports.reserve(prepped.size());
    for (const PreppedTrace& pt : prepped)
        reports.push_back(relative_report(pt.early, net, part, baselines.at(pt.early_T)));
    write_report_csv(out + "/report.csv", reports, prepped);
    write_curves(out + "/curves", reports, prepped);

    // --- planted dichotomy: early community reach and entropy-popularity ---
    std::vector<double> comm_simple, comm_complex, early_ht, popularity;
    for (std::size_t i = 0; i < world.memes.size(); ++i) {
        std::set<CommunityId> comms;
        for (const TraceEvent& ev : prepped[i].early.events)
            comms.insert(part.community_of(ev.user));
        const double reach = static_cast<double>(comms.size());
        (world.memes[i].is_simple ? comm_simple : comm_complex).push_back(reach);
        early_ht.push_back(reports[i].raw.Ht);
        popularity.push_back(static_cast<double>(prepped[i].popularity_tweets));
    }
    const double med_simple = median_of(comm_simple);
    const double med_complex = median_of(comm_complex);
    const double rho = spearman_rho(early_ht, popularity);
    const bool check_dichotomy = med_simple - med_complex >= 2.0 && rho > 0.3;

    // --- features and the prediction grid ---
    const FeatureBuild fb = build_feature_rows(traces, net, part, world.log, cfg.early_n);
    io::write_features_csv(out + "/features.csv", fb.rows);
    const FeatureMatrix fm = to_matrix(fb.rows, cfg.include_short_traces);
    ForestParams fparams;
    fparams.n_trees = cfg.n_trees;
    fparams.features_per_tree = cfg.features_per_tree;
    fparams.per_split_features = cfg.per_split_features;
    fparams.seed = seed;
    const std::vector<GridCell> grid =
        evaluate_grid(fm.X, fm.pop_tweets, fm.pop_users, cfg.thetas, cfg.folds,
                      derive_seed(seed, 0xe7a1u), fparams);
    io::write_text_file(out + "/eval.json",
                        json{{"n_rows", fm.X.size()},
                             {"excluded_short_traces", fm.excluded_short},
                             {"folds", cfg.folds},
                             {"n_trees", cfg.n_trees},
                             {"features_per_tree", cfg.features_per_tree},
                             {"cells", grid_json(grid)}}
                                .dump(1) +
                            "\n");
    io::write_text_file(out + "/eval.csv", grid_csv(grid));

    validate_label_mode(cfg.label_mode);
    const char want_mode = cfg.label_mode == "U" ? 'U' : 'T';
    const GridCell* cell = nullptr;
    for (const GridCell& c : grid)
        if (c.theta == cfg.theta && c.label_mode == want_mode) cell = &c;
    if (!cell)
        throw std::invalid_argument("theta/label_mode combination not in the evaluated grid");
    const double full_p = cell->full.pooled.precision.value_or(0.0);
    const double full_r = cell->full.pooled.recall;
    const double blind_p = cell->blind.pooled.precision.value_or(0.0);
    const double blind_r = cell->blind.pooled.recall;
    const double rand_e = cell->random.expected;
    const bool check_lift = full_p >= 1.5 * blind_p && full_r >= 1.5 * blind_r &&
                            full_p >= 2.0 * rand_e && full_r >= 2.0 * rand_e;

    // --- verdicts ---
    json checks = json::array();
    checks.push_back(json{
        {"id", "model_ordering"},
        {"pass", check_ordering},
        {"details",
         json{{"r_means", json{{"m1", rm[0]}, {"m2", rm[1]}, {"m3", rm[2]}, {"m4", rm[3]}}},
              {"p_r_m2_gt_m1", mw_21.p_greater},
              {"p_r_m3_gt_m2", mw_32.p_greater},
              {"p_r_m4_gt_m2", mw_42.p_greater},
              {"usage_entropy_means",
               json{{"m1", ht[0]}, {"m2", ht[1]}, {"m3", ht[2]}, {"m4", ht[3]}}},
              {"adoption_entropy_means",
               json{{"m1", hu[0]}, {"m2", hu[1]}, {"m3", hu[2]}, {"m4", hu[3]}}},
              {"entropy_order_ok", entropy_order}}}});
    checks.push_back(json{{"id", "intra_inter_flow"},
                          {"pass", check_flow},
                          {"details", json{{"w_intra_mean", opt_num(flow.w_intra_mean)},
                                           {"w_inter_mean", opt_num(flow.w_inter_mean)},
                                           {"p_weight", flow.weight_test.p_greater},
                                           {"mean_f_intra", mean_fi},
                                           {"mean_f_inter", mean_fe},
                                           {"p_focus", flow.focus_test.p_greater}}}});
    checks.push_back(json{{"id", "virality_dichotomy"},
                          {"pass", check_dichotomy},
                          {"details", json{{"median_communities_simple", med_simple},
                                           {"median_communities_complex", med_complex},
                                           {"median_difference", med_simple - med_complex},
                                           {"spearman_entropy_popularity", rho},
                                           {"n_simple", comm_simple.size()},
                                           {"n_complex", comm_complex.size()}}}});
    checks.push_back(json{{"id", "prediction_lift"},
                          {"pass", check_lift},
                          {"details", json{{"theta", cfg.theta},
                                           {"label_mode", cfg.label_mode},
                                           {"full_precision", full_p},
                                           {"full_recall", full_r},
                                           {"blind_precision", blind_p},
                                           {"blind_recall", blind_r},
                                           {"random_expected", rand_e}}}});
    bool all_passed = true;
    for (const json& c : checks) all_passed = all_passed && c.at("pass").get<bool>();
    io::write_text_file(out + "/acceptance_checks.json",
                        json{{"all_passed", all_passed}, {"checks", checks}}.dump(1) + "\n");

    write_manifest(cfg, "reproduce",
                   json{{"ari_vs_planted", ari},
                        {"all_checks_passed", all_passed},
                        {"outputs",
                         json::array({"world/", "partition.csv", "communities_summary.json",
                                      "ensembles.json", "flow.json", "report.csv", "curves/",
                                      "features.csv", "eval.json", "eval.csv",
                                      "acceptance_checks.json"})}});
    return all_passed;
}

}  // namespace memeflow::pipeline
