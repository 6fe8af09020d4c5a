#include "memeflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"

using nlohmann::json;

namespace memeflow::io {

namespace {

void enforce_bad_line_budget(const ParseReport& report, const std::string& path) {
    if (report.bad_lines.empty()) return;
    if (report.bad_lines.size() * 100 > report.lines) {
        std::string msg = path + ": " + std::to_string(report.bad_lines.size()) + " of " +
                          std::to_string(report.lines) + " lines unparseable (> 1%); first: line " +
                          std::to_string(report.bad_lines.front().first) + ": " +
                          report.bad_lines.front().second;
        throw DataError(msg);
    }
}

std::string rstrip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n' || s.back() == ' ' || s.back() == '\t'))
        s.pop_back();
    return s;
}

bool parse_index(const std::string& s, std::uint64_t& out) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> csv_split(const std::string& line, std::size_t line_no,
                                   const std::string& path) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw DataError(path + " line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EdgeListFile read_edge_tsv(const std::string& path) {
    std::ifstream in = open_in(path);
    EdgeListFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string directive = "# nodes:";
            if (line.rfind(directive, 0) == 0) {
                std::uint64_t n = 0;
                std::string rest = line.substr(directive.size());
                rest.erase(0, rest.find_first_not_of(' '));
                if (parse_index(rest, n)) out.declared_nodes = n;
            }
            continue;
        }
        ++out.report.lines;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
            line.find('\t', tab + 1) != std::string::npos) {
            out.report.bad_lines.emplace_back(line_no, "expected exactly two tab-separated fields");
            continue;
        }
        out.edges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    enforce_bad_line_budget(out.report, path);
    return out;
}

void write_edge_tsv(const std::string& path, const SocialNetwork& net, const IdMap* names) {
    // the node-count directive switches readers to decimal-index parsing,
    // so it must not appear on a file with named endpoints
    std::string out = names ? "" : "# nodes: " + std::to_string(net.num_nodes()) + "\n";
    for (const auto& [u, v] : net.edge_list()) {
        if (names) {
            out += names->name(u);
            out += '\t';
            out += names->name(v);
        } else {
            out += std::to_string(u);
            out += '\t';
            out += std::to_string(v);
        }
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<MemeTrace> read_traces_jsonl(const std::string& path, ParseReport* report) {
    std::ifstream in = open_in(path);
    ParseReport rep;
    std::vector<MemeTrace> traces;
    std::unordered_map<std::string, std::size_t> index;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        ++rep.lines;
        try {
            const json j = json::parse(line);
            TraceEvent ev;
            const std::string meme_id = j.at("meme_id").get<std::string>();
            ev.seq = j.at("seq").get<std::uint32_t>();
            ev.user = j.at("user").get<NodeId>();
            ev.ts = j.contains("ts") ? j.at("ts").get<std::int64_t>()
                                     : static_cast<std::int64_t>(ev.seq);
            auto it = index.find(meme_id);
            if (it == index.end()) {
                it = index.emplace(meme_id, traces.size()).first;
                traces.emplace_back();
                traces.back().meme_id = meme_id;
            }
            traces[it->second].events.push_back(ev);
        } catch (const std::exception& e) {
            rep.bad_lines.emplace_back(line_no, e.what());
        }
    }
    enforce_bad_line_budget(rep, path);
    for (auto& t : traces) {
        std::stable_sort(t.events.begin(), t.events.end(),
                         [](const TraceEvent& a, const TraceEvent& b) { return a.seq < b.seq; });
        for (std::size_t i = 1; i < t.events.size(); ++i) {
            if (t.events[i].seq == t.events[i - 1].seq)
                throw DataError(path + ": meme " + t.meme_id + " has duplicate seq " +
                                std::to_string(t.events[i].seq));
        }
    }
    if (report) *report = std::move(rep);
    return traces;
}

void write_traces_jsonl(const std::string& path, const std::vector<MemeTrace>& traces) {
    std::string out;
    for (const auto& t : traces) {
        for (const auto& e : t.events) {
            json j;
            j["meme_id"] = t.meme_id;
            j["seq"] = e.seq;
            j["ts"] = e.ts;
            j["user"] = e.user;
            out += j.dump();
            out += '\n';
        }
    }
    write_text_file(path, out);
}

InteractionLog read_interactions_jsonl(const std::string& path, ParseReport* report) {
    std::ifstream in = open_in(path);
    ParseReport rep;
    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        ++rep.lines;
        try {
            const json j = json::parse(line);
            InteractionEvent ev;
            ev.actor = j.at("actor").get<NodeId>();
            ev.target = j.at("target").get<NodeId>();
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "retweet") ev.kind = InteractionKind::retweet;
            else if (kind == "mention") ev.kind = InteractionKind::mention;
            else throw DataError("unknown kind: " + kind);
            ev.ts = j.at("ts").get<std::int64_t>();
            if (j.contains("memes")) ev.memes = j.at("memes").get<std::vector<std::string>>();
            log.events.push_back(std::move(ev));
        } catch (const std::exception& e) {
            rep.bad_lines.emplace_back(line_no, e.what());
        }
    }
    enforce_bad_line_budget(rep, path);
    log.sort_by_ts();
    if (report) *report = std::move(rep);
    return log;
}

void write_interactions_jsonl(const std::string& path, const InteractionLog& log) {
    std::string out;
    for (const auto& ev : log.events) {
        json j;
        j["actor"] = ev.actor;
        j["kind"] = ev.kind == InteractionKind::retweet ? "retweet" : "mention";
        j["memes"] = ev.memes;
        j["target"] = ev.target;
        j["ts"] = ev.ts;
        out += j.dump();
        out += '\n';
    }
    write_text_file(path, out);
}

Partition read_partition_csv(const std::string& path, std::size_t expected_nodes) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || rstrip(line) != "node_id,community_id")
        throw DataError(path + ": expected header node_id,community_id");
    Partition part;
    part.assignment.assign(expected_nodes, kInvalidNode);
    std::size_t line_no = 1;
    std::size_t seen = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        std::uint64_t node = 0, comm = 0;
        if (comma == std::string::npos || !parse_index(line.substr(0, comma), node) ||
            !parse_index(line.substr(comma + 1), comm)) {
            throw DataError(path + " line " + std::to_string(line_no) + ": expected node,community");
        }
        if (node >= expected_nodes)
            throw DataError(path + " line " + std::to_string(line_no) + ": node out of range");
        if (part.assignment[node] != kInvalidNode)
            throw DataError(path + " line " + std::to_string(line_no) + ": duplicate node");
        part.assignment[node] = static_cast<CommunityId>(comm);
        ++seen;
    }
    if (seen != expected_nodes)
        throw DataError(path + ": covers " + std::to_string(seen) + " of " +
                        std::to_string(expected_nodes) + " nodes");
    part.normalize();
    return part;
}

void write_partition_csv(const std::string& path, const Partition& part) {
    std::string out = "node_id,community_id\n";
    for (std::size_t u = 0; u < part.assignment.size(); ++u) {
        out += std::to_string(u);
        out += ',';
        out += std::to_string(part.assignment[u]);
        out += '\n';
    }
    write_text_file(path, out);
}

void write_nodes_csv(const std::string& path, const IdMap& ids) {
    std::string out = "internal_id,name\n";
    for (NodeId u = 0; u < ids.size(); ++u) {
        out += std::to_string(u);
        out += ',';
        out += csv_escape(ids.name(u));
        out += '\n';
    }
    write_text_file(path, out);
}

IdMap read_nodes_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || rstrip(line) != "internal_id,name")
        throw DataError(path + ": expected header internal_id,name");
    IdMap ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        const auto fields = csv_split(line, line_no, path);
        std::uint64_t id = 0;
        if (fields.size() != 2 || !parse_index(fields[0], id))
            throw DataError(path + " line " + std::to_string(line_no) + ": expected id,name");
        if (id != ids.size())
            throw DataError(path + " line " + std::to_string(line_no) + ": ids must be dense");
        ids.intern(fields[1]);
    }
    return ids;
}

const char* const kFeaturesCsvHeader =
    "meme_id,n_early_adopters,n_uninfected_neighbors,n_infected_communities,usage_entropy,"
    "adoption_entropy,frac_intra,frac_intra_present,short_trace,skipped_users,"
    "popularity_tweets,popularity_users";

void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows) {
    std::string out = std::string(kFeaturesCsvHeader) + "\n";
    for (const auto& row : rows) {
        out += csv_escape(row.fv.meme_id);
        for (const double v : row.fv.values) {
            out += ',';
            out += format_double(v);
        }
        out += ',';
        out += row.fv.short_trace ? '1' : '0';
        out += ',';
        out += std::to_string(row.fv.skipped_users);
        out += ',';
        out += format_double(row.popularity_tweets);
        out += ',';
        out += format_double(row.popularity_users);
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<FeatureRow> read_features_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || rstrip(line) != kFeaturesCsvHeader)
        throw DataError(path + ": unexpected features header");
    std::vector<FeatureRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        const auto fields = csv_split(line, line_no, path);
        if (fields.size() != 12)
            throw DataError(path + " line " + std::to_string(line_no) + ": expected 12 fields");
        FeatureRow row;
        row.fv.meme_id = fields[0];
        const auto parse_d = [&](const std::string& s) {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw DataError(path + " line " + std::to_string(line_no) + ": bad number " + s);
            return v;
        };
        for (std::size_t f = 0; f < kNumFeatures; ++f) row.fv.values[f] = parse_d(fields[1 + f]);
        row.fv.short_trace = fields[8] == "1";
        std::uint64_t skipped = 0;
        if (!parse_index(fields[9], skipped))
            throw DataError(path + " line " + std::to_string(line_no) + ": bad skipped_users");
        row.fv.skipped_users = skipped;
        row.popularity_tweets = parse_d(fields[10]);
        row.popularity_users = parse_d(fields[11]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_model_json(const std::string& path, const ForestModel& model) {
    json j;
    j["version"] = 1;
    j["type"] = "random_forest";
    j["n_features"] = model.n_features;
    j["params"] = {{"n_trees", model.params.n_trees},
                   {"features_per_tree", model.params.features_per_tree},
                   {"per_split_features", model.params.per_split_features},
                   {"seed", model.params.seed}};
    j["metadata"] = {{"theta", model.theta}, {"label_mode", model.label_mode}};
    json trees = json::array();
    for (const auto& t : model.trees) {
        json nodes = json::array();
        for (const auto& nd : t.nodes) {
            nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.label});
        }
        trees.push_back({{"features", t.features}, {"nodes", std::move(nodes)}});
    }
    j["trees"] = std::move(trees);
    write_text_file(path, j.dump(1) + "\n");
}

ForestModel read_model_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const std::exception& e) {
        throw DataError(path + ": invalid JSON: " + e.what());
    }
    try {
        if (j.at("version").get<int>() != 1 || j.at("type").get<std::string>() != "random_forest")
            throw DataError("unsupported model file");
        ForestModel model;
        model.n_features = j.at("n_features").get<std::size_t>();
        const json& p = j.at("params");
        model.params.n_trees = p.at("n_trees").get<std::uint32_t>();
        model.params.features_per_tree = p.at("features_per_tree").get<std::uint32_t>();
        model.params.per_split_features = p.at("per_split_features").get<bool>();
        model.params.seed = p.at("seed").get<std::uint64_t>();
        model.theta = j.at("metadata").at("theta").get<double>();
        model.label_mode = j.at("metadata").at("label_mode").get<std::string>();
        for (const json& tj : j.at("trees")) {
            DecisionTree tree;
            tree.features = tj.at("features").get<std::vector<std::uint32_t>>();
            for (const json& nj : tj.at("nodes")) {
                TreeNode nd;
                nd.feature = nj.at(0).get<std::int32_t>();
                nd.threshold = nj.at(1).get<double>();
                nd.left = nj.at(2).get<std::int32_t>();
                nd.right = nj.at(3).get<std::int32_t>();
                nd.label = nj.at(4).get<std::int32_t>();
                tree.nodes.push_back(nd);
            }
            model.trees.push_back(std::move(tree));
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(path + ": malformed model: " + e.what());
    }
}

std::vector<RawTweet> read_tweets_jsonl(const std::string& path, ParseReport* report) {
    std::ifstream in = open_in(path);
    ParseReport rep;
    std::vector<RawTweet> tweets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = rstrip(line);
        if (line.empty()) continue;
        ++rep.lines;
        try {
            const json j = json::parse(line);
            RawTweet tw;
            tw.user = j.at("user").get<std::string>();
            tw.ts = j.at("ts").get<std::int64_t>();
            if (j.contains("hashtags")) tw.hashtags = j.at("hashtags").get<std::vector<std::string>>();
            if (j.contains("retweet_of")) tw.retweet_of = j.at("retweet_of").get<std::string>();
            if (j.contains("mentions")) tw.mentions = j.at("mentions").get<std::vector<std::string>>();
            tweets.push_back(std::move(tw));
        } catch (const std::exception& e) {
            rep.bad_lines.emplace_back(line_no, e.what());
        }
    }
    enforce_bad_line_budget(rep, path);
    if (report) *report = std::move(rep);
    return tweets;
}

}  // namespace memeflow::io
