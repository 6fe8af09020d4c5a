#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "memeflow/community.hpp"
#include "memeflow/events.hpp"
#include "memeflow/forest.hpp"
#include "memeflow/graph.hpp"
#include "memeflow/types.hpp"

namespace memeflow::io {

std::string format_double(double v);  // shortest round-trip decimal form

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Parse problems are tolerated up to 1% of non-blank lines; beyond that the
// reader throws DataError. Every bad line is recorded with its number.
struct ParseReport {
    std::size_t lines = 0;  // non-blank, non-comment lines
    std::vector<std::pair<std::size_t, std::string>> bad_lines;
};

// --- edge lists ------------------------------------------------------------
// Tab-separated `u<TAB>v` pairs; `#` starts a comment. A `# nodes: N`
// directive declares the node count, in which case endpoints must be decimal
// indices below N (our own writers always emit it). Without the directive,
// endpoints are free-form names for the caller to intern.
struct EdgeListFile {
    std::vector<std::pair<std::string, std::string>> edges;
    std::optional<std::size_t> declared_nodes;
    ParseReport report;
};

EdgeListFile read_edge_tsv(const std::string& path);

// Writes the canonical (u < v, sorted) edge list. Null `names` writes
// decimal ids under a `# nodes: N` directive; with `names` the endpoints are
// external names and the directive is omitted, so readers re-intern them.
void write_edge_tsv(const std::string& path, const SocialNetwork& net,
                    const IdMap* names = nullptr);

// --- traces ------------------------------------------------------------
// JSON lines: {"meme_id": "...", "seq": 0, "user": 7, "ts": 0}. `ts` is
// optional on input and defaults to seq. Users are internal integer ids.
std::vector<MemeTrace> read_traces_jsonl(const std::string& path, ParseReport* report = nullptr);
void write_traces_jsonl(const std::string& path, const std::vector<MemeTrace>& traces);

// --- interactions ------------------------------------------------------
// JSON lines: {"actor": 3, "target": 9, "kind": "retweet"|"mention",
// "ts": 12, "memes": ["..."]}. Users are internal integer ids.
InteractionLog read_interactions_jsonl(const std::string& path, ParseReport* report = nullptr);
void write_interactions_jsonl(const std::string& path, const InteractionLog& log);

// --- partitions ---------------------------------------------------------
// CSV with header `node_id,community_id`, one row per node; read partitions
// are renumbered densely by first occurrence.
Partition read_partition_csv(const std::string& path, std::size_t expected_nodes);
void write_partition_csv(const std::string& path, const Partition& part);

// --- node names ----------------------------------------------------------
// CSV with header `internal_id,name` preserving the ingest interning order.
void write_nodes_csv(const std::string& path, const IdMap& ids);
IdMap read_nodes_csv(const std::string& path);

// --- features -------------------------------------------------------------
struct FeatureRow {
    FeatureVector fv;
    double popularity_tweets = 0.0;
    double popularity_users = 0.0;
};

extern const char* const kFeaturesCsvHeader;

void write_features_csv(const std::string& path, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> read_features_csv(const std::string& path);

// --- forest models ---------------------------------------------------------
void write_model_json(const std::string& path, const ForestModel& model);
ForestModel read_model_json(const std::string& path);

// --- tweet ingestion ---------------------------------------------------
// Raw tweet lines: {"user": "alice", "ts": 3, "hashtags": ["x"],
// "retweet_of": "bob", "mentions": ["carol"]} with external string names.
struct RawTweet {
    std::string user;
    std::int64_t ts = 0;
    std::vector<std::string> hashtags;
    std::optional<std::string> retweet_of;
    std::vector<std::string> mentions;
};

std::vector<RawTweet> read_tweets_jsonl(const std::string& path, ParseReport* report = nullptr);

}  // namespace memeflow::io
