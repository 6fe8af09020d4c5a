#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "memeflow/types.hpp"

namespace memeflow {

enum class InteractionKind { retweet, mention };

struct InteractionEvent {
    NodeId actor = kInvalidNode;
    NodeId target = kInvalidNode;
    InteractionKind kind = InteractionKind::retweet;
    std::int64_t ts = 0;
    std::vector<std::string> memes;  // hashtags attached to the interaction
};

// Time-ordered record of retweet/mention activity. Timestamps are
// non-decreasing after ingestion (stable sort, ties keep input order).
struct InteractionLog {
    std::vector<InteractionEvent> events;
    std::size_t self_events_skipped = 0;

    void sort_by_ts() {
        std::stable_sort(events.begin(), events.end(),
                         [](const InteractionEvent& a, const InteractionEvent& b) { return a.ts < b.ts; });
    }
};

struct TraceEvent {
    NodeId user = kInvalidNode;
    std::uint32_t seq = 0;
    std::int64_t ts = 0;
};

// Time-ordered adoption events of one meme. seq is strictly increasing;
// for simulated traces ts == seq.
struct MemeTrace {
    std::string meme_id;
    std::vector<TraceEvent> events;
    bool flagged_empty = false;

    std::size_t tweet_count() const { return events.size(); }

    std::vector<NodeId> adopters() const {
        std::vector<NodeId> users;
        users.reserve(events.size());
        for (const auto& e : events) users.push_back(e.user);
        std::sort(users.begin(), users.end());
        users.erase(std::unique(users.begin(), users.end()), users.end());
        return users;
    }

    std::size_t adopter_count() const { return adopters().size(); }

    void reindex_seq() {
        for (std::uint32_t i = 0; i < events.size(); ++i) events[i].seq = i;
    }
};

}  // namespace memeflow
