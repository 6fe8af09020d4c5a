#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace memeflow {

// Dense node index, remapped from external string ids at ingestion.
using NodeId = std::uint32_t;
using CommunityId = std::uint32_t;

constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

// Problems with input data (malformed files, inconsistent references).
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace memeflow
