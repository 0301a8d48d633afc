#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spreadnet {

using NodeId = std::uint32_t;

/// Outcome of the announcement. None means the message is never verified
/// (free spread).
enum class Verdict : std::uint8_t { None, True, False };

/// Spreading stage: before or after the announcement.
enum class Phase : std::uint8_t { Unconfirmed, Confirmed };

/// Per-node epidemic compartment. Known nodes never revert.
enum class NodeState : std::uint8_t { Unknown, Known };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::None: return "free";
        case Verdict::True: return "true";
        case Verdict::False: return "false";
    }
    return "?";
}

inline const char* to_string(Phase p) {
    return p == Phase::Unconfirmed ? "unconfirmed" : "confirmed";
}

inline Verdict verdict_from_string(const std::string& s) {
    if (s == "free" || s == "none") return Verdict::None;
    if (s == "true") return Verdict::True;
    if (s == "false") return Verdict::False;
    throw std::invalid_argument("unknown verdict '" + s + "' (expected true, false or free)");
}

}  // namespace spreadnet
