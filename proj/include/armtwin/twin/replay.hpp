#pragma once

#include <chrono>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "armtwin/twin/client.hpp"

namespace armtwin::twin {

struct ReplayEntry {
    std::int64_t delay_ms = 0;  // wait before sending
    std::string topic;
    nlohmann::json msg = nlohmann::json::object();
};

/// Replay script document:
///   {"frames": [{"delay_ms": 0, "topic": "/cmd/pose", "msg": {...}}, ...]}
/// `msg` uses the wire payload schema verbatim. Throws SchemaError / SyntaxError.
std::vector<ReplayEntry> parse_replay_script(std::string_view text);

enum class ReplayOutcome { ok = 0, connection_lost = 4, error_status = 5 };

/// Sends each entry as a publish with id "replay-<n>", waits for its status
/// and prints one line per reply to `out`.
ReplayOutcome run_replay(const std::vector<ReplayEntry>& script, const ServerAddress& server, std::ostream& out,
                         std::chrono::milliseconds reply_timeout = std::chrono::seconds(10));

}  // namespace armtwin::twin
