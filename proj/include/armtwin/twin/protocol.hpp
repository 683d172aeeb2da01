#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "armtwin/errors.hpp"

// Wire protocol: a subset of the rosbridge v2 op set. Every frame is one
// UTF-8 JSON object in a WebSocket text frame.
namespace armtwin::twin {

using nlohmann::json;

enum class Op { advertise, subscribe, unsubscribe, publish, status };

std::string_view to_string(Op op);
std::optional<Op> op_from_string(std::string_view s);

namespace topics {
inline constexpr std::string_view joint_states = "/joint_states";
inline constexpr std::string_view cmd_joint = "/cmd/joint";
inline constexpr std::string_view cmd_pose = "/cmd/pose";
inline constexpr std::string_view cmd_track = "/cmd/track";
inline constexpr std::string_view cmd_stop = "/cmd/stop";

inline constexpr std::array<std::string_view, 4> commands = {cmd_joint, cmd_pose, cmd_track, cmd_stop};
inline constexpr std::array<std::string_view, 5> all = {joint_states, cmd_joint, cmd_pose, cmd_track, cmd_stop};

bool is_known(std::string_view topic);
bool is_command(std::string_view topic);
}  // namespace topics

namespace levels {
inline constexpr std::string_view ok = "none";
inline constexpr std::string_view error = "error";
}  // namespace levels

struct TwinMessage {
    Op op = Op::status;
    std::string topic;              // empty for status
    std::optional<json> msg;        // publish payload; advertise metadata
    std::optional<json> id;         // correlation id, echoed verbatim in the status reply
    std::optional<std::string> type;  // advertise only
    std::string level;              // status only
    std::string text;               // status only

    static TwinMessage publish(std::string topic, json msg);
    static TwinMessage status(std::string_view level, std::string text, std::optional<json> id = std::nullopt);
};

/// A frame that breaks the protocol. Carries the frame's id when one could be read.
class ProtocolError : public Error {
public:
    ProtocolError(const std::string& what, std::optional<json> id) : Error(what), id_(std::move(id)) {}
    const std::optional<json>& id() const { return id_; }

private:
    std::optional<json> id_;
};

/// Decodes and validates one inbound frame. Throws ProtocolError.
TwinMessage decode(std::string_view raw);

/// Encodes a frame compactly (no whitespace).
std::string encode(const TwinMessage& m);

}  // namespace armtwin::twin
