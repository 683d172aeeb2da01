#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "armtwin/twin/controller.hpp"
#include "armtwin/twin/protocol.hpp"

namespace armtwin::twin {

using SessionId = std::uint64_t;

struct SessionState {
    std::set<std::string, std::less<>> subscriptions;
    std::string peer;
    double connected_at = 0.0;
};

/// One frame shared by every recipient; the text is built once so all
/// subscribers receive byte-identical payloads.
struct Broadcast {
    std::shared_ptr<const std::string> frame;
    std::vector<SessionId> recipients;
};

/// Transport-free core of the twin server: session table, protocol handling
/// and the controller. Not thread-safe; the server drives it from a single
/// strand, tests drive it directly.
class TwinHub {
public:
    TwinHub(std::shared_ptr<const RobotModel> model, ControllerConfig config = {});

    /// Registers a session and returns the advertise frames to send it.
    std::vector<std::string> connect(SessionId id, std::string peer, double now);
    void disconnect(SessionId id);

    /// Processes one inbound text frame. Returns the replies for the sender,
    /// in order. Never throws: protocol and command errors become status frames.
    std::vector<std::string> handle_client_message(SessionId id, std::string_view raw, double now);

    void tick(double now);

    /// /joint_states frame for every subscriber, or nullopt when nobody listens.
    std::optional<Broadcast> publish_joint_states(double now) const;

    const ControllerState& controller() const { return ctrl_; }
    const SessionState* session(SessionId id) const;
    std::size_t session_count() const { return sessions_.size(); }

    /// Advertise frames for the server-published and command topics; the
    /// /joint_states one carries robot metadata (joint names, limits, DH rows).
    std::vector<std::string> advertise_frames() const;

private:
    std::vector<std::string> dispatch(SessionState& session, const TwinMessage& m, double now);

    ControllerState ctrl_;
    std::map<SessionId, SessionState> sessions_;
};

}  // namespace armtwin::twin
