#include "armtwin/twin/hub.hpp"

#include <exception>

namespace armtwin::twin {

namespace {

std::string error_status(const std::string& text, std::optional<json> id) {
    return encode(TwinMessage::status(levels::error, text, std::move(id)));
}

std::string ok_status(std::optional<json> id) {
    return encode(TwinMessage::status(levels::ok, "ok", std::move(id)));
}

const char* topic_type(std::string_view topic) {
    if (topic == topics::joint_states) return "sensor_msgs/JointState";
    if (topic == topics::cmd_joint) return "armtwin/JointCommand";
    if (topic == topics::cmd_pose) return "armtwin/PoseCommand";
    if (topic == topics::cmd_track) return "armtwin/TrackCommand";
    return "armtwin/Stop";
}

}  // namespace

TwinHub::TwinHub(std::shared_ptr<const RobotModel> model, ControllerConfig config)
    : ctrl_(make_controller(std::move(model), config)) {}

std::vector<std::string> TwinHub::advertise_frames() const {
    const RobotModel& model = *ctrl_.model;
    json dh = json::array();
    json lo = json::array();
    json hi = json::array();
    for (const auto& j : model.joints) {
        dh.push_back({{"a", j.dh.a}, {"alpha", j.dh.alpha}, {"d", j.dh.d}, {"theta_offset", j.dh.theta_offset}});
        lo.push_back(j.limit.min);
        hi.push_back(j.limit.max);
    }
    const auto& t = model.tool_offset;
    json meta = {
        {"robot", model.name},
        {"solver", std::string(to_string(model.solver_hint))},
        {"name", joint_names(model)},
        {"min", lo},
        {"max", hi},
        {"dh", dh},
        {"tool_offset", {{"position", {t.position.x(), t.position.y(), t.position.z()}}, {"rpy", {t.psi, t.theta, t.phi}}}},
        {"rate_hz", ctrl_.config.rate_hz},
    };

    std::vector<std::string> frames;
    for (const auto topic : topics::all) {
        TwinMessage m;
        m.op = Op::advertise;
        m.topic = std::string(topic);
        m.type = topic_type(topic);
        if (topic == topics::joint_states) m.msg = meta;
        frames.push_back(encode(m));
    }
    return frames;
}

std::vector<std::string> TwinHub::connect(SessionId id, std::string peer, double now) {
    sessions_[id] = SessionState{{}, std::move(peer), now};
    return advertise_frames();
}

void TwinHub::disconnect(SessionId id) { sessions_.erase(id); }

const SessionState* TwinHub::session(SessionId id) const {
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : &it->second;
}

std::vector<std::string> TwinHub::handle_client_message(SessionId id, std::string_view raw, double now) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) return {error_status("unknown session", std::nullopt)};
    try {
        const TwinMessage m = decode(raw);
        try {
            return dispatch(it->second, m, now);
        } catch (const std::exception& e) {
            return {error_status(e.what(), m.id)};
        }
    } catch (const ProtocolError& e) {
        return {error_status(e.what(), e.id())};
    } catch (const std::exception& e) {
        return {error_status(std::string("malformed frame: ") + e.what(), std::nullopt)};
    }
}

std::vector<std::string> TwinHub::dispatch(SessionState& session, const TwinMessage& m, double now) {
    const auto reply_ok = [&]() -> std::vector<std::string> {
        if (m.id) return {ok_status(m.id)};
        return {};
    };
    switch (m.op) {
        case Op::status:
            return reply_ok();
        case Op::subscribe:
            if (!topics::is_known(m.topic)) return {error_status("unknown topic '" + m.topic + "'", m.id)};
            session.subscriptions.insert(m.topic);
            return reply_ok();
        case Op::unsubscribe:
            if (!topics::is_known(m.topic)) return {error_status("unknown topic '" + m.topic + "'", m.id)};
            session.subscriptions.erase(m.topic);
            return reply_ok();
        case Op::advertise:
            if (!topics::is_command(m.topic)) {
                return {error_status("clients may only advertise command topics, not '" + m.topic + "'", m.id)};
            }
            return reply_ok();
        case Op::publish:
            if (!topics::is_command(m.topic)) {
                if (topics::is_known(m.topic)) {
                    return {error_status("topic '" + m.topic + "' is published by the server", m.id)};
                }
                return {error_status("unknown topic '" + m.topic + "'", m.id)};
            }
            apply_command(ctrl_, m.topic, *m.msg, now);
            return reply_ok();
    }
    return {error_status("unhandled op", m.id)};
}

void TwinHub::tick(double now) { twin::tick(ctrl_, now); }

std::optional<Broadcast> TwinHub::publish_joint_states(double now) const {
    Broadcast b;
    for (const auto& [id, s] : sessions_) {
        if (s.subscriptions.count(topics::joint_states)) b.recipients.push_back(id);
    }
    if (b.recipients.empty()) return std::nullopt;
    b.frame = std::make_shared<const std::string>(
        encode(TwinMessage::publish(std::string(topics::joint_states), joint_state_payload(ctrl_, now))));
    return b;
}

}  // namespace armtwin::twin
