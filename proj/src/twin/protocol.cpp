#include "armtwin/twin/protocol.hpp"

#include <algorithm>

namespace armtwin::twin {

std::string_view to_string(Op op) {
    switch (op) {
        case Op::advertise: return "advertise";
        case Op::subscribe: return "subscribe";
        case Op::unsubscribe: return "unsubscribe";
        case Op::publish: return "publish";
        case Op::status: return "status";
    }
    return "status";
}

std::optional<Op> op_from_string(std::string_view s) {
    for (Op op : {Op::advertise, Op::subscribe, Op::unsubscribe, Op::publish, Op::status}) {
        if (to_string(op) == s) return op;
    }
    return std::nullopt;
}

bool topics::is_known(std::string_view topic) {
    return std::find(all.begin(), all.end(), topic) != all.end();
}

bool topics::is_command(std::string_view topic) {
    return std::find(commands.begin(), commands.end(), topic) != commands.end();
}

TwinMessage TwinMessage::publish(std::string topic, json msg) {
    TwinMessage m;
    m.op = Op::publish;
    m.topic = std::move(topic);
    m.msg = std::move(msg);
    return m;
}

TwinMessage TwinMessage::status(std::string_view level, std::string text, std::optional<json> id) {
    TwinMessage m;
    m.op = Op::status;
    m.level = std::string(level);
    m.text = std::move(text);
    m.id = std::move(id);
    return m;
}

TwinMessage decode(std::string_view raw) {
    // Invalid UTF-8 is rejected by the parser like any other syntax error.
    json doc = json::parse(raw.begin(), raw.end(), nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw ProtocolError("malformed frame: not valid JSON", std::nullopt);
    if (!doc.is_object()) throw ProtocolError("malformed frame: expected a JSON object", std::nullopt);

    TwinMessage m;
    if (auto it = doc.find("id"); it != doc.end()) m.id = *it;
    if (m.id && !m.id->is_string()) throw ProtocolError("field 'id' must be a string", m.id);

    const auto op_it = doc.find("op");
    if (op_it == doc.end()) throw ProtocolError("missing field 'op'", m.id);
    if (!op_it->is_string()) throw ProtocolError("field 'op' must be a string", m.id);
    const auto op = op_from_string(op_it->get_ref<const std::string&>());
    if (!op) throw ProtocolError("unknown op '" + op_it->get<std::string>() + "'", m.id);
    m.op = *op;

    if (m.op == Op::status) {
        if (auto it = doc.find("level"); it != doc.end() && it->is_string()) m.level = it->get<std::string>();
        if (auto it = doc.find("text"); it != doc.end() && it->is_string()) m.text = it->get<std::string>();
        return m;
    }

    const auto topic_it = doc.find("topic");
    if (topic_it == doc.end()) throw ProtocolError("op '" + std::string(to_string(m.op)) + "' requires 'topic'", m.id);
    if (!topic_it->is_string()) throw ProtocolError("field 'topic' must be a string", m.id);
    m.topic = topic_it->get<std::string>();

    if (auto it = doc.find("type"); it != doc.end()) {
        if (!it->is_string()) throw ProtocolError("field 'type' must be a string", m.id);
        m.type = it->get<std::string>();
    }
    if (auto it = doc.find("msg"); it != doc.end()) m.msg = *it;
    if (m.op == Op::publish) {
        if (!m.msg) throw ProtocolError("op 'publish' requires 'msg'", m.id);
        if (!m.msg->is_object()) throw ProtocolError("field 'msg' must be an object", m.id);
    }
    return m;
}

std::string encode(const TwinMessage& m) {
    json j;
    j["op"] = to_string(m.op);
    if (m.op == Op::status) {
        j["level"] = m.level;
        j["text"] = m.text;
    } else {
        j["topic"] = m.topic;
        if (m.type) j["type"] = *m.type;
        if (m.msg) j["msg"] = *m.msg;
    }
    if (m.id) j["id"] = *m.id;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

}  // namespace armtwin::twin
