#include "armtwin/twin/replay.hpp"

#include <ostream>
#include <thread>

#include "armtwin/errors.hpp"
#include "armtwin/twin/protocol.hpp"

namespace armtwin::twin {

std::vector<ReplayEntry> parse_replay_script(std::string_view text) {
    json doc = json::parse(text.begin(), text.end(), nullptr, false);
    if (doc.is_discarded()) throw SchemaError("replay script is not valid JSON");
    if (!doc.is_object() || !doc.contains("frames") || !doc["frames"].is_array()) {
        throw SchemaError("replay script must be an object with a 'frames' array");
    }
    std::vector<ReplayEntry> out;
    for (std::size_t i = 0; i < doc["frames"].size(); ++i) {
        const json& f = doc["frames"][i];
        const std::string where = "frames[" + std::to_string(i) + "]";
        if (!f.is_object()) throw SchemaError(where + " must be an object");
        for (const auto& [key, _] : f.items()) {
            if (key != "delay_ms" && key != "topic" && key != "msg") {
                throw SchemaError("unknown field '" + key + "' in " + where);
            }
        }
        ReplayEntry e;
        if (auto it = f.find("delay_ms"); it != f.end()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
                throw SchemaError(where + ".delay_ms must be a non-negative integer");
            }
            e.delay_ms = it->get<std::int64_t>();
        }
        if (!f.contains("topic") || !f["topic"].is_string()) throw SchemaError(where + ".topic must be a string");
        e.topic = f["topic"].get<std::string>();
        if (auto it = f.find("msg"); it != f.end()) {
            if (!it->is_object()) throw SchemaError(where + ".msg must be an object");
            e.msg = *it;
        }
        out.push_back(std::move(e));
    }
    return out;
}

ReplayOutcome run_replay(const std::vector<ReplayEntry>& script, const ServerAddress& server, std::ostream& out,
                         std::chrono::milliseconds reply_timeout) {
    TwinClient client;
    try {
        client.connect(server);
    } catch (const ConnectionError& e) {
        out << "connection failed: " << e.what() << "\n";
        return ReplayOutcome::connection_lost;
    }

    bool all_ok = true;
    for (std::size_t n = 0; n < script.size(); ++n) {
        const auto& entry = script[n];
        if (entry.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(entry.delay_ms));
        const std::string id = "replay-" + std::to_string(n);
        TwinMessage m = TwinMessage::publish(entry.topic, entry.msg);
        m.id = id;
        client.send(encode(m));

        const auto deadline = std::chrono::steady_clock::now() + reply_timeout;
        bool answered = false;
        while (!answered) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline -
                                                                                    std::chrono::steady_clock::now());
            if (left.count() <= 0) break;
            const auto frame = client.receive(left);
            if (!frame) break;
            const json reply = json::parse(*frame, nullptr, false);
            if (!reply.is_object() || reply.value("op", "") != "status") continue;
            if (!reply.contains("id") || reply["id"] != id) continue;
            answered = true;
            const std::string level = reply.value("level", "");
            out << id << " " << entry.topic << " -> " << (level.empty() ? "?" : level) << ": "
                << reply.value("text", "") << "\n";
            if (level != levels::ok) all_ok = false;
        }
        if (!answered) {
            out << id << " " << entry.topic << " -> no status reply (connection lost)\n";
            return ReplayOutcome::connection_lost;
        }
    }
    client.close();
    return all_ok ? ReplayOutcome::ok : ReplayOutcome::error_status;
}

}  // namespace armtwin::twin
