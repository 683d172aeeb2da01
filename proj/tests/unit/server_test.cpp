#include <thread>

#include <gtest/gtest.h>

#include "armtwin/twin/client.hpp"
#include "armtwin/twin/protocol.hpp"
#include "armtwin/twin/replay.hpp"
#include "armtwin/twin/server.hpp"

using namespace armtwin;
using namespace armtwin::twin;
using namespace std::chrono_literals;

namespace {

struct RunningServer {
    explicit RunningServer(const char* robot, double rate = 30.0) {
        TwinServer::Options opts;
        opts.bind_address = "127.0.0.1";
        opts.port = 0;
        opts.rate_hz = rate;
        server = std::make_unique<TwinServer>(builtin_preset(robot), opts);
        thread = std::thread([this] { server->run(); });
    }
    ~RunningServer() {
        server->stop();
        thread.join();
    }
    ServerAddress address() const { return {"127.0.0.1", server->port()}; }

    std::unique_ptr<TwinServer> server;
    std::thread thread;
};

// Reads until a frame satisfies `pred` or the timeout passes.
template <typename Pred>
std::optional<json> wait_for(TwinClient& c, Pred pred, std::chrono::milliseconds timeout = 3s) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        const auto f = c.receive(std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()));
        if (!f) break;
        const json j = json::parse(*f);
        if (pred(j)) return std::optional<json>(std::in_place, j);
    }
    return std::nullopt;
}

}  // namespace

TEST(Server, BindsEphemeralPort) {
    RunningServer s("planar2r");
    EXPECT_GT(s.server->port(), 0);
    EXPECT_EQ(s.server->address(), "ws://127.0.0.1:" + std::to_string(s.server->port()));
}

TEST(Server, BindFailureThrows) {
    RunningServer s("planar2r");
    TwinServer::Options opts;
    opts.bind_address = "127.0.0.1";
    opts.port = s.server->port();
    // reuse_address does not allow two listeners on Linux.
    EXPECT_THROW(TwinServer(builtin_preset("planar2r"), opts), BindError);
    opts.bind_address = "not-an-address";
    EXPECT_THROW(TwinServer(builtin_preset("planar2r"), opts), BindError);
}

TEST(Server, AdvertiseSubscribeCommandRoundTrip) {
    RunningServer s("tracker4dof");
    TwinClient c;
    c.connect(s.address());
    int adverts = 0;
    for (int i = 0; i < 5; ++i) {
        auto f = c.receive(2s);
        ASSERT_TRUE(f);
        adverts += json::parse(*f)["op"] == "advertise";
    }
    EXPECT_EQ(adverts, 5);

    c.send(R"({"op":"subscribe","topic":"/joint_states","id":"sub"})");
    auto st = wait_for(c, [](const json& j) { return j["op"] == "status" && j["id"] == "sub"; });
    ASSERT_TRUE(st);
    EXPECT_EQ((*st)["level"], "none");

    c.send(R"({"op":"publish","topic":"/cmd/joint","msg":{"index":0,"position":0.7},"id":"j"})");
    ASSERT_TRUE(wait_for(c, [](const json& j) { return j["op"] == "status" && j["id"] == "j"; }));
    auto frame = wait_for(c, [](const json& j) { return j["op"] == "publish" && j["msg"]["position"][0] == 0.7; });
    ASSERT_TRUE(frame);

    c.send(R"({"op":"fly","id":"bad"})");
    st = wait_for(c, [](const json& j) { return j["op"] == "status" && j["id"] == "bad"; });
    ASSERT_TRUE(st);
    EXPECT_EQ((*st)["level"], "error");
    EXPECT_TRUE(c.is_open());
}

TEST(Server, ReplayScript) {
    RunningServer s("planar2r");
    const auto ok = parse_replay_script(R"({"frames":[
        {"delay_ms":0,"topic":"/cmd/joint","msg":{"index":0,"position":0.5}},
        {"delay_ms":10,"topic":"/cmd/pose","msg":{"x":1,"psi":0,"y":1,"theta":0,"z":0,"phi":0}},
        {"topic":"/cmd/stop"}]})");
    std::ostringstream out;
    EXPECT_EQ(run_replay(ok, s.address(), out), ReplayOutcome::ok);
    EXPECT_NE(out.str().find("replay-2"), std::string::npos);

    const auto bad = parse_replay_script(R"({"frames":[{"topic":"/cmd/fly","msg":{}}]})");
    std::ostringstream out2;
    EXPECT_EQ(run_replay(bad, s.address(), out2), ReplayOutcome::error_status);

    std::ostringstream out3;
    EXPECT_EQ(run_replay({}, s.address(), out3), ReplayOutcome::ok);
}

TEST(Server, ReplayWithoutServerIsConnectionLoss) {
    unsigned short port;
    {
        RunningServer s("planar2r");
        port = s.server->port();
    }
    const auto script = parse_replay_script(R"({"frames":[{"topic":"/cmd/stop"}]})");
    std::ostringstream out;
    EXPECT_EQ(run_replay(script, {"127.0.0.1", port}, out), ReplayOutcome::connection_lost);
}

TEST(Server, StopClosesSessions) {
    auto s = std::make_unique<RunningServer>("planar2r");
    TwinClient c;
    c.connect(s->address());
    ASSERT_TRUE(c.receive(2s));
    const auto t0 = std::chrono::steady_clock::now();
    s.reset();
    EXPECT_LT(std::chrono::steady_clock::now() - t0, 2s);
    const auto deadline = std::chrono::steady_clock::now() + 2s;
    while (c.is_open() && std::chrono::steady_clock::now() < deadline) c.receive(50ms);
    EXPECT_FALSE(c.is_open());
}

TEST(ReplayScript, Parsing) {
    EXPECT_THROW(parse_replay_script("nope"), SchemaError);
    EXPECT_THROW(parse_replay_script(R"({"frames":[{"topic":"/cmd/stop","delay_ms":-1}]})"), SchemaError);
    EXPECT_THROW(parse_replay_script(R"({"frames":[{"topic":"/cmd/stop","extra":1}]})"), SchemaError);
    EXPECT_THROW(parse_replay_script(R"({"frames":[{"msg":{}}]})"), SchemaError);
    const auto s = parse_replay_script(R"({"frames":[{"topic":"/cmd/stop"}]})");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].msg, json::object());
}

TEST(ServerAddress, Parsing) {
    auto a = parse_server_address("ws://localhost:9091");
    EXPECT_EQ(a.host, "localhost");
    EXPECT_EQ(a.port, 9091);
    a = parse_server_address("9092");
    EXPECT_EQ(a.host, "127.0.0.1");
    EXPECT_EQ(a.port, 9092);
    EXPECT_THROW(parse_server_address("host:0"), std::invalid_argument);
    EXPECT_THROW(parse_server_address("host:abc"), std::invalid_argument);
}
