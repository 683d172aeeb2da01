#pragma once

#include <memory>
#include <string>

#include "armtwin/errors.hpp"
#include "armtwin/robot_model.hpp"
#include "armtwin/twin/controller.hpp"

namespace armtwin::twin {

class BindError : public Error {
public:
    using Error::Error;
};

/// WebSocket front end for TwinHub. One strand owns the hub (commands, ticks,
/// session table); each connection has its own strand and write queue, so a
/// slow peer never stalls the tick loop. Peers whose queue overflows are dropped.
class TwinServer {
public:
    struct Options {
        std::string bind_address = "0.0.0.0";
        unsigned short port = 9090;  // 0 picks an ephemeral port
        double rate_hz = 30.0;
        std::size_t max_queue = 256;
        int threads = 2;
    };

    /// Binds and listens immediately. Throws BindError.
    TwinServer(RobotModel model, Options options);
    ~TwinServer();

    TwinServer(const TwinServer&) = delete;
    TwinServer& operator=(const TwinServer&) = delete;

    unsigned short port() const;
    std::string address() const;

    /// Serves until stop() (or a handled signal). Blocks the caller.
    void run();
    /// Closes every session and makes run() return. Safe from any thread.
    void stop();
    /// Routes SIGINT/SIGTERM to stop(). Call before run().
    void stop_on_signals();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace armtwin::twin
