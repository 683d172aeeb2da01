#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "armtwin/errors.hpp"

namespace armtwin::twin {

class ConnectionError : public Error {
public:
    using Error::Error;
};

struct ServerAddress {
    std::string host = "127.0.0.1";
    unsigned short port = 9090;
};

/// Accepts "ws://host:port", "host:port" or a bare port. Throws std::invalid_argument.
ServerAddress parse_server_address(const std::string& text);

/// Minimal WebSocket client: frames are read on a background thread into a
/// queue; send() is safe from any thread.
class TwinClient {
public:
    TwinClient();
    ~TwinClient();

    TwinClient(const TwinClient&) = delete;
    TwinClient& operator=(const TwinClient&) = delete;

    /// Throws ConnectionError.
    void connect(const ServerAddress& address, std::chrono::milliseconds timeout = std::chrono::seconds(5));
    void send(std::string text);

    /// Next inbound frame, or nullopt on timeout or once the connection is gone
    /// and the queue is drained.
    std::optional<std::string> receive(std::chrono::milliseconds timeout);

    bool is_open() const;
    void close();

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace armtwin::twin
