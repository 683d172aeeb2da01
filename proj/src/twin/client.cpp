#include "armtwin/twin/client.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace armtwin::twin {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

ServerAddress parse_server_address(const std::string& text) {
    std::string rest = text;
    if (rest.rfind("ws://", 0) == 0) rest = rest.substr(5);
    if (!rest.empty() && rest.back() == '/') rest.pop_back();
    ServerAddress addr;
    const auto colon = rest.rfind(':');
    std::string port_text = rest;
    if (colon != std::string::npos) {
        addr.host = rest.substr(0, colon);
        port_text = rest.substr(colon + 1);
    }
    if (addr.host.empty()) throw std::invalid_argument("missing host in server address '" + text + "'");
    try {
        std::size_t used = 0;
        const long port = std::stol(port_text, &used);
        if (used != port_text.size() || port <= 0 || port > 65535) throw std::out_of_range("port");
        addr.port = static_cast<unsigned short>(port);
    } catch (const std::exception&) {
        throw std::invalid_argument("bad port in server address '" + text + "'");
    }
    return addr;
}

struct TwinClient::Impl : std::enable_shared_from_this<TwinClient::Impl> {
    net::io_context ioc;
    websocket::stream<beast::tcp_stream> ws{net::make_strand(ioc)};
    beast::flat_buffer buffer;
    std::deque<std::string> outbox;
    std::thread worker;

    mutable std::mutex mu;
    std::condition_variable cv;
    std::deque<std::string> inbox;
    bool open = false;

    void do_read() {
        ws.async_read(buffer, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->mark_closed();
            {
                std::lock_guard lock(self->mu);
                self->inbox.push_back(beast::buffers_to_string(self->buffer.data()));
            }
            self->buffer.consume(self->buffer.size());
            self->cv.notify_all();
            self->do_read();
        });
    }

    void enqueue(std::string text) {
        outbox.push_back(std::move(text));
        if (outbox.size() == 1) do_write();
    }

    void do_write() {
        ws.text(true);
        ws.async_write(net::buffer(outbox.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) return self->mark_closed();
            self->outbox.pop_front();
            if (!self->outbox.empty()) self->do_write();
        });
    }

    void mark_closed() {
        {
            std::lock_guard lock(mu);
            open = false;
        }
        cv.notify_all();
    }
};

TwinClient::TwinClient() : impl_(std::make_shared<Impl>()) {}

TwinClient::~TwinClient() { close(); }

void TwinClient::connect(const ServerAddress& address, std::chrono::milliseconds timeout) {
    auto& impl = *impl_;
    beast::error_code ec;
    tcp::resolver resolver(impl.ioc);
    const auto results = resolver.resolve(address.host, std::to_string(address.port), ec);
    if (ec) throw ConnectionError("cannot resolve " + address.host + ": " + ec.message());
    auto& stream = beast::get_lowest_layer(impl.ws);
    stream.expires_after(timeout);
    stream.connect(results, ec);
    if (ec) {
        throw ConnectionError("cannot connect to " + address.host + ":" + std::to_string(address.port) + ": " +
                              ec.message());
    }
    stream.expires_never();
    impl.ws.handshake(address.host + ":" + std::to_string(address.port), "/", ec);
    if (ec) throw ConnectionError("websocket handshake failed: " + ec.message());
    impl.ws.read_message_max(1 << 24);
    {
        std::lock_guard lock(impl.mu);
        impl.open = true;
    }
    impl.do_read();
    impl.worker = std::thread([self = impl_] { self->ioc.run(); });
}

void TwinClient::send(std::string text) {
    net::post(impl_->ws.get_executor(),
              [self = impl_, text = std::move(text)]() mutable { self->enqueue(std::move(text)); });
}

std::optional<std::string> TwinClient::receive(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait_for(lock, timeout, [&] { return !impl_->inbox.empty() || !impl_->open; });
    if (impl_->inbox.empty()) return std::nullopt;
    std::string front = std::move(impl_->inbox.front());
    impl_->inbox.pop_front();
    return front;
}

bool TwinClient::is_open() const {
    std::lock_guard lock(impl_->mu);
    return impl_->open;
}

void TwinClient::close() {
    if (!impl_->worker.joinable()) return;
    net::post(impl_->ws.get_executor(), [self = impl_] {
        if (!self->ws.is_open()) return;
        self->ws.async_close(websocket::close_code::normal, [self](beast::error_code) { self->mark_closed(); });
    });
    // The read loop ends when the close handshake finishes (or the peer is gone).
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    while (!impl_->ioc.stopped() && std::chrono::steady_clock::now() < deadline && is_open()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    impl_->ioc.stop();
    impl_->worker.join();
}

}  // namespace armtwin::twin
