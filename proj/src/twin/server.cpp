#include "armtwin/twin/server.hpp"

#include <chrono>
#include <deque>
#include <map>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "armtwin/twin/hub.hpp"

namespace armtwin::twin {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Session;

// Callbacks a session makes into the server; always invoked from the session strand.
struct SessionOwner {
    virtual ~SessionOwner() = default;
    virtual void on_open(const std::shared_ptr<Session>& s) = 0;
    virtual void on_message(const std::shared_ptr<Session>& s, std::string text) = 0;
    virtual void on_closed(SessionId id) = 0;
};

class Session : public std::enable_shared_from_this<Session> {
public:
    Session(tcp::socket&& socket, std::shared_ptr<SessionOwner> owner, SessionId id, std::size_t max_queue)
        : ws_(std::move(socket)), owner_(std::move(owner)), id_(id), max_queue_(max_queue) {}

    SessionId id() const { return id_; }

    std::string peer() const {
        beast::error_code ec;
        const auto ep = beast::get_lowest_layer(ws_).socket().remote_endpoint(ec);
        if (ec) return "unknown";
        return ep.address().to_string() + ":" + std::to_string(ep.port());
    }

    void start() {
        net::dispatch(ws_.get_executor(), [self = shared_from_this()] { self->on_run(); });
    }

    void send(std::shared_ptr<const std::string> frame) {
        net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)]() mutable {
            self->enqueue(std::move(frame));
        });
    }

    void close() {
        net::post(ws_.get_executor(), [self = shared_from_this()] { self->do_close(); });
    }

private:
    void on_run() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.read_message_max(1 << 20);
        ws_.async_accept(beast::bind_front_handler(&Session::on_accept, shared_from_this()));
    }

    void on_accept(beast::error_code ec) {
        if (ec) return finish();
        open_ = true;
        owner_->on_open(shared_from_this());
        do_read();
    }

    void do_read() {
        ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t) {
        if (ec) return finish();
        std::string text = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        owner_->on_message(shared_from_this(), std::move(text));
        do_read();
    }

    void enqueue(std::shared_ptr<const std::string> frame) {
        if (!open_ || closing_) return;
        if (queue_.size() >= max_queue_) {
            // Slow peer: drop it rather than buffer without bound.
            return do_close();
        }
        queue_.push_back(std::move(frame));
        if (queue_.size() == 1) do_write();
    }

    void do_write() {
        ws_.text(true);
        ws_.async_write(net::buffer(*queue_.front()),
                        beast::bind_front_handler(&Session::on_write, shared_from_this()));
    }

    void on_write(beast::error_code ec, std::size_t) {
        if (ec) return finish();
        queue_.pop_front();
        if (!queue_.empty()) do_write();
    }

    void do_close() {
        if (closing_) return;
        closing_ = true;
        queue_.clear();
        if (!open_) return finish();
        ws_.async_close(websocket::close_code::normal,
                        [self = shared_from_this()](beast::error_code) { self->finish(); });
    }

    void finish() {
        if (finished_) return;
        finished_ = true;
        open_ = false;
        owner_->on_closed(id_);
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::shared_ptr<const std::string>> queue_;
    std::shared_ptr<SessionOwner> owner_;
    SessionId id_;
    std::size_t max_queue_;
    bool open_ = false;
    bool closing_ = false;
    bool finished_ = false;
};

}  // namespace

struct TwinServer::Impl : SessionOwner, std::enable_shared_from_this<TwinServer::Impl> {
    Impl(RobotModel model, Options opts)
        : options(std::move(opts)),
          hub(std::make_shared<const RobotModel>(std::move(model)), ControllerConfig{options.rate_hz}),
          hub_strand(net::make_strand(ioc)),
          acceptor(ioc),
          timer(hub_strand),
          signals(ioc),
          start(std::chrono::steady_clock::now()) {}

    void bind() {
        beast::error_code ec;
        const auto addr = net::ip::make_address(options.bind_address, ec);
        if (ec) throw BindError("invalid bind address '" + options.bind_address + "': " + ec.message());
        const tcp::endpoint ep(addr, options.port);
        acceptor.open(ep.protocol(), ec);
        if (!ec) acceptor.set_option(net::socket_base::reuse_address(true), ec);
        if (!ec) acceptor.bind(ep, ec);
        if (!ec) acceptor.listen(net::socket_base::max_listen_connections, ec);
        if (ec) {
            throw BindError("cannot listen on " + options.bind_address + ":" + std::to_string(options.port) + ": " +
                            ec.message());
        }
        bound_port = acceptor.local_endpoint().port();
    }

    double now() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }

    void do_accept() {
        acceptor.async_accept(net::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket s) {
            if (ec) return;  // acceptor closed
            auto session = std::make_shared<Session>(std::move(s), self, self->next_id++, self->options.max_queue);
            session->start();
            self->do_accept();
        });
    }

    void schedule_tick() {
        timer.expires_at(next_tick);
        timer.async_wait([self = shared_from_this()](beast::error_code ec) {
            if (ec || self->stopping) return;
            self->on_tick();
        });
    }

    void on_tick() {
        const double t = now();
        hub.tick(t);
        if (auto b = hub.publish_joint_states(t)) {
            for (const SessionId id : b->recipients) {
                if (auto it = sessions.find(id); it != sessions.end()) it->second->send(b->frame);
            }
        }
        const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / options.rate_hz));
        next_tick += period;
        // Fell behind by more than a period: resynchronize instead of bursting.
        if (next_tick < std::chrono::steady_clock::now()) next_tick = std::chrono::steady_clock::now() + period;
        schedule_tick();
    }

    // SessionOwner: hop onto the hub strand for everything touching state.
    void on_open(const std::shared_ptr<Session>& s) override {
        net::post(hub_strand, [self = shared_from_this(), s, peer = s->peer()] {
            if (self->stopping) return s->close();
            self->sessions[s->id()] = s;
            for (auto& frame : self->hub.connect(s->id(), peer, self->now())) {
                s->send(std::make_shared<const std::string>(std::move(frame)));
            }
        });
    }

    void on_message(const std::shared_ptr<Session>& s, std::string text) override {
        net::post(hub_strand, [self = shared_from_this(), s, text = std::move(text)] {
            for (auto& reply : self->hub.handle_client_message(s->id(), text, self->now())) {
                s->send(std::make_shared<const std::string>(std::move(reply)));
            }
        });
    }

    void on_closed(SessionId id) override {
        net::post(hub_strand, [self = shared_from_this(), id] {
            self->sessions.erase(id);
            self->hub.disconnect(id);
            if (self->stopping && self->sessions.empty() && self->grace) self->grace->cancel();
        });
    }

    void stop() {
        net::post(hub_strand, [self = shared_from_this()] {
            if (self->stopping) return;
            self->stopping = true;
            beast::error_code ec;
            self->acceptor.close(ec);
            self->timer.cancel();
            self->signals.cancel(ec);
            for (auto& [id, s] : self->sessions) s->close();
            self->work.reset();
            if (self->sessions.empty()) return self->ioc.stop();
            // Peers that never answer the close handshake must not hold run() open.
            // The last session to close cancels this early.
            self->grace.emplace(self->ioc, std::chrono::seconds(2));
            self->grace->async_wait([self](beast::error_code) { self->ioc.stop(); });
        });
    }

    Options options;
    net::io_context ioc;
    TwinHub hub;
    net::strand<net::io_context::executor_type> hub_strand;
    tcp::acceptor acceptor;
    net::steady_timer timer;
    net::signal_set signals;
    std::optional<net::steady_timer> grace;
    unsigned short bound_port = 0;
    std::optional<net::executor_work_guard<net::io_context::executor_type>> work{ioc.get_executor()};
    std::map<SessionId, std::shared_ptr<Session>> sessions;
    std::chrono::steady_clock::time_point start;
    std::chrono::steady_clock::time_point next_tick;
    SessionId next_id = 1;
    bool stopping = false;
};

TwinServer::TwinServer(RobotModel model, Options options) {
    if (!(options.rate_hz > 0.0)) throw std::invalid_argument("rate_hz must be positive");
    impl_ = std::make_shared<Impl>(std::move(model), std::move(options));
    impl_->bind();
}

TwinServer::~TwinServer() {
    if (impl_) {
        impl_->ioc.stop();
    }
}

unsigned short TwinServer::port() const { return impl_->bound_port; }

std::string TwinServer::address() const {
    return "ws://" + impl_->options.bind_address + ":" + std::to_string(port());
}

void TwinServer::run() {
    impl_->do_accept();
    net::post(impl_->hub_strand, [impl = impl_] {
        impl->next_tick = std::chrono::steady_clock::now();
        impl->schedule_tick();
    });
    std::vector<std::thread> pool;
    for (int i = 1; i < impl_->options.threads; ++i) pool.emplace_back([impl = impl_] { impl->ioc.run(); });
    impl_->ioc.run();
    for (auto& t : pool) t.join();
}

void TwinServer::stop() { impl_->stop(); }

void TwinServer::stop_on_signals() {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([impl = impl_](beast::error_code ec, int) {
        if (!ec) impl->stop();
    });
}

}  // namespace armtwin::twin
