#include "cabletrace/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <csignal>
#include <deque>
#include <future>
#include <stdexcept>

#include "cabletrace/errors.hpp"
#include "cabletrace/simulation.hpp"

namespace cabletrace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxLineBytes = 1024;

class Session : public std::enable_shared_from_this<Session> {
 public:
  virtual ~Session() = default;
  virtual void start() = 0;
  virtual void deliver(std::string frame) = 0;
  virtual void close() = 0;

  SessionState state = SessionState::Unpaired;
};

// What a session needs from the server; all calls happen on the loop thread.
class SessionHost {
 public:
  virtual ~SessionHost() = default;
  virtual void on_line(const std::shared_ptr<Session>& s, std::string_view line) = 0;
  virtual bool claim(const std::shared_ptr<Session>& s) = 0;
  virtual void release(const Session* s) = 0;
};

}  // namespace

struct Server::Impl final : SessionHost {
  Impl(WorldScenario sc, ServerOptions opts)
      : options(std::move(opts)),
        tcp_acceptor(ioc),
        http_acceptor(ioc),
        timer(ioc),
        signals(ioc),
        loop(std::move(sc), options.robot) {}

  void listen(tcp::acceptor& acc, unsigned short port) {
    const tcp::endpoint ep(asio::ip::make_address(options.bind_address), port);
    acc.open(ep.protocol());
    acc.set_option(asio::socket_base::reuse_address(true));
    acc.bind(ep);
    acc.listen();
  }

  void accept_tcp();
  void accept_http();
  void schedule_tick();
  void on_tick();
  void on_line(const std::shared_ptr<Session>& s, std::string_view line) override;
  bool claim(const std::shared_ptr<Session>& s) override;
  void release(const Session* s) override;

  asio::io_context ioc;
  ServerOptions options;
  tcp::acceptor tcp_acceptor;
  tcp::acceptor http_acceptor;
  asio::steady_timer timer;
  asio::signal_set signals;
  std::chrono::steady_clock::time_point next_tick;
  SimulationLoop loop;
  std::deque<DriveCommand> pending;
  std::shared_ptr<Session> active;
};

namespace {

class TcpSession final : public Session {
 public:
  TcpSession(tcp::socket socket, SessionHost& server)
      : socket_(std::move(socket)), server_(server), input_(kMaxLineBytes) {}

  void start() override {
    if (!server_.claim(shared_from_this())) {
      deliver(std::string(kBusyReply) + "\n");
      closing_ = true;
      return;
    }
    read();
  }

  void deliver(std::string frame) override {
    if (closed_) return;
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1) write();
  }

  void close() override {
    if (closed_) return;
    closed_ = true;
    beast::error_code ec;
    socket_.shutdown(tcp::socket::shutdown_both, ec);
    socket_.close(ec);
    server_.release(this);
  }

 private:
  void read() {
    asio::async_read_until(socket_, input_, '\n',
                           [self = shared_from_this(), this](beast::error_code ec, std::size_t n) {
                             if (ec) {
                               close();
                               return;
                             }
                             std::string line(asio::buffers_begin(input_.data()),
                                              asio::buffers_begin(input_.data()) + n);
                             input_.consume(n);
                             server_.on_line(self, line);
                             if (!closed_) read();
                           });
  }

  void write() {
    asio::async_write(socket_, asio::buffer(outbox_.front()),
                      [self = shared_from_this(), this](beast::error_code ec, std::size_t) {
                        if (ec) {
                          close();
                          return;
                        }
                        outbox_.pop_front();
                        if (!outbox_.empty()) {
                          write();
                        } else if (closing_) {
                          close();
                        }
                      });
  }

  tcp::socket socket_;
  SessionHost& server_;
  asio::streambuf input_;
  std::deque<std::string> outbox_;
  bool closing_ = false;
  bool closed_ = false;
};

class WsSession final : public Session {
 public:
  WsSession(tcp::socket socket, SessionHost& server)
      : ws_(std::move(socket)), server_(server) {}

  void start() override {
    http::async_read(ws_.next_layer(), buffer_, request_,
                     [self = shared_from_this(), this](beast::error_code ec, std::size_t) {
                       if (ec) {
                         shutdown_tcp();
                         return;
                       }
                       if (!websocket::is_upgrade(request_) ||
                           std::string_view(request_.target().data(), request_.target().size()) != kWebSocketPath) {
                         reject();
                         return;
                       }
                       upgrade();
                     });
  }

  void deliver(std::string frame) override {
    if (closed_ || !upgraded_) return;
    outbox_.push_back(std::move(frame));
    if (outbox_.size() == 1) write();
  }

  void close() override {
    if (closed_) return;
    closed_ = true;
    if (upgraded_) {
      ws_.async_close(websocket::close_code::normal,
                      [self = shared_from_this(), this](beast::error_code) { shutdown_tcp(); });
    } else {
      shutdown_tcp();
    }
    server_.release(this);
  }

 private:
  void reject() {
    response_ = {http::status::not_found, request_.version()};
    response_.set(http::field::content_type, "text/plain");
    response_.body() = "not found\n";
    response_.keep_alive(false);
    response_.prepare_payload();
    http::async_write(ws_.next_layer(), response_,
                      [self = shared_from_this(), this](beast::error_code, std::size_t) {
                        shutdown_tcp();
                      });
  }

  void upgrade() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(request_, [self = shared_from_this(), this](beast::error_code ec) {
      if (ec) {
        shutdown_tcp();
        return;
      }
      upgraded_ = true;
      ws_.text(true);
      if (!server_.claim(shared_from_this())) {
        deliver(std::string(kBusyReply) + "\n");
        closing_ = true;
        return;
      }
      read();
    });
  }

  void read() {
    buffer_.consume(buffer_.size());
    ws_.async_read(buffer_, [self = shared_from_this(), this](beast::error_code ec, std::size_t) {
      if (ec) {
        close();
        return;
      }
      const std::string message = beast::buffers_to_string(buffer_.data());
      // a message normally carries one frame; split defensively if it has more
      std::size_t pos = 0;
      while (pos < message.size() && !closed_) {
        const std::size_t nl = message.find('\n', pos);
        const std::size_t end = nl == std::string::npos ? message.size() : nl;
        server_.on_line(self, std::string_view(message).substr(pos, end - pos));
        pos = end + 1;
      }
      if (message.empty()) server_.on_line(self, "");
      if (!closed_) read();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(outbox_.front()),
                    [self = shared_from_this(), this](beast::error_code ec, std::size_t) {
                      if (ec) {
                        close();
                        return;
                      }
                      outbox_.pop_front();
                      if (!outbox_.empty()) {
                        write();
                      } else if (closing_) {
                        close();
                      }
                    });
  }

  void shutdown_tcp() {
    beast::error_code ec;
    ws_.next_layer().socket().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().socket().close(ec);
  }

  websocket::stream<beast::tcp_stream> ws_;
  SessionHost& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> request_;
  http::response<http::string_body> response_;
  std::deque<std::string> outbox_;
  bool upgraded_ = false;
  bool closing_ = false;
  bool closed_ = false;
};

}  // namespace

void Server::Impl::accept_tcp() {
  tcp_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<TcpSession>(std::move(socket), *this)->start();
    accept_tcp();
  });
}

void Server::Impl::accept_http() {
  http_acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<WsSession>(std::move(socket), *this)->start();
    accept_http();
  });
}

void Server::Impl::schedule_tick() {
  next_tick += std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(options.robot.tick));
  timer.expires_at(next_tick);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    on_tick();
    schedule_tick();
  });
}

void Server::Impl::on_tick() {
  while (!pending.empty()) {
    loop.command(pending.front());
    pending.pop_front();
  }
  const TelemetryFrame frame = loop.tick();
  if (active && active->state == SessionState::ControllerMode) {
    active->deliver(encode_telemetry(frame) + "\n");
  }
}

void Server::Impl::on_line(const std::shared_ptr<Session>& s, std::string_view line) {
  if (s != active) return;
  LineResult result = handle_line(s->state, line, options.keymap);
  s->state = result.state;
  s->deliver(result.reply + "\n");
  if (result.command) pending.push_back(*result.command);
}

bool Server::Impl::claim(const std::shared_ptr<Session>& s) {
  if (active) return false;
  active = s;
  return true;
}

void Server::Impl::release(const Session* s) {
  if (active.get() != s) return;
  active.reset();
  // a dropped controller must not leave the robot driving
  pending.push_back(DriveCommand::Stop);
}

Server::Server(WorldScenario scenario, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  impl_->listen(impl_->tcp_acceptor, impl_->options.tcp_port);
  impl_->listen(impl_->http_acceptor, impl_->options.http_port);
  impl_->accept_tcp();
  impl_->accept_http();
  if (impl_->options.stop_on_signal) {
    impl_->signals.add(SIGINT);
    impl_->signals.add(SIGTERM);
    impl_->signals.async_wait([this](beast::error_code ec, int) {
      if (!ec) impl_->ioc.stop();
    });
  }
  if (!impl_->options.manual_clock) {
    impl_->next_tick = std::chrono::steady_clock::now();
    impl_->schedule_tick();
  }
}

void Server::run() {
  auto guard = asio::make_work_guard(impl_->ioc);
  impl_->ioc.run();
}

void Server::stop() {
  if (impl_) impl_->ioc.stop();
}

unsigned short Server::tcp_port() const { return impl_->tcp_acceptor.local_endpoint().port(); }

unsigned short Server::http_port() const { return impl_->http_acceptor.local_endpoint().port(); }

void Server::advance(std::size_t ticks) {
  if (!impl_->options.manual_clock) throw std::logic_error("advance() needs manual_clock");
  std::promise<void> done;
  auto finished = done.get_future();
  asio::post(impl_->ioc, [this, ticks, &done] {
    for (std::size_t i = 0; i < ticks; ++i) impl_->on_tick();
    done.set_value();
  });
  finished.wait();
}

}  // namespace cabletrace
