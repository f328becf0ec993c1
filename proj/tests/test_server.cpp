#include <doctest.h>

#include <sys/socket.h>
#include <sys/time.h>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <thread>

#include "cabletrace/server.hpp"

using namespace cabletrace;
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

WorldScenario golden() {
  return load_scenario_file(CABLETRACE_SOURCE_DIR "/scenarios/golden.toml");
}

void set_timeout(tcp::socket& s) {
  timeval tv{5, 0};
  ::setsockopt(s.native_handle(), SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

// Runs a manual-clock server on ephemeral ports for the test's lifetime.
struct Harness {
  explicit Harness(ServerOptions opts = {}) : server(golden(), configure(opts)) {
    server.start();
    thread = std::thread([this] { server.run(); });
  }
  ~Harness() {
    server.stop();
    thread.join();
  }
  static ServerOptions configure(ServerOptions o) {
    o.tcp_port = 0;
    o.http_port = 0;
    o.manual_clock = true;
    return o;
  }
  Server server;
  std::thread thread;
};

// Line-oriented client: the same calls drive either transport.
class Client {
 public:
  virtual ~Client() = default;
  virtual void send(const std::string& frame) = 0;
  virtual std::string receive() = 0;  // one frame including '\n'; "" on close
  std::string transcript;
};

class TcpClient final : public Client {
 public:
  explicit TcpClient(unsigned short port) : socket_(ioc_) {
    socket_.connect({asio::ip::make_address("127.0.0.1"), port});
    set_timeout(socket_);
  }
  void send(const std::string& frame) override { asio::write(socket_, asio::buffer(frame)); }
  std::string receive() override {
    beast::error_code ec;
    const std::size_t n = asio::read_until(socket_, buf_, '\n', ec);
    if (ec) return {};
    std::string line(asio::buffers_begin(buf_.data()), asio::buffers_begin(buf_.data()) + n);
    buf_.consume(n);
    transcript += line;
    return line;
  }

 private:
  asio::io_context ioc_;
  tcp::socket socket_;
  asio::streambuf buf_;
};

class WsClient final : public Client {
 public:
  explicit WsClient(unsigned short port, const std::string& path = "/bt") : ws_(ioc_) {
    ws_.next_layer().connect({asio::ip::make_address("127.0.0.1"), port});
    set_timeout(ws_.next_layer());
    ws_.handshake("127.0.0.1", path);
    ws_.text(true);
  }
  void send(const std::string& frame) override { ws_.write(asio::buffer(frame)); }
  std::string receive() override {
    beast::flat_buffer buf;
    beast::error_code ec;
    ws_.read(buf, ec);
    if (ec) return {};
    std::string msg = beast::buffers_to_string(buf.data());
    transcript += msg;
    return msg;
  }

 private:
  asio::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

void handshake(Client& c) {
  c.send("PAIR HC-05\n");
  CHECK(c.receive() == "OK PAIRED\n");
  c.send("MODE CONTROLLER\n");
  CHECK(c.receive() == "OK\n");
}

// Fixed session history used to compare transports.
std::string scripted_session(Client& c, Server& server) {
  c.send("PAIR HC-05\n");
  c.receive();
  server.advance(2);  // not in controller mode yet: no telemetry
  c.send("MODE CONTROLLER\n");
  c.receive();
  c.send("F\n");
  c.receive();
  server.advance(5);
  for (int i = 0; i < 5; ++i) c.receive();
  c.send("L\n");
  c.receive();
  server.advance(3);
  for (int i = 0; i < 3; ++i) c.receive();
  c.send("Q\n");
  c.receive();
  server.advance(2);  // reset to Unpaired: silent again
  c.send("PAIR HC-05\n");
  c.receive();
  return c.transcript;
}

}  // namespace

TEST_CASE("tcp handshake, drive and telemetry") {
  Harness h;
  TcpClient c(h.server.tcp_port());
  handshake(c);
  c.send("F\n");
  CHECK(c.receive() == "ACK F\n");
  h.server.advance(1);
  CHECK(c.receive() == "TLM 0.100000 0.010000 0.000000 0.000000 44.497960 1 0\n");
  h.server.advance(2);
  const TelemetryFrame a = parse_telemetry(c.receive());
  const TelemetryFrame b = parse_telemetry(c.receive());
  CHECK(a.t == doctest::Approx(0.2));
  CHECK(b.t == doctest::Approx(0.3));
  CHECK(b.x > a.x);
}

TEST_CASE("no telemetry before controller mode") {
  Harness h;
  TcpClient c(h.server.tcp_port());
  c.send("PAIR HC-05\n");
  CHECK(c.receive() == "OK PAIRED\n");
  h.server.advance(5);
  c.send("MODE CONTROLLER\n");
  CHECK(c.receive() == "OK\n");
}

TEST_CASE("protocol errors reset the session and stop telemetry") {
  Harness h;
  TcpClient c(h.server.tcp_port());
  handshake(c);
  c.send("X\n");
  CHECK(c.receive() == "ERR unmapped character\n");
  h.server.advance(3);
  c.send("F\n");
  CHECK(c.receive() == "ERR wrong state\n");
  c.send("PAIR HC-05\r\n");
  CHECK(c.receive() == "OK PAIRED\n");
}

TEST_CASE("second controller is turned away") {
  Harness h;
  TcpClient first(h.server.tcp_port());
  handshake(first);

  TcpClient second(h.server.tcp_port());
  CHECK(second.receive() == "ERR busy\n");
  CHECK(second.receive().empty());  // closed

  WsClient third(h.server.http_port());
  CHECK(third.receive() == "ERR busy\n");

  // the first session is unaffected
  first.send("S\n");
  CHECK(first.receive() == "ACK S\n");
}

TEST_CASE("slot frees when the controller disconnects") {
  Harness h;
  {
    TcpClient first(h.server.tcp_port());
    handshake(first);
  }
  h.server.advance(1);  // lets the loop observe the close
  for (int attempt = 0; attempt < 50; ++attempt) {
    TcpClient next(h.server.tcp_port());
    next.send("PAIR HC-05\n");
    const std::string reply = next.receive();
    if (reply == "OK PAIRED\n") return;
    CHECK(reply == "ERR busy\n");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  FAIL("session slot never freed");
}

TEST_CASE("websocket mirror carries byte-identical frames") {
  std::string tcp_log;
  std::string ws_log;
  {
    Harness h;
    TcpClient c(h.server.tcp_port());
    tcp_log = scripted_session(c, h.server);
  }
  {
    Harness h;
    WsClient c(h.server.http_port());
    ws_log = scripted_session(c, h.server);
  }
  CHECK(tcp_log == ws_log);
  CHECK(tcp_log.find("TLM 0.300000 0.010000") != std::string::npos);
  CHECK(tcp_log.find("ERR unmapped character\n") != std::string::npos);
}

TEST_CASE("keymap option remaps drive characters") {
  ServerOptions opts;
  opts.keymap = KeyMap::parse("forward W\n");
  Harness h(opts);
  WsClient c(h.server.http_port());
  handshake(c);
  c.send("W\n");
  CHECK(c.receive() == "ACK W\n");
}

TEST_CASE("http paths other than /bt are not served") {
  Harness h;
  asio::io_context ioc;
  tcp::socket s(ioc);
  s.connect({asio::ip::make_address("127.0.0.1"), h.server.http_port()});
  set_timeout(s);
  http::request<http::empty_body> req{http::verb::get, "/", 11};
  req.set(http::field::host, "127.0.0.1");
  http::write(s, req);
  beast::flat_buffer buf;
  http::response<http::string_body> res;
  http::read(s, buf, res);
  CHECK(res.result() == http::status::not_found);

  CHECK_THROWS(WsClient(h.server.http_port(), "/other"));
}

TEST_CASE("real-time clock ticks on its own") {
  ServerOptions opts;
  opts.tcp_port = 0;
  opts.http_port = 0;
  Server server(golden(), opts);
  server.start();
  std::thread t([&] { server.run(); });
  {
    TcpClient c(server.tcp_port());
    handshake(c);
    const TelemetryFrame f1 = parse_telemetry(c.receive());
    const TelemetryFrame f2 = parse_telemetry(c.receive());
    CHECK(f2.t > f1.t);
  }
  server.stop();
  t.join();
}
