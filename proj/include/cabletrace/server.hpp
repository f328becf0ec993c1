#pragma once

// Teleoperation server: the line protocol over TCP plus a WebSocket mirror at
// /bt on the HTTP port. One controller session at a time; every command is
// funnelled through the simulation loop's queue.

#include <cstddef>
#include <memory>
#include <string>

#include "cabletrace/protocol.hpp"
#include "cabletrace/robot.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

struct ServerOptions {
  std::string bind_address = "127.0.0.1";
  unsigned short tcp_port = kDefaultTcpPort;   // 0 picks an ephemeral port
  unsigned short http_port = kDefaultHttpPort; // 0 picks an ephemeral port
  KeyMap keymap{};
  RobotParams robot{};
  /// When set the loop only ticks through advance(); otherwise it ticks in
  /// real time at robot.tick.
  bool manual_clock = false;
  /// Stop run() on SIGINT/SIGTERM.
  bool stop_on_signal = false;
};

class Server {
 public:
  Server(WorldScenario scenario, ServerOptions options);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds both listeners. Throws on bind failure.
  void start();

  /// Runs the event loop on the calling thread until stop().
  void run();

  /// Thread-safe.
  void stop();

  unsigned short tcp_port() const;
  unsigned short http_port() const;

  /// Manual clock only: runs `ticks` loop ticks on the event loop and waits
  /// for them to finish. Thread-safe; must not be called from the loop thread.
  void advance(std::size_t ticks);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cabletrace
