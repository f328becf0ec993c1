#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "cabletrace/errors.hpp"
#include "cabletrace/protocol.hpp"

using namespace cabletrace;

TEST_CASE("pairing handshake") {
  LineResult r = handle_line(SessionState::Unpaired, "PAIR HC-05\n");
  CHECK(r.state == SessionState::Paired);
  CHECK(r.reply == "OK PAIRED");
  CHECK_FALSE(r.command);

  r = handle_line(SessionState::Paired, "MODE CONTROLLER\r\n");
  CHECK(r.state == SessionState::ControllerMode);
  CHECK(r.reply == "OK");
}

TEST_CASE("drive characters in controller mode") {
  LineResult r = handle_line(SessionState::ControllerMode, "F\n");
  CHECK(r.state == SessionState::ControllerMode);
  CHECK(r.reply == "ACK F");
  REQUIRE(r.command);
  CHECK(*r.command == DriveCommand::Forward);

  const char keys[] = {'F', 'B', 'L', 'R', 'S'};
  for (int i = 0; i < 5; ++i) {
    r = handle_line(SessionState::ControllerMode, std::string(1, keys[i]));
    REQUIRE(r.command);
    CHECK(*r.command == static_cast<DriveCommand>(i));
  }
}

TEST_CASE("errors reset the session") {
  LineResult r = handle_line(SessionState::Unpaired, "F");
  CHECK(r.state == SessionState::Unpaired);
  CHECK(r.reply == "ERR wrong state");
  CHECK_FALSE(r.command);

  r = handle_line(SessionState::ControllerMode, "PAIR HC-05");
  CHECK(r.state == SessionState::Unpaired);
  CHECK(r.reply == "ERR wrong state");

  r = handle_line(SessionState::ControllerMode, "X");
  CHECK(r.state == SessionState::Unpaired);
  CHECK(r.reply == "ERR unmapped character");

  r = handle_line(SessionState::Paired, "HELLO");
  CHECK(r.state == SessionState::Unpaired);
  CHECK(r.reply == "ERR unknown frame");

  r = handle_line(SessionState::ControllerMode, "");
  CHECK(r.state == SessionState::Unpaired);
  CHECK(r.reply == "ERR unknown frame");
}

TEST_CASE("controller mode is unreachable without passing through Paired") {
  const std::vector<std::string> alphabet = {
      "PAIR HC-05", "MODE CONTROLLER", "F", "B", "L", "R", "S", "X", "", "pair hc-05", "FF"};
  const SessionState starts[] = {SessionState::Unpaired, SessionState::Paired,
                                 SessionState::ControllerMode};
  int paths = 0;
  for (const auto& a : alphabet) {
    for (const auto& b : alphabet) {
      for (const auto& c : alphabet) {
        SessionState s = SessionState::Unpaired;
        for (const auto* frame : {&a, &b, &c}) {
          const LineResult r = handle_line(s, *frame);
          if (r.state == SessionState::ControllerMode && s != SessionState::ControllerMode) {
            CHECK(s == SessionState::Paired);
            CHECK(*frame == "MODE CONTROLLER");
          }
          if (r.state == SessionState::Paired) CHECK(s == SessionState::Unpaired);
          if (r.reply.starts_with("ERR")) CHECK(r.state == SessionState::Unpaired);
          if (r.command) CHECK(r.state == SessionState::ControllerMode);
          s = r.state;
        }
        ++paths;
      }
    }
  }
  CHECK(paths == 11 * 11 * 11);
  // transitions from every start state obey the same guard
  for (const SessionState st : starts) {
    for (const auto& f : alphabet) {
      const LineResult r = handle_line(st, f);
      if (r.state == SessionState::ControllerMode) {
        CHECK((st == SessionState::Paired || st == SessionState::ControllerMode));
      }
    }
  }
}

TEST_CASE("custom keymap") {
  const KeyMap km = KeyMap::parse("# arrows\nforward B\nbackward F\n");
  CHECK(km.key_for(DriveCommand::Forward) == 'B');
  CHECK(km.key_for(DriveCommand::Backward) == 'F');
  CHECK(km.key_for(DriveCommand::Stop) == 'S');
  const LineResult r = handle_line(SessionState::ControllerMode, "B", km);
  REQUIRE(r.command);
  CHECK(*r.command == DriveCommand::Forward);

  CHECK_THROWS_AS(KeyMap::parse("forward L\n"), ValidationError);  // collides with left
  CHECK_THROWS_AS(KeyMap::parse("forward\n"), ParseError);
  CHECK_THROWS_AS(KeyMap::parse("jump J\n"), ParseError);
  CHECK_THROWS_AS(KeyMap::parse("forward WW\n"), ParseError);
  CHECK_THROWS_AS(KeyMap(std::array<char, 5>{'F', 'B', 'L', 'R', ' '}), ValidationError);
}

TEST_CASE("telemetry encoding") {
  CHECK(encode_telemetry({}) == "TLM 0.000000 0.000000 0.000000 0.000000 0.000000 0 0");
  const TelemetryFrame f{1.5, -0.25, 2.0, 3.14159265, 44.497960123, true, false};
  CHECK(encode_telemetry(f) == "TLM 1.500000 -0.250000 2.000000 3.141593 44.497960 1 0");
  // tiny negatives do not print as -0.000000
  CHECK(encode_telemetry({0.1, -1e-9, 0, -4e-8, 0, false, true}) ==
        "TLM 0.100000 0.000000 0.000000 0.000000 0.000000 0 1");
}

TEST_CASE("telemetry encode/parse round-trips every quantized frame") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int i = 0; i < 20000; ++i) {
    const TelemetryFrame f = quantized({std::abs(u(rng)), u(rng), u(rng), u(rng) / 400.0,
                                        std::abs(u(rng)) / 10.0, rng() % 2 == 0,
                                        rng() % 2 == 0});
    const std::string line = encode_telemetry(f);
    CHECK(parse_telemetry(line) == f);
    CHECK(encode_telemetry(parse_telemetry(line)) == line);
  }
}

TEST_CASE("malformed telemetry is rejected") {
  CHECK_THROWS_AS(parse_telemetry("TLM 1 2 3"), ParseError);
  CHECK_THROWS_AS(parse_telemetry("XYZ 0 0 0 0 0 0 0"), ParseError);
  CHECK_THROWS_AS(parse_telemetry("TLM 0 0 0 0 0 2 0"), ParseError);
  CHECK_THROWS_AS(parse_telemetry("TLM 0 0 0 a 0 1 0"), ParseError);
  CHECK(parse_telemetry("TLM 0.1 0 0 0 45 1 0\n").led);
}
