#pragma once

// Line protocol emulating the HC-05 serial link. Frames are newline-terminated
// text; the same frames travel over TCP and the WebSocket mirror.

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "cabletrace/robot.hpp"

namespace cabletrace {

inline constexpr unsigned short kDefaultTcpPort = 7305;
inline constexpr unsigned short kDefaultHttpPort = 8080;
inline constexpr std::string_view kWebSocketPath = "/bt";
inline constexpr std::string_view kPairFrame = "PAIR HC-05";
inline constexpr std::string_view kModeFrame = "MODE CONTROLLER";
inline constexpr std::string_view kBusyReply = "ERR busy";

enum class SessionState { Unpaired, Paired, ControllerMode };

std::string_view to_string(SessionState state);

/// Command-character assignment. Always injective and covering all five
/// commands.
class KeyMap {
 public:
  /// F/B/L/R/S.
  KeyMap();

  /// Keys indexed by DriveCommand. Throws ValidationError when two commands
  /// share a key or a key is not a printable, non-space character.
  explicit KeyMap(const std::array<char, 5>& keys);

  std::optional<DriveCommand> command_for(char key) const;
  char key_for(DriveCommand cmd) const { return keys_[static_cast<std::size_t>(cmd)]; }

  /// Parses lines of "<command> <char>" (e.g. "forward W"); '#' starts a
  /// comment. Commands not listed keep their default key.
  static KeyMap parse(std::string_view text);
  static KeyMap load_file(const std::string& path);

 private:
  std::array<char, 5> keys_;
};

struct LineResult {
  SessionState state = SessionState::Unpaired;
  std::string reply;  // without trailing newline
  std::optional<DriveCommand> command;
};

/// Advances the session state machine by one received frame. A trailing
/// "\n" or "\r\n" on `line` is ignored.
LineResult handle_line(SessionState state, std::string_view line, const KeyMap& keymap = {});

struct TelemetryFrame {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double freq = 0.0;
  bool led = false;
  bool fault = false;

  friend bool operator==(const TelemetryFrame&, const TelemetryFrame&) = default;
};

/// Rounds to the 6-decimal grid used on the wire (and maps -0 to 0).
double quantize(double v);

/// Frame with every real field quantized, so encode/parse round-trips exactly.
TelemetryFrame quantized(const TelemetryFrame& frame);

/// "TLM <t> <x> <y> <heading> <freq> <led> <fault>", no trailing newline.
/// Values are quantized first, so parse_telemetry(encode_telemetry(f)) ==
/// quantized(f).
std::string encode_telemetry(const TelemetryFrame& frame);

/// Inverse of encode_telemetry; throws ParseError on malformed input.
TelemetryFrame parse_telemetry(std::string_view line);

}  // namespace cabletrace
