#include "cabletrace/protocol.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "cabletrace/errors.hpp"

namespace cabletrace {

namespace {

std::string_view strip_eol(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::optional<DriveCommand> command_by_name(std::string_view name) {
  if (name == "forward") return DriveCommand::Forward;
  if (name == "backward") return DriveCommand::Backward;
  if (name == "left") return DriveCommand::Left;
  if (name == "right") return DriveCommand::Right;
  if (name == "stop") return DriveCommand::Stop;
  return std::nullopt;
}

bool valid_key(char c) {
  return std::isprint(static_cast<unsigned char>(c)) && c != ' ';
}

}  // namespace

std::string_view to_string(SessionState state) {
  switch (state) {
    case SessionState::Unpaired: return "Unpaired";
    case SessionState::Paired: return "Paired";
    case SessionState::ControllerMode: return "ControllerMode";
  }
  return "Unpaired";
}

KeyMap::KeyMap() : keys_{'F', 'B', 'L', 'R', 'S'} {}

KeyMap::KeyMap(const std::array<char, 5>& keys) : keys_(keys) {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (!valid_key(keys_[i])) {
      throw ValidationError("keymap: key for " +
                            std::string(to_string(static_cast<DriveCommand>(i))) +
                            " must be a printable non-space character");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (keys_[i] == keys_[j]) {
        throw ValidationError(std::string("keymap: key '") + keys_[i] + "' assigned to both " +
                              std::string(to_string(static_cast<DriveCommand>(j))) + " and " +
                              std::string(to_string(static_cast<DriveCommand>(i))));
      }
    }
  }
}

std::optional<DriveCommand> KeyMap::command_for(char key) const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) return static_cast<DriveCommand>(i);
  }
  return std::nullopt;
}

KeyMap KeyMap::parse(std::string_view text) {
  std::array<char, 5> keys = KeyMap().keys_;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name;
    std::string key;
    if (!(fields >> name)) continue;
    std::string extra;
    if (!(fields >> key) || key.size() != 1 || (fields >> extra)) {
      throw ParseError("keymap line " + std::to_string(line_no) +
                       ": expected '<command> <char>'");
    }
    const auto cmd = command_by_name(name);
    if (!cmd) {
      throw ParseError("keymap line " + std::to_string(line_no) + ": unknown command '" + name +
                       "'");
    }
    keys[static_cast<std::size_t>(*cmd)] = key[0];
  }
  return KeyMap(keys);
}

KeyMap KeyMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open keymap file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

LineResult handle_line(SessionState state, std::string_view raw, const KeyMap& keymap) {
  const std::string_view line = strip_eol(raw);
  auto error = [](std::string reason) {
    return LineResult{SessionState::Unpaired, "ERR " + std::move(reason), std::nullopt};
  };

  if (line == kPairFrame) {
    if (state != SessionState::Unpaired) return error("wrong state");
    return {SessionState::Paired, "OK PAIRED", std::nullopt};
  }
  if (line == kModeFrame) {
    if (state != SessionState::Paired) return error("wrong state");
    return {SessionState::ControllerMode, "OK", std::nullopt};
  }
  if (line.size() == 1) {
    if (state != SessionState::ControllerMode) return error("wrong state");
    const auto cmd = keymap.command_for(line[0]);
    if (!cmd) return error("unmapped character");
    return {state, "ACK " + std::string(line), cmd};
  }
  return error("unknown frame");
}

double quantize(double v) {
  return std::round(v * 1e6) / 1e6 + 0.0;
}

TelemetryFrame quantized(const TelemetryFrame& f) {
  return {quantize(f.t), quantize(f.x), quantize(f.y), quantize(f.heading), quantize(f.freq),
          f.led, f.fault};
}

std::string encode_telemetry(const TelemetryFrame& frame) {
  const TelemetryFrame f = quantized(frame);
  char buf[256];
  const int n = std::snprintf(buf, sizeof buf, "TLM %.6f %.6f %.6f %.6f %.6f %d %d", f.t, f.x,
                              f.y, f.heading, f.freq, f.led ? 1 : 0, f.fault ? 1 : 0);
  return std::string(buf, static_cast<std::size_t>(n));
}

TelemetryFrame parse_telemetry(std::string_view raw) {
  const std::string_view line = strip_eol(raw);
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t next = line.find(' ', pos);
    const std::size_t end = next == std::string_view::npos ? line.size() : next;
    tokens.push_back(line.substr(pos, end - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (tokens.size() != 8 || tokens[0] != "TLM") {
    throw ParseError("telemetry: expected 'TLM' and 7 fields");
  }
  auto real = [](std::string_view tok) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ParseError("telemetry: bad number '" + std::string(tok) + "'");
    }
    return v;
  };
  auto flag = [](std::string_view tok) {
    if (tok == "0") return false;
    if (tok == "1") return true;
    throw ParseError("telemetry: flag must be 0 or 1, got '" + std::string(tok) + "'");
  };
  return {real(tokens[1]), real(tokens[2]), real(tokens[3]), real(tokens[4]),
          real(tokens[5]), flag(tokens[6]), flag(tokens[7])};
}

}  // namespace cabletrace
