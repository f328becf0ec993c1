#include "cabletrace/simulation.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "cabletrace/emfield.hpp"
#include "cabletrace/errors.hpp"
#include "cabletrace/sweep.hpp"

namespace cabletrace {

RobotPose start_pose(const CableRoute& route) {
  const Vec2 p = route.waypoints().front();
  const Vec2 d = route.direction(0);
  return {p.x, p.y, normalize_angle(std::atan2(d.y, d.x))};
}

SimulationLoop::SimulationLoop(WorldScenario scenario, RobotParams params)
    : scenario_(std::move(scenario)),
      params_(params),
      pose_(start_pose(scenario_.route)),
      noise_(scenario_.noise_seed) {
  validate(scenario_);
  validate(params_);
  frequency(scenario_.detector.tuned);
}

TelemetryFrame SimulationLoop::tick() {
  pose_ = step(pose_, latched_, params_);
  ++ticks_;
  const FieldSample field = field_at(scenario_, probe_position(pose_, params_));
  const DetectorSetup& det = scenario_.detector;
  const DetectorReading reading =
      detect(field, det.threshold_v, det.tuned, det.match_tolerance, noise_, scenario_.noise_sigma);
  TelemetryFrame frame;
  frame.t = static_cast<double>(ticks_) * params_.tick;
  frame.x = pose_.x;
  frame.y = pose_.y;
  frame.heading = pose_.heading;
  frame.freq = reading.measured_frequency;
  frame.led = reading.led_on;
  frame.fault = classify(reading.measured_frequency, scenario_.line_frequency, kDeadFraction);
  return quantized(frame);
}

std::vector<ScriptEntry> parse_command_script(std::string_view text, const KeyMap& keymap) {
  std::vector<ScriptEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string t_tok;
    std::string key_tok;
    std::string extra;
    if (!(fields >> t_tok)) continue;
    const std::string where = "script line " + std::to_string(line_no) + ": ";
    if (!(fields >> key_tok) || (fields >> extra)) {
      throw ParseError(where + "expected '<t_seconds> <command_char>'");
    }
    double t = 0.0;
    const auto [ptr, ec] = std::from_chars(t_tok.data(), t_tok.data() + t_tok.size(), t);
    if (ec != std::errc{} || ptr != t_tok.data() + t_tok.size() || !std::isfinite(t)) {
      throw ParseError(where + "bad time '" + t_tok + "'");
    }
    if (t < 0.0) throw ParseError(where + "negative time");
    if (!out.empty() && t < out.back().t) {
      throw ParseError(where + "time goes backwards (" + t_tok + " after previous entry)");
    }
    if (key_tok.size() != 1 || !keymap.command_for(key_tok[0])) {
      throw ParseError(where + "unmapped command character '" + key_tok + "'");
    }
    out.push_back({t, key_tok[0], line_no});
  }
  return out;
}

std::string simulate(const WorldScenario& scenario, const std::vector<ScriptEntry>& script,
                     const KeyMap& keymap, const RobotParams& params, double duration_s) {
  SimulationLoop loop(scenario, params);
  if (duration_s <= 0.0) duration_s = (script.empty() ? 0.0 : script.back().t) + 1.0;
  const auto total_ticks = static_cast<std::uint64_t>(std::llround(duration_s / params.tick));

  std::string log;
  std::size_t next = 0;
  for (std::uint64_t k = 0; k < total_ticks; ++k) {
    // commands stamped at or before the start of this tick take effect for it
    const double tick_start = static_cast<double>(k) * params.tick;
    while (next < script.size() && script[next].t <= tick_start + 1e-9) {
      loop.command(*keymap.command_for(script[next].key));
      ++next;
    }
    log += encode_telemetry(loop.tick());
    log += '\n';
  }
  return log;
}

}  // namespace cabletrace
