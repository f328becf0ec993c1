#pragma once

// Fixed-tick simulation loop shared by `simulate` (headless replay) and
// `serve` (live teleoperation).

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cabletrace/oscillator.hpp"
#include "cabletrace/protocol.hpp"
#include "cabletrace/robot.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

inline constexpr double kDeadFraction = 0.1;

/// Pose at the start of the route, facing along the first segment.
RobotPose start_pose(const CableRoute& route);

class SimulationLoop {
 public:
  SimulationLoop(WorldScenario scenario, RobotParams params);

  /// Latches a drive command; it stays in effect until replaced.
  void command(DriveCommand cmd) { latched_ = cmd; }
  DriveCommand latched() const { return latched_; }

  /// Advances one tick and returns the (quantized) telemetry for it.
  TelemetryFrame tick();

  const RobotPose& pose() const { return pose_; }
  std::uint64_t ticks() const { return ticks_; }
  const WorldScenario& scenario() const { return scenario_; }
  const RobotParams& params() const { return params_; }

 private:
  WorldScenario scenario_;
  RobotParams params_;
  RobotPose pose_;
  DriveCommand latched_ = DriveCommand::Stop;
  NoiseSource noise_;
  std::uint64_t ticks_ = 0;
};

struct ScriptEntry {
  double t = 0.0;
  char key = 'S';
  int line = 0;
};

/// Parses "<t_seconds> <command_char>" lines. Blank lines and '#' comments
/// are skipped. Throws ParseError naming the line on malformed input, a
/// negative time, time going backwards, or a character not in `keymap`.
std::vector<ScriptEntry> parse_command_script(std::string_view text, const KeyMap& keymap = {});

/// Runs the loop headlessly. `duration_s` <= 0 means last command time + 1 s.
/// Returns one encoded telemetry line per tick, each with a trailing newline.
std::string simulate(const WorldScenario& scenario, const std::vector<ScriptEntry>& script,
                     const KeyMap& keymap = {}, const RobotParams& params = {},
                     double duration_s = 0.0);

}  // namespace cabletrace
