#include "cabletrace/robot.hpp"

#include <cmath>

#include "cabletrace/errors.hpp"

namespace cabletrace {

std::string_view to_string(DriveCommand cmd) {
  switch (cmd) {
    case DriveCommand::Forward: return "forward";
    case DriveCommand::Backward: return "backward";
    case DriveCommand::Left: return "left";
    case DriveCommand::Right: return "right";
    case DriveCommand::Stop: return "stop";
  }
  return "stop";
}

void validate(const RobotParams& p) {
  if (!(p.speed > 0.0) || !std::isfinite(p.speed)) throw ValidationError("robot speed must be > 0");
  if (!(p.turn_rate > 0.0) || !std::isfinite(p.turn_rate)) {
    throw ValidationError("robot turn_rate must be > 0");
  }
  if (!(p.tick > 0.0) || !std::isfinite(p.tick)) throw ValidationError("robot tick must be > 0");
  if (!(p.probe_offset >= 0.0) || !std::isfinite(p.probe_offset)) {
    throw ValidationError("robot probe_offset must be >= 0");
  }
}

RobotPose step(const RobotPose& pose, DriveCommand cmd, const RobotParams& params) {
  RobotPose next = pose;
  switch (cmd) {
    case DriveCommand::Forward:
    case DriveCommand::Backward: {
      const double d = (cmd == DriveCommand::Forward ? 1.0 : -1.0) * params.speed * params.tick;
      next.x += d * std::cos(pose.heading);
      next.y += d * std::sin(pose.heading);
      break;
    }
    case DriveCommand::Left:
      next.heading = normalize_angle(pose.heading + params.turn_rate * params.tick);
      break;
    case DriveCommand::Right:
      next.heading = normalize_angle(pose.heading - params.turn_rate * params.tick);
      break;
    case DriveCommand::Stop:
      break;
  }
  return next;
}

Vec2 probe_position(const RobotPose& pose, const RobotParams& params) {
  if (params.probe_offset == 0.0) return {pose.x, pose.y};
  return {pose.x + params.probe_offset * std::cos(pose.heading),
          pose.y + params.probe_offset * std::sin(pose.heading)};
}

}  // namespace cabletrace
