#pragma once

// Differential-drive chassis carrying the probe. Turning is spin-in-place
// (both wheels opposed through the H-bridge).

#include <string_view>

#include "cabletrace/geometry.hpp"

namespace cabletrace {

struct RobotPose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // rad, (-pi, pi]

  friend bool operator==(const RobotPose&, const RobotPose&) = default;
};

enum class DriveCommand { Forward, Backward, Left, Right, Stop };

std::string_view to_string(DriveCommand cmd);

struct RobotParams {
  double speed = 0.1;         // m/s
  double turn_rate = 1.0;     // rad/s
  double tick = 0.1;          // s
  double probe_offset = 0.05; // m ahead of the pose centre
};

/// Throws ValidationError on a non-positive speed, turn rate or tick, or a
/// negative probe offset.
void validate(const RobotParams& params);

/// Advances the pose by one tick under `cmd`.
RobotPose step(const RobotPose& pose, DriveCommand cmd, const RobotParams& params);

Vec2 probe_position(const RobotPose& pose, const RobotParams& params);

}  // namespace cabletrace
