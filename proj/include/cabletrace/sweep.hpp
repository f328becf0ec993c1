#pragma once

// Tracer-method sweep: drive the probe along the cable, read the detector at
// fixed intervals, flag dead readings and bracket the fault.

#include <functional>
#include <string>
#include <vector>

#include "cabletrace/oscillator.hpp"
#include "cabletrace/robot.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

struct SweepRecord {
  double distance = 0.0;   // m along the route
  double frequency = 0.0;  // Hz measured
  bool fault = false;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

struct FaultReport {
  bool found = false;
  double low = 0.0;
  double high = 0.0;
  double midpoint = 0.0;
};

struct SweepOptions {
  bool full = false;                // keep going past the first fault record
  double dead_fraction = 0.1;
  RobotParams robot{};
};

/// fault <=> frequency < dead_fraction * expected.
bool classify(double frequency, double expected, double dead_fraction);

/// Drives the robot (by ticked drive commands) so the probe visits route
/// arc-lengths step, 2*step, ... and reads the detector at each stop. Halts
/// after the first fault record unless options.full. Throws ValidationError
/// on an invalid scenario or a step outside (0, route length].
std::vector<SweepRecord> run_sweep(const WorldScenario& scenario, double step,
                                   const OscillatorParams& tuned, double threshold_v,
                                   const SweepOptions& options = {});

/// Same, using the scenario's detector setup.
std::vector<SweepRecord> run_sweep(const WorldScenario& scenario, double step,
                                   const SweepOptions& options = {});

/// Brackets the first healthy-to-dead transition. Throws ValidationError on
/// an empty list or decreasing distances.
FaultReport localize(const std::vector<SweepRecord>& records);

/// Issues drive commands tick by tick to move a robot to a target. The last
/// tick of each manoeuvre is shortened so the robot stops on the target.
class RouteDriver {
 public:
  using TickObserver = std::function<void(const RobotPose&, DriveCommand)>;

  RouteDriver(RobotPose pose, RobotParams params, TickObserver observer = {});

  /// Spin in place towards `target`, then drive straight to it.
  void drive_to(Vec2 target);

  const RobotPose& pose() const { return pose_; }
  std::size_t ticks() const { return ticks_; }

 private:
  void apply(DriveCommand cmd, double duration);

  RobotPose pose_;
  RobotParams params_;
  TickObserver observer_;
  std::size_t ticks_ = 0;
};

std::string format_sweep_csv(const std::vector<SweepRecord>& records);
std::string format_fault_report(const FaultReport& report);

}  // namespace cabletrace
