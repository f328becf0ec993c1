#include "cabletrace/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "cabletrace/emfield.hpp"
#include "cabletrace/errors.hpp"
#include "cabletrace/simulation.hpp"

namespace cabletrace {

namespace {

constexpr double kArcTolerance = 1e-9;

}  // namespace

bool classify(double frequency, double expected, double dead_fraction) {
  return frequency < dead_fraction * expected;
}

RouteDriver::RouteDriver(RobotPose pose, RobotParams params, TickObserver observer)
    : pose_(pose), params_(params), observer_(std::move(observer)) {
  validate(params_);
}

void RouteDriver::apply(DriveCommand cmd, double duration) {
  RobotParams p = params_;
  p.tick = duration;
  pose_ = step(pose_, cmd, p);
  ++ticks_;
  if (observer_) observer_(pose_, cmd);
}

void RouteDriver::drive_to(Vec2 target) {
  const Vec2 delta = target - Vec2{pose_.x, pose_.y};
  const double dist = norm(delta);
  if (dist < 1e-12) return;

  const double turn = normalize_angle(std::atan2(delta.y, delta.x) - pose_.heading);
  const DriveCommand spin = turn > 0.0 ? DriveCommand::Left : DriveCommand::Right;
  double remaining = std::abs(turn) / params_.turn_rate;
  while (remaining > 1e-12) {
    const double dt = std::min(params_.tick, remaining);
    apply(spin, dt);
    remaining -= dt;
  }

  remaining = dist / params_.speed;
  while (remaining > 1e-12) {
    const double dt = std::min(params_.tick, remaining);
    apply(DriveCommand::Forward, dt);
    remaining -= dt;
  }
}

std::vector<SweepRecord> run_sweep(const WorldScenario& scenario, double step,
                                   const OscillatorParams& tuned, double threshold_v,
                                   const SweepOptions& options) {
  validate(scenario);
  validate(options.robot);
  const CableRoute& route = scenario.route;
  const double length = route.length();
  if (!(step > 0.0 && step <= length + kArcTolerance)) {
    throw ValidationError("sweep step must lie in (0, route length]");
  }
  if (!(threshold_v > 0.0)) throw ValidationError("threshold_v must be > 0");

  // sample arc-lengths: step, 2*step, ... and the route end if not already hit
  std::vector<double> stops;
  for (std::size_t k = 1;; ++k) {
    const double s = static_cast<double>(k) * step;
    if (s > length + kArcTolerance) break;
    stops.push_back(std::min(s, length));
  }
  if (stops.empty() || stops.back() < length - kArcTolerance) stops.push_back(length);

  frequency(tuned);  // surfaces invalid tuning before the robot moves
  const double offset = options.robot.probe_offset;
  NoiseSource noise(scenario.noise_seed);
  RouteDriver driver(start_pose(route), options.robot);
  double centre_arc = 0.0;

  std::vector<SweepRecord> records;
  for (const double s : stops) {
    // put the chassis centre `offset` behind the sample point so the probe is over it
    const double target_arc = std::max(s - offset, 0.0);
    if (target_arc > centre_arc) {
      for (std::size_t i = 1; i < route.waypoints().size(); ++i) {
        const double w = route.arc_at(i);
        if (w > centre_arc + kArcTolerance && w < target_arc - kArcTolerance) {
          driver.drive_to(route.waypoints()[i]);
        }
      }
      driver.drive_to(route.point_at(target_arc));
      centre_arc = target_arc;
    }

    const FieldSample field = field_at(scenario, probe_position(driver.pose(), options.robot));
    const DetectorReading reading = detect(field, threshold_v, tuned,
                                           scenario.detector.match_tolerance, noise,
                                           scenario.noise_sigma);
    const bool fault =
        classify(reading.measured_frequency, scenario.line_frequency, options.dead_fraction);
    records.push_back({s, reading.measured_frequency, fault});
    if (fault && !options.full) break;
  }
  return records;
}

std::vector<SweepRecord> run_sweep(const WorldScenario& scenario, double step,
                                   const SweepOptions& options) {
  return run_sweep(scenario, step, scenario.detector.tuned, scenario.detector.threshold_v,
                   options);
}

FaultReport localize(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw ValidationError("localize: no sweep records");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].distance < records[i - 1].distance) {
      throw ValidationError("localize: record distances must be non-decreasing");
    }
  }
  FaultReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].fault) continue;
    report.found = true;
    report.low = i == 0 ? 0.0 : records[i - 1].distance;
    report.high = records[i].distance;
    report.midpoint = 0.5 * (report.low + report.high);
    break;
  }
  return report;
}

std::string format_sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = "distance_m,frequency_hz,fault\n";
  char buf[128];
  for (const SweepRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%.3f,%.6f,%s\n", r.distance, r.frequency,
                  r.fault ? "Yes" : "No");
    out += buf;
  }
  return out;
}

std::string format_fault_report(const FaultReport& report) {
  if (!report.found) return "fault: none";
  char buf[160];
  std::snprintf(buf, sizeof buf, "fault: found interval=[%.3f, %.3f] midpoint=%.3f", report.low,
                report.high, report.midpoint);
  return buf;
}

}  // namespace cabletrace
