#pragma once

// Simulated ground truth: cable geometry, line electricals, injected fault.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cabletrace/geometry.hpp"
#include "cabletrace/oscillator.hpp"

namespace cabletrace {

inline constexpr double kDefaultDepthM = 0.635;  // 25 in
inline constexpr double kMaxLineVoltage = 440.0;
inline constexpr double kMinLineFrequency = 40.0;
inline constexpr double kMaxLineFrequency = 70.0;

/// Surface polyline with uniform burial depth.
class CableRoute {
 public:
  CableRoute() = default;
  /// Throws ValidationError on fewer than two waypoints, a zero-length
  /// segment, non-finite coordinates or depth <= 0.
  CableRoute(std::vector<Vec2> waypoints, double depth);

  const std::vector<Vec2>& waypoints() const { return waypoints_; }
  double depth() const { return depth_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t segment_count() const { return waypoints_.size() - 1; }

  /// Arc-length at waypoint i.
  double arc_at(std::size_t i) const { return cumulative_.at(i); }

  /// Index of the segment containing arc-length s (last segment for s == length).
  std::size_t segment_at(double s) const;

  /// Linear interpolation along the polyline. Throws ValidationError when s is
  /// outside [0, length].
  Vec2 point_at(double s) const;

  /// Unit direction of segment i.
  Vec2 direction(std::size_t i) const;

  /// Arc-length of the route point nearest to p (smallest such s on ties).
  double nearest_arc(Vec2 p) const;

  friend bool operator==(const CableRoute&, const CableRoute&) = default;

 private:
  std::vector<Vec2> waypoints_;
  double depth_ = kDefaultDepthM;
  std::vector<double> cumulative_;
};

enum class FaultKind { Open, Short, Earth };

std::string_view to_string(FaultKind kind);
std::optional<FaultKind> parse_fault_kind(std::string_view text);

struct FaultSpec {
  FaultKind kind = FaultKind::Open;
  double position = 0.0;  // arc-length along the route, m

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// Probe coupling and the extrapolated Short/Earth current factors.
struct ProbeModel {
  double coupling_m2 = 0.1;       // effective turns x area
  double short_surge = 3.0;       // upstream current multiplier for Short
  double earth_attenuation = 0.5; // downstream current multiplier for Earth

  friend bool operator==(const ProbeModel&, const ProbeModel&) = default;
};

struct WorldScenario {
  CableRoute route;
  double line_current = 0.0;    // A RMS
  double line_voltage = 0.0;    // V RMS
  double line_frequency = 0.0;  // Hz
  std::optional<FaultSpec> fault;
  std::uint64_t noise_seed = 0;
  double noise_sigma = 0.5;     // Hz
  ProbeModel probe{};
  DetectorSetup detector{};

  friend bool operator==(const WorldScenario&, const WorldScenario&) = default;
};

/// Throws ValidationError naming the violated invariant.
void validate(const WorldScenario& scenario);

/// Parses and validates scenario-file text.
WorldScenario load_scenario(std::string_view text);
WorldScenario load_scenario_file(const std::string& path);

/// Serialises a scenario so that load_scenario(save_scenario(s)) == s.
std::string save_scenario(const WorldScenario& scenario);

struct RoutePoint {
  Vec2 surface;
  double depth = 0.0;
};

RoutePoint point_on_route(const WorldScenario& scenario, double s);

}  // namespace cabletrace
