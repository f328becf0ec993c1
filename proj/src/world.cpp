#include "cabletrace/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cabletrace/errors.hpp"

namespace cabletrace {

namespace {

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

CableRoute::CableRoute(std::vector<Vec2> waypoints, double depth)
    : waypoints_(std::move(waypoints)), depth_(depth) {
  if (waypoints_.size() < 2) {
    throw ValidationError("route.waypoints: at least 2 waypoints required");
  }
  if (!std::isfinite(depth_) || depth_ <= 0.0) {
    throw ValidationError("route.depth_m: depth must be > 0 (got " + fmt_num(depth_) + ")");
  }
  cumulative_.reserve(waypoints_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const Vec2 w = waypoints_[i];
    if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
      throw ValidationError("route.waypoints: non-finite coordinate at waypoint " +
                            std::to_string(i));
    }
    if (i == 0) continue;
    const double len = distance(waypoints_[i - 1], w);
    if (!(len > 0.0)) {
      throw ValidationError("route.waypoints: waypoints " + std::to_string(i - 1) + " and " +
                            std::to_string(i) + " coincide (zero-length segment)");
    }
    cumulative_.push_back(cumulative_.back() + len);
  }
}

std::size_t CableRoute::segment_at(double s) const {
  // first cumulative entry strictly greater than s marks the segment end
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t end = static_cast<std::size_t>(it - cumulative_.begin());
  if (end == 0) return 0;
  return std::min(end - 1, segment_count() - 1);
}

Vec2 CableRoute::point_at(double s) const {
  if (!(s >= 0.0 && s <= length())) {
    throw ValidationError("arc-length " + fmt_num(s) + " outside route [0, " +
                          fmt_num(length()) + "]");
  }
  if (s == length()) return waypoints_.back();
  const std::size_t i = segment_at(s);
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double t = (s - cumulative_[i]) / seg_len;
  const Vec2 a = waypoints_[i];
  const Vec2 b = waypoints_[i + 1];
  return a + t * (b - a);
}

Vec2 CableRoute::direction(std::size_t i) const {
  const Vec2 d = waypoints_.at(i + 1) - waypoints_.at(i);
  return (1.0 / norm(d)) * d;
}

double CableRoute::nearest_arc(Vec2 p) const {
  double best_dist = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints_.size(); ++i) {
    const Vec2 a = waypoints_[i];
    const Vec2 ab = waypoints_[i + 1] - a;
    const double len = cumulative_[i + 1] - cumulative_[i];
    const double t = std::clamp(dot(p - a, ab) / (len * len), 0.0, 1.0);
    const double d = distance(a + t * ab, p);
    if (d < best_dist) {
      best_dist = d;
      best_s = cumulative_[i] + t * len;
    }
  }
  return best_s;
}

std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::Open: return "open";
    case FaultKind::Short: return "short";
    case FaultKind::Earth: return "earth";
  }
  return "open";
}

std::optional<FaultKind> parse_fault_kind(std::string_view text) {
  if (text == "open") return FaultKind::Open;
  if (text == "short") return FaultKind::Short;
  if (text == "earth") return FaultKind::Earth;
  return std::nullopt;
}

void validate(const WorldScenario& sc) {
  if (sc.route.waypoints().size() < 2) {
    throw ValidationError("route.waypoints: at least 2 waypoints required");
  }
  if (!std::isfinite(sc.line_current) || sc.line_current <= 0.0) {
    throw ValidationError("line.current_a: must be > 0 (got " + fmt_num(sc.line_current) + ")");
  }
  if (!std::isfinite(sc.line_voltage) || sc.line_voltage <= 0.0) {
    throw ValidationError("line.voltage_v: must be > 0 (got " + fmt_num(sc.line_voltage) + ")");
  }
  if (sc.line_voltage > kMaxLineVoltage) {
    throw ValidationError("line.voltage_v: " + fmt_num(sc.line_voltage) +
                          " V exceeds the 440 V limit");
  }
  if (!(sc.line_frequency >= kMinLineFrequency && sc.line_frequency <= kMaxLineFrequency)) {
    throw ValidationError("line.frequency_hz: " + fmt_num(sc.line_frequency) +
                          " Hz outside [40, 70]");
  }
  if (!std::isfinite(sc.noise_sigma) || sc.noise_sigma < 0.0) {
    throw ValidationError("noise.sigma_hz: must be >= 0 (got " + fmt_num(sc.noise_sigma) + ")");
  }
  if (sc.fault) {
    const double p = sc.fault->position;
    if (!(p > 0.0 && p < sc.route.length())) {
      throw ValidationError("fault.position_m: " + fmt_num(p) + " must lie strictly inside (0, " +
                            fmt_num(sc.route.length()) + ")");
    }
  }
  const ProbeModel& pm = sc.probe;
  if (!std::isfinite(pm.coupling_m2) || pm.coupling_m2 <= 0.0) {
    throw ValidationError("probe.coupling_m2: must be > 0");
  }
  if (!std::isfinite(pm.short_surge) || pm.short_surge <= 0.0) {
    throw ValidationError("probe.short_surge: must be > 0");
  }
  if (!std::isfinite(pm.earth_attenuation) || pm.earth_attenuation < 0.0 ||
      pm.earth_attenuation > 1.0) {
    throw ValidationError("probe.earth_attenuation: must lie in [0, 1]");
  }
  validate(sc.detector.tuned);
  if (!std::isfinite(sc.detector.threshold_v) || sc.detector.threshold_v <= 0.0) {
    throw ValidationError("detector.threshold_v: must be > 0");
  }
  if (!(sc.detector.match_tolerance > 0.0 && sc.detector.match_tolerance < 1.0)) {
    throw ValidationError("detector.match_tolerance: must lie in (0, 1)");
  }
}

RoutePoint point_on_route(const WorldScenario& scenario, double s) {
  return {scenario.route.point_at(s), scenario.route.depth()};
}

}  // namespace cabletrace
