#include "cabletrace/emfield.hpp"

#include <cmath>
#include <vector>

#include "cabletrace/errors.hpp"

namespace cabletrace {

namespace {

// Probe positions within this distance past a dead-end break are treated as
// being at the break.
constexpr double kArcEpsilon = 1e-9;

// Upper bound on the lateral search in detection_range.
constexpr double kMaxRange = 1.0e4;

bool downstream_dead(const FaultSpec& f) {
  return f.kind == FaultKind::Open || f.kind == FaultKind::Short;
}

struct Piece {
  double s0;
  double s1;
  double current;
};

// Splits the route at the fault so each piece carries one current value.
std::vector<Piece> energized_pieces(const WorldScenario& sc) {
  const CableRoute& route = sc.route;
  std::vector<Piece> out;
  for (std::size_t i = 0; i < route.segment_count(); ++i) {
    const double s0 = route.arc_at(i);
    const double s1 = route.arc_at(i + 1);
    if (sc.fault && sc.fault->position > s0 && sc.fault->position < s1) {
      const double p = sc.fault->position;
      out.push_back({s0, p, effective_current(sc, 0.5 * (s0 + p))});
      out.push_back({p, s1, effective_current(sc, 0.5 * (p + s1))});
    } else {
      out.push_back({s0, s1, effective_current(sc, 0.5 * (s0 + s1))});
    }
  }
  return out;
}

double induced(const WorldScenario& sc, double b_rms) {
  return sc.probe.coupling_m2 * 2.0 * std::numbers::pi * sc.line_frequency * b_rms;
}

}  // namespace

Vec3 segment_field(Vec3 a, Vec3 b, double current, Vec3 point) {
  const Vec3 ab = b - a;
  const double len = norm(ab);
  if (len == 0.0 || current == 0.0) return {};
  const Vec3 u = (1.0 / len) * ab;
  const Vec3 w = point - a;
  const double t = dot(w, u);
  const Vec3 perp = w - t * u;
  const double rho = norm(perp);
  if (rho == 0.0) return {};
  const double to_a = norm(w);
  const double to_b = norm(point - b);
  // mu0 I / (4 pi rho) * (cos theta_a - cos theta_b), direction u x rho_hat
  const double mag = kMu0 * current / (4.0 * std::numbers::pi * rho) * (t / to_a - (t - len) / to_b);
  return (mag / rho) * cross(u, perp);
}

double effective_current(const WorldScenario& sc, double s) {
  const double i = sc.line_current;
  if (!sc.fault) return i;
  const bool upstream = s <= sc.fault->position;
  switch (sc.fault->kind) {
    case FaultKind::Open: return upstream ? i : 0.0;
    case FaultKind::Short: return upstream ? i * sc.probe.short_surge : 0.0;
    case FaultKind::Earth: return upstream ? i : i * sc.probe.earth_attenuation;
  }
  return i;
}

FieldSample field_at(const WorldScenario& sc, Vec2 probe) {
  if (sc.line_current == 0.0) return {};
  if (sc.fault && downstream_dead(*sc.fault) &&
      sc.route.nearest_arc(probe) > sc.fault->position + kArcEpsilon) {
    // past a break: no current reaches the stretch under the probe
    return {};
  }
  const CableRoute& route = sc.route;
  const double z = -route.depth();
  const Vec3 p{probe.x, probe.y, 0.0};
  Vec3 total{};
  for (const Piece& piece : energized_pieces(sc)) {
    if (piece.current == 0.0) continue;
    const Vec2 a = route.point_at(piece.s0);
    const Vec2 b = route.point_at(piece.s1);
    total = total + segment_field({a.x, a.y, z}, {b.x, b.y, z}, piece.current, p);
  }
  FieldSample out;
  out.b_rms = norm(total);
  if (out.b_rms > 0.0) {
    out.frequency = sc.line_frequency;
    out.induced_voltage = induced(sc, out.b_rms);
  }
  return out;
}

double detection_range(const WorldScenario& sc, double threshold_v) {
  if (!(threshold_v > 0.0)) throw ValidationError("threshold_v must be > 0");
  const CableRoute& route = sc.route;
  double energized_end = route.length();
  if (sc.fault && downstream_dead(*sc.fault)) energized_end = sc.fault->position;
  const double s_ref = 0.5 * energized_end;
  const Vec2 base = route.point_at(s_ref);
  const Vec2 dir = route.direction(route.segment_at(s_ref));
  const Vec2 normal{-dir.y, dir.x};

  auto voltage_at = [&](double offset) {
    return field_at(sc, base + offset * normal).induced_voltage;
  };

  if (voltage_at(0.0) < threshold_v) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (voltage_at(hi) >= threshold_v) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxRange) return kMaxRange;
  }
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (voltage_at(mid) >= threshold_v ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace cabletrace
