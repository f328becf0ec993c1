#pragma once

// Magnetic field of the buried conductor and the voltage it induces in the probe.

#include "cabletrace/field_sample.hpp"
#include "cabletrace/geometry.hpp"
#include "cabletrace/world.hpp"

namespace cabletrace {

inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;  // T*m/A

/// Flux density (T) at `point` from a straight filament carrying `current`
/// (A) from `a` to `b`. Zero when the point lies on the filament's line.
Vec3 segment_field(Vec3 a, Vec3 b, double current, Vec3 point);

/// Effective RMS current on the conductor at arc-length s, after applying the
/// scenario's fault.
double effective_current(const WorldScenario& scenario, double s);

/// Field sample at a surface point. Total on finite inputs; does not require
/// the scenario to be validated (line_current may be 0).
FieldSample field_at(const WorldScenario& scenario, Vec2 probe);

/// Widest lateral offset (m) from the cable, measured at the middle of the
/// energized stretch, at which induced_voltage >= threshold_v. Bisection to
/// 1 mm; 0 when the voltage directly above is already below threshold.
double detection_range(const WorldScenario& scenario, double threshold_v);

}  // namespace cabletrace
