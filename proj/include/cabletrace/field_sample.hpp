#pragma once

namespace cabletrace {

/// Field seen by the probe at one surface point.
struct FieldSample {
  double b_rms = 0.0;            // T, RMS flux density
  double frequency = 0.0;        // Hz; 0 when there is no field
  double induced_voltage = 0.0;  // V, RMS at the probe
};

}  // namespace cabletrace
