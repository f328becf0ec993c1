#pragma once

// CD4069 hex-inverter astable detector: period/frequency from component values,
// design-guideline checks, and the oscillate/LED decision.

#include <string>
#include <vector>

#include "cabletrace/field_sample.hpp"
#include "cabletrace/noise.hpp"

namespace cabletrace {

struct OscillatorParams {
  double r = 100e3;    // timing resistor, ohm
  double rs = 470e3;   // series resistor, ohm
  double c = 100e-9;   // timing capacitor, F
  double v_dd = 5.0;   // supply, V
  double v_d = 0.7;    // protection diode forward voltage, V
  double v_t = 2.5;    // inverter threshold, V

  friend bool operator==(const OscillatorParams&, const OscillatorParams&) = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const OscillatorParams& p);

/// Oscillation period in seconds. Throws DomainError when a logarithm
/// argument is not strictly positive.
double period(const OscillatorParams& p);

/// 1 / period(p).
double frequency(const OscillatorParams& p);

struct ValidityLimits {
  double rs_min_ratio = 2.0;
  double rs_max_ratio = 10.0;
  double c_floor = 100e-12;   // F, parasitic capacitance floor
  double r_floor = 10e3;      // ohm, output drive floor
  double ic_delay = 60e-9;    // s, propagation delay
  double delay_margin = 100.0;
};

struct ValidityWarning {
  int condition = 0;  // 1..4, numbered as in the circuit's design guidelines
  std::string message;
};

/// One warning per violated design guideline; empty when all hold.
std::vector<ValidityWarning> validity_report(const OscillatorParams& p,
                                             const ValidityLimits& limits = {});

struct DetectorReading {
  bool oscillating = false;
  double measured_frequency = 0.0;
  bool led_on = false;

  friend bool operator==(const DetectorReading&, const DetectorReading&) = default;
};

/// Detector tuning carried by a scenario.
struct DetectorSetup {
  OscillatorParams tuned{};
  double threshold_v = 20e-6;
  double match_tolerance = 0.15;

  friend bool operator==(const DetectorSetup&, const DetectorSetup&) = default;
};

/// True when the field both exceeds the voltage threshold and falls inside
/// the tuned oscillator's relative frequency band.
bool fires(const FieldSample& field, double threshold_v, double tuned_frequency,
           double match_tolerance);

/// Evaluates the detector at one probe pose. Draws one Gaussian sample from
/// `noise` only when the oscillator fires.
DetectorReading detect(const FieldSample& field, double threshold_v,
                       const OscillatorParams& tuned, double match_tolerance,
                       NoiseSource& noise, double noise_sigma);

}  // namespace cabletrace
