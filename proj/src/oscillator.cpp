#include "cabletrace/oscillator.hpp"

#include <cmath>
#include <sstream>

#include "cabletrace/errors.hpp"

namespace cabletrace {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double checked_log(double arg, const char* name) {
  if (!(arg > 0.0) || !std::isfinite(arg)) {
    throw DomainError(std::string("log argument '") + name + "' is not positive (" + num(arg) + ")");
  }
  return std::log(arg);
}

}  // namespace

void validate(const OscillatorParams& p) {
  if (!(p.r > 0.0) || !std::isfinite(p.r)) throw ValidationError("r must be > 0");
  if (!(p.rs > 0.0) || !std::isfinite(p.rs)) throw ValidationError("rs must be > 0");
  if (!(p.c > 0.0) || !std::isfinite(p.c)) throw ValidationError("c must be > 0");
  if (!(p.v_dd >= 3.0 && p.v_dd <= 15.0)) {
    throw ValidationError("v_dd " + num(p.v_dd) + " V outside the IC operating range [3, 15]");
  }
  if (!(p.v_t > 0.0 && p.v_t < p.v_dd)) {
    throw ValidationError("v_t must satisfy 0 < v_t < v_dd (v_t = " + num(p.v_t) +
                          ", v_dd = " + num(p.v_dd) + ")");
  }
  if (!(p.v_d >= 0.0) || !std::isfinite(p.v_d)) throw ValidationError("v_d must be >= 0");
}

double period(const OscillatorParams& p) {
  validate(p);
  const double vdd = p.v_dd;
  const double vd = p.v_d;
  const double vt = p.v_t;
  const double k = p.rs / p.r;
  const double rc = p.r * p.c;

  const double charge = checked_log((vdd + vd) * (vdd + vd) / (vt * (vdd - vt)),
                                    "(VDD+VD)^2 / (VT(VDD-VT))");
  const double rise = checked_log((k * (vdd + vt) + (vt - vd)) / (k * (vdd + vd)),
                                  "(K(VDD+VT)+(VT-VD)) / (K(VDD+VD))");
  const double fall = checked_log((k * (2.0 * vdd - vt) + (vdd - vt - vd)) / (k * (vdd + vd)),
                                  "(K(2VDD-VT)+(VDD-VT-VD)) / (K(VDD+VD))");
  const double t = rc * charge + rc * (k / (1.0 + k)) * (rise + fall);
  if (!(t > 0.0)) throw DomainError("non-positive period " + num(t));
  return t;
}

double frequency(const OscillatorParams& p) { return 1.0 / period(p); }

std::vector<ValidityWarning> validity_report(const OscillatorParams& p,
                                             const ValidityLimits& limits) {
  validate(p);
  std::vector<ValidityWarning> out;
  const double t = period(p);
  if (t < limits.delay_margin * limits.ic_delay) {
    out.push_back({1, "condition 1: period " + num(t) + " s is not large against the IC delay (" +
                          num(limits.delay_margin) + " x " + num(limits.ic_delay) + " s)"});
  }
  if (p.c < limits.c_floor) {
    out.push_back({2, "condition 2: C = " + num(p.c) + " F is below the parasitic floor " +
                          num(limits.c_floor) + " F"});
  }
  if (p.r < limits.r_floor) {
    out.push_back({3, "condition 3: R = " + num(p.r) + " ohm is below the drive floor " +
                          num(limits.r_floor) + " ohm"});
  }
  const double ratio = p.rs / p.r;
  if (ratio < limits.rs_min_ratio || ratio > limits.rs_max_ratio) {
    out.push_back({4, "condition 4: Rs/R = " + num(ratio) + " outside [" +
                          num(limits.rs_min_ratio) + ", " + num(limits.rs_max_ratio) + "]"});
  }
  return out;
}

bool fires(const FieldSample& field, double threshold_v, double tuned_frequency,
           double match_tolerance) {
  return field.induced_voltage >= threshold_v &&
         std::abs(tuned_frequency - field.frequency) <= match_tolerance * field.frequency;
}

DetectorReading detect(const FieldSample& field, double threshold_v, const OscillatorParams& tuned,
                       double match_tolerance, NoiseSource& noise, double noise_sigma) {
  if (!fires(field, threshold_v, frequency(tuned), match_tolerance)) {
    // protection diode conducts and holds the oscillator off
    return {};
  }
  return {true, noise.gaussian(field.frequency, noise_sigma), true};
}

}  // namespace cabletrace
