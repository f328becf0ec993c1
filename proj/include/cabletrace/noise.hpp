#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace cabletrace {

/// Seeded Gaussian source. std::normal_distribution is implementation-defined,
/// so the transform is done here (Box-Muller over mt19937_64, whose output
/// sequence is fixed by the standard) to keep replays identical across
/// toolchains.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  double gaussian(double mean, double sigma) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return mean + sigma * z;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cabletrace
