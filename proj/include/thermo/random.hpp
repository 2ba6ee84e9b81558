#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace thermo {

// Standard library distributions are implementation defined; these helpers
// only use the raw engine output so that seeded runs agree across toolchains.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Sign-symmetric normal draw by Box-Muller.
inline double standard_normal(Rng& rng) {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
}

// Index drawn from a finite distribution given by nonnegative weights.
template <class Weights>
int draw_index(Rng& rng, const Weights& weights, int count) {
  double total = 0.0;
  for (int i = 0; i < count; ++i) total += weights(i);
  double u = uniform01(rng) * total;
  for (int i = 0; i < count; ++i) {
    u -= weights(i);
    if (u < 0.0) return i;
  }
  for (int i = count - 1; i >= 0; --i) {
    if (weights(i) > 0.0) return i;
  }
  return 0;
}

}  // namespace thermo
