#pragma once

#include <cmath>
#include <cstdint>

namespace qp {

// Counter-based generator: every draw is a pure function of (seed, stream,
// counter), so coupling draws stay identical across platforms, thread counts
// and chain lengths.
struct counter_rng {
  uint64_t seed = 0;
  uint64_t stream = 0;
  uint64_t counter = 0;

  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  uint64_t next_u64() {
    uint64_t x = mix(seed);
    x = mix(x ^ mix(stream));
    return mix(x ^ counter++);
  }

  // uniform in [0, 1)
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // standard normal (Box-Muller)
  double normal() {
    double u1 = 0;
    while (u1 == 0) u1 = next_double();
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
  }
};

}  // namespace qp
