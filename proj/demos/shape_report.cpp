// Print the defining parameters of every built-in self-refocusing shape and
// verify its refocusing order against a chemical shift.
#include <cstdio>

#include "qpulse/qdyn.hpp"
#include "qpulse/shape_library.hpp"

using namespace qp;

int main() {
  std::printf("%-10s %10s %10s %10s   %s\n", "shape", "upsilon", "alpha", "zeta",
              "||R1||, ||R2|| at tau*Delta = 1");
  mat hs = 0.5 * pauli(3);
  for (const auto& [label, shape] : shape_library()) {
    ShapeParams p = shape_params(shape);
    Propagator prop = propagate(single_pulse_schedule(shape), hs, 2, 512);
    std::printf("%-10s %10.6f %10.6f %10.6f   %.2e, %.2e\n", label.c_str(), p.upsilon,
                p.alpha, p.zeta, fro(prop.R[0]), fro(prop.R[1]));
  }
  return 0;
}
