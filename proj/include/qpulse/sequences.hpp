#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fidelity.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "qdyn.hpp"
#include "shape_library.hpp"
#include "shapes.hpp"

namespace qp {

// one decoupling slot: pulse a sublattice at in-plane phase psi, or idle
struct SeqSlot {
  bool idle = false;
  bool odd = true;  // odd sublattice = sites 0,2,4,..
  double psi = 0;
};

struct SequenceProgram {
  std::string name;
  std::vector<SeqSlot> slots;
};

// composite pulse: ordered (angle, phase, shape label) entries on one qubit
struct CompositeSpec {
  struct Entry {
    double angle = M_PI;
    double psi = 0;
    std::string shape_label;  // resolved at compile time; empty = hard
  };
  std::string name;
  std::vector<Entry> pulses;
  double target_angle = M_PI;
  double target_psi = 0;
};

inline SequenceProgram builtin_sequence(const std::string& name) {
  const double X = 0, Y = M_PI / 2, Xb = M_PI, Yb = 3 * M_PI / 2;
  auto P = [](bool odd, double psi) { return SeqSlot{false, odd, psi}; };
  auto O = [] { return SeqSlot{true, true, 0}; };
  SequenceProgram p;
  p.name = name;
  if (name == "seq4") {
    p.slots = {P(1, X), P(0, Y), P(1, Xb), P(0, Yb)};
  } else if (name == "seq8") {
    p.slots = {P(1, X), P(0, Y), P(1, Xb), P(0, Yb),
               P(0, Yb), P(1, Xb), P(0, Y), P(1, X)};
  } else if (name == "seq16") {
    p.slots = {P(1, X), P(0, Y),  P(1, Y), O(), P(1, Xb), P(0, X), P(1, Y), O(),
               P(1, X), P(0, Yb), P(1, Y), O(), P(1, Xb), P(0, X), P(1, Y), O()};
  } else if (name == "seq32") {
    p = builtin_sequence("seq16");
    p.name = name;
    auto fwd = p.slots;
    p.slots.insert(p.slots.end(), fwd.rbegin(), fwd.rend());
  } else {
    throw std::invalid_argument("unknown sequence: " + name);
  }
  return p;
}

inline CompositeSpec builtin_composite(const std::string& name) {
  CompositeSpec c;
  c.name = name;
  double phi = -std::acos(-0.25);
  auto deg = [](double d) { return d * M_PI / 180; };
  if (name == "scrofulous") {
    c.pulses = {{M_PI, deg(60), ""}, {M_PI, deg(300), ""}, {M_PI, deg(60), ""}};
  } else if (name == "bb1_W") {
    c.pulses = {{M_PI, 0, ""}, {M_PI, phi, ""}, {2 * M_PI, 3 * phi, ""}, {M_PI, phi, ""}};
  } else if (name == "bb1_CLJ") {
    c.pulses = {{M_PI / 2, 0, ""}, {M_PI, phi, ""}, {2 * M_PI, 3 * phi, ""},
                {M_PI, phi, ""}, {M_PI / 2, 0, ""}};
  } else if (name == "bb1_Wp") {
    c.pulses = {{M_PI, 0, ""}, {M_PI, phi, ""}, {M_PI, 3 * phi, ""},
                {M_PI, 3 * phi, ""}, {M_PI, phi, ""}};
  } else if (name == "bb1_CLJp") {
    c.pulses = {{M_PI / 2, 0, ""}, {M_PI, phi, ""}, {M_PI, 3 * phi, ""},
                {M_PI, 3 * phi, ""}, {M_PI, phi, ""}, {M_PI / 2, 0, ""}};
  } else {
    throw std::invalid_argument("unknown composite: " + name);
  }
  return c;
}

namespace detail {

inline mat sublattice_axis(int n, bool odd, double psi) {
  int dim = 1 << n;
  mat ax = mat::Zero(dim, dim);
  mat s = std::cos(psi) * pauli(1) + std::sin(psi) * pauli(2);
  for (int site = odd ? 0 : 1; site < n; site += 2) ax += site_op(n, site, s);
  return ax;
}

}  // namespace detail

// one shape drives every pulse of a decoupling sequence
template <class S>
ControlSchedule compile(const SequenceProgram& prog, const S& shape, int n) {
  ControlSchedule sch;
  sch.dim = 1 << n;
  sch.tau_p = shape.tau;
  int env = sch.add_envelope(make_envelope(shape));
  for (const auto& slot : prog.slots) {
    if (slot.idle)
      sch.add_idle();
    else
      sch.add_slot(env, slot.psi, detail::sublattice_axis(n, slot.odd, slot.psi));
  }
  return sch;
}

// composite on a single qubit; shapes resolved per entry label, amplitude
// offset f applied uniformly
inline ControlSchedule compile_composite(const CompositeSpec& spec,
                                         const std::map<std::string, PulseShape>& shapes,
                                         double f = 0) {
  ControlSchedule sch;
  sch.dim = 2;
  sch.tau_p = 1.0;
  for (const auto& e : spec.pulses) {
    int env;
    if (e.shape_label.empty()) {
      HardPulse hp{(1 + f) * e.angle, 1.0};
      env = sch.add_envelope(make_envelope(hp));
    } else {
      PulseShape ps = shapes.at(e.shape_label);
      if (std::abs(ps.phi0 - e.angle) > 1e-9)
        throw std::invalid_argument("shape angle mismatch for " + e.shape_label);
      env = sch.add_envelope(make_envelope(amplitude_scale(ps, f)));
    }
    mat ax = std::cos(e.psi) * pauli(1) + std::sin(e.psi) * pauli(2);
    sch.add_slot(env, e.psi, std::move(ax));
  }
  return sch;
}

// replace every pulse slot of a decoupling sequence by a composite; the
// second half of the cycle uses the reversed decomposition
inline SequenceProgram expand_with_composite(const SequenceProgram& prog,
                                             const CompositeSpec& comp) {
  SequenceProgram out;
  out.name = prog.name + "+" + comp.name;
  size_t half = prog.slots.size() / 2;
  for (size_t i = 0; i < prog.slots.size(); i++) {
    const auto& slot = prog.slots[i];
    if (slot.idle) {
      for (size_t j = 0; j < comp.pulses.size(); j++) out.slots.push_back(slot);
      continue;
    }
    std::vector<CompositeSpec::Entry> order = comp.pulses;
    if (i >= half) std::reverse(order.begin(), order.end());
    for (const auto& e : order)
      out.slots.push_back({false, slot.odd, slot.psi + e.psi});
  }
  return out;
}

// n_cycles-fold evolution; the cycle unitary is computed once, polar-projected
// (the non-unitary residue is pure integrator noise), then powered
template <class S>
mat evolve(const SequenceProgram& prog, const S& shape, const mat& h_s, int n,
           long n_cycles, int steps_per_slot = 1024) {
  ControlSchedule sch = compile(prog, shape, n);
  mat uc = polar_unitary(cycle_unitary(sch, h_s, steps_per_slot));
  return mat_power(uc, n_cycles);
}

struct OrderTableCell {
  int order = 0;
  bool saturated = false;
  double first_norm = 0;  // ||R_{K+1}|| that stopped the count
};

template <class S>
OrderTableCell decoupling_order_cell(const SequenceProgram& prog, const S& shape,
                                     const ChainSpec& chain, int k_max,
                                     int steps_per_slot = 2048, double tol = 1e-7) {
  ControlSchedule sch = compile(prog, shape, chain.n);
  Propagator p = propagate(sch, build_hamiltonian(chain), k_max, steps_per_slot);
  RefocusingOrder ro = refocusing_order(p, tol);
  OrderTableCell cell{ro.K, ro.saturated, 0};
  if (!ro.saturated) cell.first_norm = fro(p.R[ro.K]);
  return cell;
}

struct ScanPoint {
  double x = 0, y = 0;
  double infidelity = 0;
  double delta2 = 0;
};

struct ScanResult {
  std::vector<std::pair<std::string, std::string>> meta;
  std::string x_name = "x", y_name = "y";
  std::vector<ScanPoint> points;
};

inline void write_csv(const ScanResult& r, std::ostream& out) {
  for (const auto& [k, v] : r.meta) out << "# " << k << "=" << v << "\n";
  out << r.x_name << "," << r.y_name << ",infidelity\n";
  out.precision(12);
  for (const auto& p : r.points)
    out << p.x << "," << p.y << "," << p.infidelity << "\n";
}

inline void write_csv(const ScanResult& r, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_csv(r, f);
}

// fixed total time t = t_fixed (in pulse widths); tau swept by scaling H_S
// (width-tau dynamics with H equals width-1 dynamics with tau*H)
template <class S>
ScanResult scan_tau(const SequenceProgram& prog, const S& shape, const mat& h_s,
                    int n, double t_fixed, const std::vector<double>& tau_list,
                    int steps_per_slot = 1024) {
  ScanResult out;
  out.x_name = "tau";
  out.y_name = "delta";
  int dim = 1 << n;
  ControlSchedule sch = compile(prog, shape, n);
  for (double tau : tau_list) {
    long n_cycles = std::lround(t_fixed / (tau * prog.slots.size()));
    if (n_cycles < 1) throw std::invalid_argument("tau too large for t_fixed");
    // eigenphase powering keeps delta resolvable below the entrywise floor
    mat uc = polar_unitary(cycle_unitary(sch, mat(tau * h_s), steps_per_slot));
    double d2 = powered_mismatch_delta2(uc, n_cycles);
    double inf = d2 * (4 * dim - d2) / (4.0 * (dim + double(dim) * dim));
    out.points.push_back({tau, std::sqrt(std::max(0.0, d2)), inf, d2});
  }
  return out;
}

template <class S>
ScanResult scan_chain_length(const SequenceProgram& prog, const S& shape,
                             ChainModel model, const std::vector<int>& n_list,
                             double t_fixed, uint64_t seed, double coupling_scale = 1.0,
                             int steps_per_slot = 1024) {
  ScanResult out;
  out.x_name = "n";
  out.y_name = "delta2";
  for (int n : n_list) {
    mat h = coupling_scale * build_hamiltonian(sample_random(model, n, seed));
    long n_cycles = std::lround(t_fixed / double(prog.slots.size()));
    mat u = evolve(prog, shape, h, n, n_cycles, steps_per_slot);
    int dim = 1 << n;
    double d2 = mismatch_delta2(u);
    double inf = d2 * (4 * dim - d2) / (4.0 * (dim + double(dim) * dim));
    out.points.push_back({double(n), d2, inf, d2});
  }
  return out;
}

// amplitude offset x frequency offset grid for a composite on one qubit
inline ScanResult scan_amplitude_frequency(const CompositeSpec& spec,
                                           const std::map<std::string, PulseShape>& shapes,
                                           const std::vector<double>& f_grid,
                                           const std::vector<double>& dtau_grid,
                                           int steps_per_slot = 256, int jobs = 1) {
  if (f_grid.empty() || dtau_grid.empty())
    throw std::invalid_argument("empty scan grid");
  ScanResult out;
  out.x_name = "f";
  out.y_name = "dtau";
  mat target = rot_xy(spec.target_angle, spec.target_psi);
  out.points.resize(f_grid.size() * dtau_grid.size());

  auto work = [&](size_t lo, size_t hi) {
    for (size_t idx = lo; idx < hi; idx++) {
      double f = f_grid[idx / dtau_grid.size()];
      double dt = dtau_grid[idx % dtau_grid.size()];
      ControlSchedule sch = compile_composite(spec, shapes, f);
      mat h_s = dt / 2 * pauli(3);  // tau_p = 1, so Delta = dtau
      mat u = polar_unitary(cycle_unitary(sch, h_s, steps_per_slot));
      FidelityReport rep = average_fidelity(u, target);
      out.points[idx] = {f, dt, 1 - rep.F, rep.delta2};
    }
  };
  size_t total = out.points.size();
  if (jobs <= 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (total + jobs - 1) / jobs;
    for (int j = 0; j < jobs; j++) {
      size_t lo = j * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

struct SlopeFit {
  double slope = 0, intercept = 0, r2 = 0;
  int used = 0;
};

inline SlopeFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  int n = int(xs.size());
  if (n < 2) throw std::invalid_argument("need >= 2 points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; i++) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  SlopeFit f;
  f.used = n;
  double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double sse = 0, sst = 0, ybar = sy / n;
  for (int i = 0; i < n; i++) {
    double e = ys[i] - (f.slope * xs[i] + f.intercept);
    sse += e * e;
    sst += (ys[i] - ybar) * (ys[i] - ybar);
  }
  f.r2 = sst > 0 ? 1 - sse / sst : 1;
  return f;
}

// log-log slope of delta(tau), restricted to lo < delta < hi
inline SlopeFit fit_delta_slope(const ScanResult& r, double lo = 1e-8, double hi = 1e-2) {
  std::vector<double> xs, ys;
  for (const auto& p : r.points)
    if (p.y > lo && p.y < hi) {
      xs.push_back(std::log(p.x));
      ys.push_back(std::log(p.y));
    }
  return fit_line(xs, ys);
}

}  // namespace qp
