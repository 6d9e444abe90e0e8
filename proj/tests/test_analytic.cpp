#include <catch2/catch_amalgamated.hpp>

#include "qpulse/analytic.hpp"
#include "qpulse/qdyn.hpp"
#include "qpulse/rng.hpp"
#include "qpulse/shape_library.hpp"

using namespace qp;

namespace {

mat rand_herm(counter_rng& rng, int d) {
  mat m(d, d);
  for (int i = 0; i < d; i++)
    for (int j = 0; j < d; j++) m(i, j) = cxd(rng.normal(), rng.normal());
  return 0.5 * (m + m.adjoint());
}

}  // namespace

TEST_CASE("closed-form average Hamiltonian vs direct quadrature") {
  struct Case {
    const char* label;
    int d;
  };
  for (const Case& c : {Case{"S1(180)", 1}, Case{"Q2(90)", 1}, Case{"S1(180)", 2},
                        Case{"S2(360)", 2}}) {
    PulseShape shape = builtin_shape(c.label);
    ShapeParams p = shape_params(shape);
    ControlSchedule sch = single_pulse_schedule(shape, 0, c.d);
    for (int trial = 0; trial < 5; trial++) {
      counter_rng rng{uint64_t(trial) + 17, 0xa11, 0};
      GeneralCoupling a;
      if (c.d == 1) {
        a = scalar_coupling(rng.normal(), rng.normal(), rng.normal(), rng.normal());
      } else {
        a = {rand_herm(rng, 2), rand_herm(rng, 2), rand_herm(rng, 2), rand_herm(rng, 2)};
      }
      MagnusOracle o = magnus_direct_oracle(sch, a.to_hamiltonian(), 8192);
      INFO(c.label << " d=" << c.d << " trial=" << trial);
      CHECK(fro(h0_general(p, shape.phi0, a) - o.h0) < 1e-6);
      CHECK(fro(h1_general(p, shape.phi0, a) - o.h1) < 1e-6);
    }
  }
}

TEST_CASE("chemical-shift second order has the quadrature-alpha coefficient") {
  PulseShape s1 = builtin_shape("S1(180)");
  ShapeParams p = shape_params(s1);
  double delta = 0.7;
  mat h1 = h1_general(p, s1.phi0, scalar_coupling(0, 0, 0, delta / 2));
  mat pred = (p.alpha / 2) * delta * delta * pauli(1);
  CHECK(fro(h1 - pred) < 1e-10);
}

TEST_CASE("single-pulse off-resonance expansion vs exact propagation") {
  double x = 0.1;  // tau*Delta
  struct Named {
    std::string name;
    ShapeParams p;
    double phi0;
    ControlSchedule sch;
  };
  std::vector<Named> cases;
  {
    PulseShape s = builtin_shape("S1(180)");
    cases.push_back({"S1(180)", shape_params(s), s.phi0, single_pulse_schedule(s)});
    GaussianShape g{M_PI / 2, 1.0, 0.1};
    cases.push_back({"G0.1(90)", shape_params(g), g.phi0, single_pulse_schedule(g)});
    GaussianShape g2{M_PI, 1.0, 0.05};
    cases.push_back({"G0.05(180)", shape_params(g2), g2.phi0, single_pulse_schedule(g2)});
  }
  for (const auto& c : cases) {
    mat exact = cycle_unitary(c.sch, (x / 2) * pauli(3), 1024);
    mat series = unitary_x_expansion(c.phi0, c.p, x);
    INFO(c.name);
    CHECK(fro(exact - series) < 5e-4);  // residual is O(x^3)
    // the quadratic piece matters at this x
    mat linear = unitary_x_expansion(c.phi0, c.p, 0) +
                 x * (-iu * (c.p.upsilon / 2)) * pauli(3);
    CHECK(fro(exact - linear) > fro(exact - series));
  }
}

TEST_CASE("scrofulous expansion of hard pulses") {
  CompositePulse hard;
  hard.phi0 = M_PI;
  hard.upsilon = 0;
  hard.dupsilon = -M_PI / 2;
  hard.alpha = 0;
  CompositeExpansion e = scrofulous_expansion(hard);

  CHECK(fro(e.term(0, 0) - (-iu) * pauli(1)) < 1e-5);
  // amplitude error enters at second order, along sigma_y
  mat pred = -iu * (std::sqrt(3) * M_PI * M_PI / 8) * pauli(2);
  CHECK(fro(e.term(2, 0) - pred) < 1e-2 * fro(pred));
  CHECK(fro(e.term(1, 0)) < 1e-5);

  // leading infidelity 1 - F = (2/3) |E|^2 with E = sqrt(3) pi^2 f^2 / 8
  double f = 0.03;
  mat u = polar_unitary(e.eval(f, 0));
  double amp = std::sqrt(3) * M_PI * M_PI * f * f / 8;
  double relerr = 1;  // compare against the N=2 trace formula
  {
    cxd tr = ((-iu * pauli(1)).adjoint() * u).trace();
    double d2 = 4 - 2 * std::abs(tr);
    double infid = d2 * (8 - d2) / 24;
    relerr = std::abs(infid - (2.0 / 3) * amp * amp) / ((2.0 / 3) * amp * amp);
  }
  CHECK(relerr < 0.05);
}

TEST_CASE("bb1 phase and on-resonance cubic error") {
  CHECK(std::cos(bb1_phi()) == Catch::Approx(-0.25).margin(1e-15));

  CompositePulse hard;  // alpha and upsilon vanish for hard pi pulses
  hard.dupsilon = -M_PI / 2;
  CompositePulse hard2pi;
  hard2pi.upsilon = -1;  // cos(pi)
  hard2pi.dupsilon = 0;  // d cos((1+f)pi)/df = pi sin = 0 at f=0... checked below
  hard2pi.alpha = 0;

  CompositeExpansion e = bb1_expansion(Bb1Variant::W, hard, hard2pi);
  CHECK(fro(e.term(0, 0) - (-iu) * pauli(1)) < 1e-5);
  CHECK(fro(e.term(1, 0)) < 1e-5);
  CHECK(fro(e.term(2, 0)) < 0.05);
  mat cubic = -(std::pow(M_PI, 3) / 64) *
              (5 * mat::Identity(2, 2) - iu * std::sqrt(15) * pauli(3));
  CHECK(fro(e.term(3, 0) - cubic) < 2e-2 * fro(cubic));

  // the fit reproduces the exact hard-pulse product on resonance
  double f = 0.02;
  mat exact = mat::Identity(2, 2);
  for (auto [angle, psi] : bb1_angles(Bb1Variant::W))
    exact = rot_xy((1 + f) * angle, psi) * exact;
  CHECK(fro(e.eval(f, 0) - exact) < 2e-4);
}

TEST_CASE("bb1 variants: alpha sensitivity of the off-resonance quadratic") {
  auto quad = [](Bb1Variant v, double a1, double a2) {
    CompositePulse pi_p;
    pi_p.dupsilon = -M_PI / 2;
    pi_p.alpha = a1;
    CompositePulse tp;
    tp.upsilon = -1;
    tp.alpha = a2;
    return bb1_expansion(v, pi_p, tp).term(0, 2);
  };

  double a1 = 0.0332661, a2 = 0.0739621;

  // W' is insensitive to the pulse-shape alphas (cross terms of the degree-3
  // fit leave a small stencil^2 floor)
  mat wp0 = quad(Bb1Variant::Wp, 0, 0);
  CHECK(fro(quad(Bb1Variant::Wp, a1, a2) - wp0) < 1e-4);
  CHECK(fro(quad(Bb1Variant::Wp, 5 * a1, -3 * a2) - wp0) < 5e-4);

  // W depends on the combination 2*alpha_pi - alpha_2pi only
  mat w_base = quad(Bb1Variant::W, a1, a2);
  double d = 0.011;
  CHECK(fro(quad(Bb1Variant::W, a1 + d, a2 + 2 * d) - w_base) < 1e-4);
  mat shift = quad(Bb1Variant::W, a1 + d, a2) - w_base;
  CHECK(fro(shift) > 1e-3);
  mat shift2 = w_base - quad(Bb1Variant::W, a1, a2 + 2 * d);
  CHECK(fro(shift - shift2) < 1e-4);

  // structure of the alpha term: proportional to 1 + i sqrt(15) sigma_z
  mat dir = mat::Identity(2, 2) + iu * std::sqrt(15) * pauli(3);
  cxd c = (dir.adjoint() * shift).trace() / (dir.adjoint() * dir).trace();
  CHECK(fro(shift - cxd(c) * dir) < 1e-2 * fro(shift));
}

TEST_CASE("coupling block validation") {
  GeneralCoupling bad = scalar_coupling(0, 1, 0, 0);
  bad.az = mat::Identity(2, 2);
  ShapeParams p;
  CHECK_THROWS_AS(h0_general(p, M_PI, bad), std::invalid_argument);
  CHECK_THROWS_AS(h1_general(p, M_PI, bad), std::invalid_argument);
  CompositeExpansion e;
  CHECK_THROWS_AS(e.term(0, 0), std::out_of_range);
}
