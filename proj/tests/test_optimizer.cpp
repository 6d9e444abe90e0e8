#include <catch2/catch_amalgamated.hpp>

#include "qpulse/optimizer.hpp"
#include "qpulse/shape_library.hpp"

using namespace qp;

namespace {

std::vector<double> free_part(const PulseShape& s, int l) {
  return {s.coeffs.begin(), s.coeffs.end() - l};
}

}  // namespace

TEST_CASE("constraint elimination reproduces a library shape") {
  PulseShape s2 = builtin_shape("S2(180)");
  OptimizationProblem prob;
  prob.phi0 = s2.phi0;
  prob.L = 2;
  prob.M = 4;
  std::vector<double> full = apply_constraints(prob, free_part(s2, 2));
  REQUIRE(full.size() == 4);
  CHECK(full[0] == s2.coeffs[0]);
  CHECK(full[1] == s2.coeffs[1]);
  CHECK(full[2] == Catch::Approx(s2.coeffs[2]).margin(1e-6));
  CHECK(full[3] == Catch::Approx(s2.coeffs[3]).margin(1e-6));
}

TEST_CASE("constraint elimination, edge cases") {
  OptimizationProblem prob;
  prob.phi0 = M_PI;
  prob.L = 0;
  prob.M = 3;
  std::vector<double> x = {0.3, -0.2, 0.7};
  CHECK(apply_constraints(prob, x) == x);

  prob.L = 1;
  prob.M = 1;
  std::vector<double> only = apply_constraints(prob, {});
  REQUIRE(only.size() == 1);
  CHECK(only[0] == Catch::Approx(-0.5).margin(1e-12));  // A1 = -A0 = -phi0/2pi

  prob.M = 3;
  CHECK_THROWS_AS(apply_constraints(prob, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("objective recognizes the library shapes") {
  OptimizationProblem prob;
  prob.phi0 = M_PI;
  prob.K = 2;
  prob.L = 1;
  prob.M = 4;
  ObjectiveBreakdown q1 = objective_detail(prob, free_part(builtin_shape("Q1(180)"), 1));
  CHECK(q1.first_term < 1e-5);
  CHECK(q1.protection == 0.0);

  OptimizationProblem p1 = prob;
  p1.K = 1;
  p1.M = 3;
  ObjectiveBreakdown s1 = objective_detail(p1, free_part(builtin_shape("S1(180)"), 1));
  CHECK(s1.first_term < 1e-5);
  CHECK(s1.penalty == Catch::Approx(1e-4 * 2.8316).epsilon(1e-3));

  // a first-order shape is far from second order
  ObjectiveBreakdown s1_k2 = objective_detail(prob, {-1.2053193822, 0.4796467863, 0.2256725959});
  CHECK(s1_k2.first_term > 1e-2);

  // the flat pulse refocuses nothing
  OptimizationProblem flat = p1;
  flat.M = 1;
  CHECK(objective_detail(flat, {}).first_term > 0.1);
}

TEST_CASE("protection term tracks the amplitude sensitivity") {
  OptimizationProblem prob;
  prob.phi0 = M_PI;
  prob.K = 1;
  prob.L = 1;
  prob.M = 3;
  prob.protect_dupsilon = true;
  ObjectiveBreakdown b = objective_detail(prob, free_part(builtin_shape("S1(180)"), 1));
  AmplitudeSensitivity sens = sensitivity(builtin_shape("S1(180)"));
  CHECK(b.protection == Catch::Approx(std::abs(sens.dupsilon)).epsilon(1e-3));
}

TEST_CASE("synthesis is deterministic in the seed") {
  OptimizationProblem prob;
  prob.phi0 = M_PI;
  prob.K = 1;
  prob.L = 1;
  prob.M = 4;
  prob.budget = 3000;
  prob.steps = 256;
  SynthesisResult a = synthesize(prob);
  SynthesisResult b = synthesize(prob);
  CHECK(a.shape.coeffs == b.shape.coeffs);
  CHECK(a.report.evaluations == b.report.evaluations);
  prob.seed = 2;
  SynthesisResult c = synthesize(prob);
  CHECK(a.shape.coeffs != c.shape.coeffs);
}

TEST_CASE("synthesized candidates respect the constraints") {
  OptimizationProblem prob;
  prob.phi0 = M_PI;
  prob.K = 1;
  prob.L = 1;
  prob.M = 4;
  prob.budget = 20000;
  prob.steps = 256;
  SynthesisResult r = synthesize(prob);
  REQUIRE(r.shape.coeffs.size() == 4);
  CHECK(std::abs(constraint_residual(r.shape, 0)) < 1e-10);
  CHECK(r.report.evaluations <= prob.budget + 2 * prob.M);
  CHECK(r.report.best >= r.report.first_term * 0.99);

  CHECK_THROWS_AS(synthesize(OptimizationProblem{.budget = 0}), std::invalid_argument);
}
