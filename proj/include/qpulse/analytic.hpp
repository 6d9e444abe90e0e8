#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "shapes.hpp"

namespace qp {

// H_S = A0 + sigma^x Ax + sigma^y Ay + sigma^z Az on qubit (x) env, with
// d x d Hermitian blocks (d=1 for scalar couplings)
struct GeneralCoupling {
  mat a0, ax, ay, az;

  int d() const { return int(a0.rows()); }
  mat to_hamiltonian() const {
    return kron(mat::Identity(2, 2), a0) + kron(pauli(1), ax) +
           kron(pauli(2), ay) + kron(pauli(3), az);
  }
};

inline GeneralCoupling scalar_coupling(double a0, double ax, double ay, double az) {
  auto m = [](double v) { return v * mat::Identity(1, 1); };
  return {m(a0), m(ax), m(ay), m(az)};
}

inline void check_coupling(const GeneralCoupling& a) {
  int d = a.d();
  for (const mat* m : {&a.a0, &a.ax, &a.ay, &a.az})
    if (m->rows() != d || m->cols() != d)
      throw std::invalid_argument("coupling block dimension mismatch");
}

inline mat h0_general(const ShapeParams& p, double phi0, const GeneralCoupling& a) {
  check_coupling(a);
  double c = std::cos(phi0 / 2), s = std::sin(phi0 / 2);
  mat id = mat::Identity(2, 2);
  return kron(id, a.a0) + kron(pauli(1), a.ax) +
         p.upsilon * (kron(pauli(2), a.ay * c + a.az * s) +
                      kron(pauli(3), a.az * c - a.ay * s));
}

// H^(1) = -i tau (zetaC [Be,Bc] + zetaS [Be,Bs] - alpha [Bc,Bs]) with
// Be = A0 + sx Ax, Bc = sy Ay + sz Az, Bs = sy Az - sz Ay.
// Matches the TDPT cumulant i(R2 - R1^2/2)/tau for arbitrary couplings.
inline mat h1_general(const ShapeParams& p, double phi0, const GeneralCoupling& a,
                      double tau_p = 1.0) {
  check_coupling(a);
  (void)phi0;  // the angle enters through zetaC/zetaS inside ShapeParams
  mat be = kron(mat::Identity(2, 2), a.a0) + kron(pauli(1), a.ax);
  mat bc = kron(pauli(2), a.ay) + kron(pauli(3), a.az);
  mat bs = kron(pauli(2), a.az) - kron(pauli(3), a.ay);
  auto comm = [](const mat& x, const mat& y) { return mat(x * y - y * x); };
  return -iu * tau_p *
         (p.zetaC * comm(be, bc) + p.zetaS * comm(be, bs) - p.alpha * comm(bc, bs));
}

// Second-order expansion of a single shaped pulse against a chemical shift,
// with the pulse axis at in-plane phase psi; x = tau*Delta.
// The alpha normalization of the closed form is -2x the quadrature (table)
// convention, and the linear term is -i(x upsilon/2) sigma_z with no extra
// in-plane rotation; both pinned by the exact-propagation oracle.
inline mat unitary_x_expansion(double phi0, const ShapeParams& p, double delta_tau,
                               double psi = 0) {
  double th = phi0 / 2, x = delta_tau;
  double a_eq = -2 * p.alpha;
  mat id = mat::Identity(2, 2);
  mat spsi = std::cos(psi) * pauli(1) + std::sin(psi) * pauli(2);
  mat u = std::cos(th) * id - iu * std::sin(th) * spsi;
  u += x * (-iu * (p.upsilon / 2)) * pauli(3);
  u += x * x * ((p.upsilon * p.upsilon / 8) * (iu * std::sin(th) * spsi - std::cos(th) * id) +
                (a_eq / 4) * (iu * std::cos(th) * spsi + std::sin(th) * id));
  return u;
}

// per-pulse inputs for composite-pulse series
struct CompositePulse {
  double phi0 = M_PI;
  double psi = 0;
  double upsilon = 0;
  double dupsilon = 0;  // d upsilon / df
  double alpha = 0;     // quadrature (table) convention
};

struct CompositeTerm {
  int deg_f = 0, deg_dt = 0;
  mat coeff;  // 2x2
};

struct CompositeExpansion {
  std::vector<CompositeTerm> terms;  // total degree <= 3

  mat eval(double f, double dtau) const {
    mat u = mat::Zero(2, 2);
    for (const auto& t : terms)
      u += std::pow(f, t.deg_f) * std::pow(dtau, t.deg_dt) * t.coeff;
    return u;
  }
  const mat& term(int df, int ddt) const {
    for (const auto& t : terms)
      if (t.deg_f == df && t.deg_dt == ddt) return t.coeff;
    throw std::out_of_range("no such term");
  }
};

namespace detail {

// truncated series for one pulse at amplitude offset f
inline mat pulse_series(const CompositePulse& p, double f, double x) {
  ShapeParams sp;
  sp.upsilon = p.upsilon + p.dupsilon * f;
  sp.alpha = p.alpha;
  double th = (1 + f) * p.phi0 / 2;
  mat spsi = std::cos(p.psi) * pauli(1) + std::sin(p.psi) * pauli(2);
  mat u = std::cos(th) * mat::Identity(2, 2) - iu * std::sin(th) * spsi;
  mat rest = unitary_x_expansion(p.phi0, sp, x, p.psi) -
             (std::cos(p.phi0 / 2) * mat::Identity(2, 2) -
              iu * std::sin(p.phi0 / 2) * spsi);
  return u + rest;
}

}  // namespace detail

// Product of per-pulse truncated series sampled on an (f, tau*Delta) stencil,
// fitted to a polynomial of total degree <= 3.
inline CompositeExpansion composite_expansion(const std::vector<CompositePulse>& pulses,
                                              double stencil = 1e-2) {
  std::vector<std::pair<int, int>> degs;
  for (int i = 0; i <= 3; i++)
    for (int j = 0; i + j <= 3; j++) degs.push_back({i, j});
  int nterm = int(degs.size());

  std::vector<double> grid = {-2 * stencil, -stencil, 0, stencil, 2 * stencil};
  int npts = int(grid.size() * grid.size());
  Eigen::MatrixXd design(npts, nterm);
  std::vector<mat> samples(npts);
  int row = 0;
  for (double f : grid)
    for (double x : grid) {
      mat u = mat::Identity(2, 2);
      for (const auto& p : pulses) u = detail::pulse_series(p, f, x) * u;
      samples[row] = u;
      for (int t = 0; t < nterm; t++)
        design(row, t) = std::pow(f, degs[t].first) * std::pow(x, degs[t].second);
      row++;
    }
  Eigen::MatrixXd pinv =
      (design.transpose() * design).ldlt().solve(design.transpose()).eval();

  CompositeExpansion out;
  for (int t = 0; t < nterm; t++) out.terms.push_back({degs[t].first, degs[t].second, mat::Zero(2, 2)});
  for (int i = 0; i < 2; i++)
    for (int j = 0; j < 2; j++) {
      vec y(npts);
      for (int r = 0; r < npts; r++) y[r] = samples[r](i, j);
      vec c = pinv.cast<cxd>() * y;
      for (int t = 0; t < nterm; t++) out.terms[t].coeff(i, j) = c[t];
    }
  return out;
}

inline CompositeExpansion scrofulous_expansion(const CompositePulse& pi_pulse) {
  std::vector<CompositePulse> seq(3, pi_pulse);
  seq[0].psi = seq[2].psi = M_PI / 3;      // 60 degrees
  seq[1].psi = 5 * M_PI / 3;               // 300 degrees
  return composite_expansion(seq);
}

enum class Bb1Variant { W, CLJ, Wp, CLJp };

inline Bb1Variant bb1_variant_from_string(const std::string& s) {
  if (s == "W") return Bb1Variant::W;
  if (s == "CLJ") return Bb1Variant::CLJ;
  if (s == "Wp" || s == "W'") return Bb1Variant::Wp;
  if (s == "CLJp" || s == "CLJ'") return Bb1Variant::CLJp;
  throw std::invalid_argument("unknown BB1 variant: " + s);
}

inline double bb1_phi() { return -std::acos(-0.25); }

// phase/angle list for a BB1 variant targeting a pi_x rotation
inline std::vector<std::pair<double, double>> bb1_angles(Bb1Variant v) {
  double phi = bb1_phi();
  switch (v) {
    case Bb1Variant::W:
      return {{M_PI, 0}, {M_PI, phi}, {2 * M_PI, 3 * phi}, {M_PI, phi}};
    case Bb1Variant::CLJ:
      return {{M_PI / 2, 0}, {M_PI, phi}, {2 * M_PI, 3 * phi}, {M_PI, phi}, {M_PI / 2, 0}};
    case Bb1Variant::Wp:
      return {{M_PI, 0}, {M_PI, phi}, {M_PI, 3 * phi}, {M_PI, 3 * phi}, {M_PI, phi}};
    default:
      return {{M_PI / 2, 0}, {M_PI, phi}, {M_PI, 3 * phi}, {M_PI, 3 * phi},
              {M_PI, phi}, {M_PI / 2, 0}};
  }
}

// pi_params used for every pi (and pi/2) pulse, twopi_params for the 2pi pulse
inline CompositeExpansion bb1_expansion(Bb1Variant v, const CompositePulse& pi_params,
                                        const CompositePulse& twopi_params) {
  std::vector<CompositePulse> seq;
  for (auto [angle, psi] : bb1_angles(v)) {
    CompositePulse p = (angle > 1.5 * M_PI) ? twopi_params : pi_params;
    p.phi0 = angle;
    p.psi = psi;
    seq.push_back(p);
  }
  return composite_expansion(seq);
}

}  // namespace qp
