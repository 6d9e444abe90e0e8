#pragma once

#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace qp {

struct FidelityReport {
  double F = 1;
  double delta2 = 0;
  int N = 0;
};

// delta^2 = 2N - 2|tr V|, evaluated without the catastrophic cancellation of
// the literal form: ||1 - V~||_F^2 - (||V||_F^2 - N) with V~ phase-stripped.
// Both pieces are sums of small terms; the second removes the non-unitarity
// bias of numerically propagated V.
inline double mismatch_delta2(const mat& v) {
  int n = int(v.rows());
  cxd tr = v.trace();
  cxd ph = std::abs(tr) > 0 ? std::conj(tr) / std::abs(tr) : cxd(1, 0);
  double acc = 0;
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      cxd e = ph * v(i, j) - (i == j ? 1.0 : 0.0);
      acc += std::norm(e);
      acc -= std::norm(v(i, j)) - (i == j ? 1.0 : 0.0);
    }
  return acc;
}

// delta^2 of uc^m for unitary uc, via the cycle eigenphases. Entrywise
// evaluation of the powered matrix bottoms out at delta ~ sqrt(eps N); the
// phases survive far below that, and the 2N - 2|sum exp(i d)| combination is
// rearranged so every term stays small.
inline double powered_mismatch_delta2(const mat& uc, long m) {
  int n = int(uc.rows());
  Eigen::ComplexEigenSolver<mat> es(uc, false);
  std::vector<double> phi(n);
  cxd s0 = 0;
  for (int i = 0; i < n; i++) {
    phi[i] = std::arg(es.eigenvalues()[i]) * double(m);
    s0 += std::polar(1.0, phi[i]);
  }
  double mu = std::abs(s0) > 0 ? std::arg(s0) : 0.0;
  double a = 0, b = 0;
  for (int i = 0; i < n; i++) {
    double d = std::remainder(phi[i] - mu, 2 * M_PI);
    double sh = std::sin(d / 2);
    a += 2 * sh * sh;
    b += std::sin(d);
  }
  double r = std::hypot(n - a, b);
  return std::max(0.0, 2 * (2 * n * a - a * a - b * b) / (n + r));
}

inline FidelityReport average_fidelity(const mat& u, const mat& u0) {
  int n = int(u.rows());
  if (u0.rows() != n) throw std::invalid_argument("dimension mismatch");
  if ((u.adjoint() * u - mat::Identity(n, n)).norm() > 1e-8 ||
      (u0.adjoint() * u0 - mat::Identity(n, n)).norm() > 1e-8)
    throw std::invalid_argument("inputs must be unitary");
  mat v = u0.adjoint() * u;
  FidelityReport rep;
  rep.N = n;
  rep.delta2 = mismatch_delta2(v);
  // 1 - F = delta^2 (4N - delta^2) / (4(N + N^2))
  rep.F = 1 - rep.delta2 * (4 * n - rep.delta2) / (4.0 * (n + double(n) * n));
  return rep;
}

struct McFidelity {
  double mean = 0;
  double stderr_ = 0;
};

// Monte Carlo over Haar-random pure states: mean of |<psi|U0^dag U|psi>|^2
inline McFidelity mc_fidelity(const mat& u, const mat& u0, int n_states, uint64_t seed) {
  if (n_states < 1000) throw std::invalid_argument("n_states >= 1e3 required");
  int n = int(u.rows());
  mat v = u0.adjoint() * u;
  counter_rng rng{seed, 0xf1de11ULL, 0};
  double acc = 0, acc2 = 0;
  vec psi(n);
  for (int s = 0; s < n_states; s++) {
    for (int i = 0; i < n; i++) psi[i] = cxd(rng.normal(), rng.normal());
    psi.normalize();
    double f = std::norm(psi.dot(v * psi));
    acc += f;
    acc2 += f * f;
  }
  McFidelity out;
  out.mean = acc / n_states;
  double var = acc2 / n_states - out.mean * out.mean;
  out.stderr_ = std::sqrt(std::max(0.0, var) / n_states);
  return out;
}

}  // namespace qp
