#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qp {

using cxd = std::complex<double>;
using mat = Eigen::MatrixXcd;
using vec = Eigen::VectorXcd;

inline const cxd iu(0, 1);

inline mat pauli(int mu) {
  mat m(2, 2);
  switch (mu) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -iu, iu, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline mat kron(const mat& a, const mat& b) {
  mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); i++)
    for (int j = 0; j < a.cols(); j++)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// single-site operator s acting on `site` of an n-qubit register
inline mat site_op(int n, int site, const mat& s) {
  mat out = mat::Identity(1, 1);
  for (int i = 0; i < n; i++)
    out = kron(out, i == site ? s : mat::Identity(2, 2));
  return out;
}

inline double fro(const mat& m) { return m.norm(); }

// nearest unitary (polar factor)
inline mat polar_unitary(const mat& u) {
  Eigen::JacobiSVD<mat> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// exp(-i H t) for Hermitian H
inline mat expm_herm(const mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<mat> es(h);
  vec ph = (-iu * t * es.eigenvalues().cast<cxd>().array()).exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

inline mat mat_power(mat u, long n) {
  mat out = mat::Identity(u.rows(), u.cols());
  while (n > 0) {
    if (n & 1) out = out * u;
    u = u * u;
    n >>= 1;
  }
  return out;
}

// in-plane rotation by `angle` about axis at phase psi in the x-y plane
inline mat rot_xy(double angle, double psi) {
  mat ax = std::cos(psi) * pauli(1) + std::sin(psi) * pauli(2);
  return std::cos(angle / 2) * mat::Identity(2, 2) - iu * std::sin(angle / 2) * ax;
}

}  // namespace qp
