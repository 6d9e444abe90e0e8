#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace qp {

inline constexpr double two_pi = 2 * M_PI;

// Symmetric Fourier envelope V(t) = W*[A0 + sum_m Am cos(m W t)], W = 2pi/tau.
// A0 is not stored; it is pinned to phi0/2pi so the total angle is exact.
struct PulseShape {
  double phi0 = M_PI;
  double tau = 1.0;
  std::vector<double> coeffs;  // A1..AM
  int L = 0;                   // endpoint-constraint order
  int K = 0;                   // claimed refocusing order
  std::string label;

  double a0() const { return phi0 / two_pi; }
};

struct GaussianShape {
  double phi0 = M_PI;
  double tau = 1.0;
  double w = 0.1;  // sigma = w*tau
  std::string label;
};

struct HardPulse {
  double phi0 = M_PI;
  double tau = 1.0;  // delta-kick at t = tau/2
};

struct ShapeParams {
  double upsilon = 0, alpha = 0, zeta = 0;
  double zetaC = 0, zetaS = 0;
};

struct AmplitudeSensitivity {
  double dupsilon = 0;   // u' = d u~/df at f=0
  double d3upsilon = 0;  // u'''
  double dalpha = 0;     // a'
  double err = 0;        // Richardson disagreement estimate
};

inline void check_domain(double t, double tau) {
  if (t < -1e-12 || t > tau + 1e-12)
    throw std::domain_error("time outside pulse support");
}

inline double amplitude(const PulseShape& s, double t) {
  check_domain(t, s.tau);
  double om = two_pi / s.tau;
  double v = s.a0();
  for (size_t m = 1; m <= s.coeffs.size(); m++)
    v += s.coeffs[m - 1] * std::cos(m * om * t);
  return om * v;
}

inline double phase(const PulseShape& s, double t) {
  check_domain(t, s.tau);
  double om = two_pi / s.tau;
  double ph = s.phi0 * t / s.tau;
  for (size_t m = 1; m <= s.coeffs.size(); m++)
    ph += s.coeffs[m - 1] * std::sin(m * om * t) / m;
  return ph;
}

inline double gauss_norm(const GaussianShape& s) {
  double sig = s.w * s.tau;
  return sig * std::sqrt(M_PI) * std::erf(s.tau / (2 * sig));
}

inline double amplitude(const GaussianShape& s, double t) {
  check_domain(t, s.tau);
  double sig = s.w * s.tau;
  double x = (t - s.tau / 2) / sig;
  return s.phi0 / gauss_norm(s) * std::exp(-x * x);
}

inline double phase(const GaussianShape& s, double t) {
  check_domain(t, s.tau);
  double sig = s.w * s.tau;
  double e0 = std::erf(s.tau / (2 * sig));
  return s.phi0 * (std::erf((t - s.tau / 2) / sig) + e0) / (2 * e0);
}

inline double phase(const HardPulse& s, double t) {
  check_domain(t, s.tau);
  return t < s.tau / 2 ? 0.0 : s.phi0;
}

template <class S>
S amplitude_scale(const S& s, double f) {
  if (f <= -1) throw std::domain_error("amplitude scale f <= -1");
  S out = s;
  out.phi0 *= (1 + f);
  if constexpr (requires { out.coeffs; }) {
    for (auto& a : out.coeffs) a *= (1 + f);
  }
  return out;
}

// residual of the l-th endpoint constraint, l = 0..L-1
inline double constraint_residual(const PulseShape& s, int l) {
  double r = l == 0 ? s.a0() : 0.0;
  for (size_t m = 1; m <= s.coeffs.size(); m++)
    r += std::pow(double(m), 2 * l) * s.coeffs[m - 1];
  return r;
}

namespace detail {

// composite Simpson over n+1 equally spaced samples (n even)
inline double simpson(const std::vector<double>& y, double h) {
  double acc = y.front() + y.back();
  for (size_t i = 1; i + 1 < y.size(); i++) acc += (i % 2 ? 4.0 : 2.0) * y[i];
  return acc * h / 3;
}

template <class S>
ShapeParams shape_params_fixed(const S& s, int n) {
  double tau = s.tau, h = tau / n;
  std::vector<double> ph(n + 1);
  for (int i = 0; i <= n; i++) ph[i] = phase(s, i * h);
  double half = s.phi0 / 2;

  std::vector<double> cu(n + 1), zi(n + 1), c(n + 1), sn(n + 1);
  for (int i = 0; i <= n; i++) {
    cu[i] = std::cos(ph[i] - half);
    zi[i] = (i * h / tau - 0.5) * std::sin(ph[i] - half);
    c[i] = std::cos(ph[i]);
    sn[i] = std::sin(ph[i]);
  }
  // cumulative integrals of cos(phi), sin(phi); trapezoid is enough at the
  // Richardson-checked resolutions
  std::vector<double> C(n + 1, 0.0), Sc(n + 1, 0.0);
  for (int i = 1; i <= n; i++) {
    C[i] = C[i - 1] + h * (c[i] + c[i - 1]) / 2;
    Sc[i] = Sc[i - 1] + h * (sn[i] + sn[i - 1]) / 2;
  }
  std::vector<double> ai(n + 1);
  for (int i = 0; i <= n; i++) ai[i] = sn[i] * C[i] - c[i] * Sc[i];

  ShapeParams p;
  p.upsilon = simpson(cu, h) / tau;
  p.zeta = simpson(zi, h) / tau;
  p.alpha = simpson(ai, h) / (2 * tau * tau);
  p.zetaC = p.zeta * std::sin(half);
  p.zetaS = -p.zeta * std::cos(half);
  return p;
}

}  // namespace detail

inline ShapeParams shape_params(const HardPulse& s, int = 0) {
  ShapeParams p;
  p.upsilon = std::cos(s.phi0 / 2);
  p.alpha = std::sin(s.phi0) / 4;
  p.zeta = std::sin(s.phi0 / 2) / 4;
  p.zetaC = p.zeta * std::sin(s.phi0 / 2);
  p.zetaS = -p.zeta * std::cos(s.phi0 / 2);
  return p;
}

template <class S>
ShapeParams shape_params(const S& s, int quad_points = 1 << 12) {
  if (quad_points < 256 || quad_points % 2)
    throw std::invalid_argument("quad_points must be even and >= 256");
  int n = quad_points;
  ShapeParams prev = detail::shape_params_fixed(s, n);
  for (n *= 2; n <= (1 << 16); n *= 2) {
    ShapeParams cur = detail::shape_params_fixed(s, n);
    double d = std::max({std::abs(cur.upsilon - prev.upsilon),
                         std::abs(cur.alpha - prev.alpha),
                         std::abs(cur.zeta - prev.zeta)});
    if (d < 1e-8) return cur;
    prev = cur;
  }
  ShapeParams cur = detail::shape_params_fixed(s, 1 << 16);
  double d = std::max({std::abs(cur.upsilon - prev.upsilon),
                       std::abs(cur.alpha - prev.alpha),
                       std::abs(cur.zeta - prev.zeta)});
  if (d > 1e-6) throw std::runtime_error("shape_params quadrature did not converge");
  return cur;
}

struct NineIntegrals {
  // <X'Y> ordered double averages over t < t', X at the later time
  double ee, ec, es, ce, se, cc, cs, sc, ss;
};

template <class S>
NineIntegrals nine_integrals(const S& s, int quad_points = 1 << 14) {
  int n = quad_points;
  double tau = s.tau, h = tau / n;
  std::vector<double> one(n + 1, 1.0), c(n + 1), sn(n + 1);
  for (int i = 0; i <= n; i++) {
    double ph = phase(s, i * h);
    c[i] = std::cos(ph);
    sn[i] = std::sin(ph);
  }
  auto cum = [&](const std::vector<double>& y) {
    std::vector<double> out(n + 1, 0.0);
    for (int i = 1; i <= n; i++) out[i] = out[i - 1] + h * (y[i] + y[i - 1]) / 2;
    return out;
  };
  auto avg = [&](const std::vector<double>& later, const std::vector<double>& early) {
    auto E = cum(early);
    std::vector<double> integ(n + 1);
    for (int i = 0; i <= n; i++) integ[i] = later[i] * E[i];
    return detail::simpson(integ, h) / (tau * tau);
  };
  NineIntegrals out;
  out.ee = avg(one, one);
  out.ec = avg(one, c);
  out.es = avg(one, sn);
  out.ce = avg(c, one);
  out.se = avg(sn, one);
  out.cc = avg(c, c);
  out.cs = avg(c, sn);
  out.sc = avg(sn, c);
  out.ss = avg(sn, sn);
  return out;
}

template <class S>
AmplitudeSensitivity sensitivity(const S& s, double h = 1e-2) {
  if (h <= 0 || h > 1e-2) throw std::invalid_argument("need 0 < h <= 1e-2");
  auto at = [&](double f) { return detail::shape_params_fixed(amplitude_scale(s, f), 1 << 14); };
  auto stencil = [&](double hh) {
    AmplitudeSensitivity r;
    ShapeParams p2 = at(2 * hh), p1 = at(hh), m1 = at(-hh), m2 = at(-2 * hh);
    r.dupsilon = (-p2.upsilon + 8 * p1.upsilon - 8 * m1.upsilon + m2.upsilon) / (12 * hh);
    r.d3upsilon = (p2.upsilon - 2 * p1.upsilon + 2 * m1.upsilon - m2.upsilon) / (2 * hh * hh * hh);
    r.dalpha = (-p2.alpha + 8 * p1.alpha - 8 * m1.alpha + m2.alpha) / (12 * hh);
    return r;
  };
  AmplitudeSensitivity a = stencil(h), b = stencil(h / 2);
  b.err = std::max({std::abs(a.dupsilon - b.dupsilon), std::abs(a.dalpha - b.dalpha)});
  if (b.err > 1e-4) throw std::runtime_error("sensitivity stencil did not converge");
  return b;
}

struct SpectrumBin {
  double omega_over_Omega;
  double weight;  // |V_hat|^2, arbitrary common scale
};

template <class S>
std::vector<SpectrumBin> power_spectrum(const S& s, int n_samples = 1024) {
  int n = n_samples;
  double h = s.tau / n;
  std::vector<double> v(n);
  for (int i = 0; i < n; i++) v[i] = amplitude(s, (i + 0.5) * h);
  std::vector<SpectrumBin> out;
  for (int k = 0; k <= n / 2; k++) {
    double re = 0, im = 0;
    for (int i = 0; i < n; i++) {
      double arg = two_pi * k * (i + 0.5) / n;
      re += v[i] * std::cos(arg);
      im -= v[i] * std::sin(arg);
    }
    out.push_back({double(k), (re * re + im * im) / (n * double(n))});
  }
  return out;
}

}  // namespace qp
