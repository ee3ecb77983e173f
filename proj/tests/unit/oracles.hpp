#pragma once

// Reference implementations written directly from the textbook definitions.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "rotcoh/rotor.hpp"
#include "rotcoh/wigner.hpp"

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

// N e^{iM phi} sum_k b_k d^J_{Mk}(theta) e^{ik chi}, N = sqrt((2J+1)/8 pi^2).
inline cd psi(int J, int M, const std::vector<double>& signed_coeffs, double th, double ph, double ch) {
  cd s = 0.0;
  for (int k = -J; k <= J; ++k) {
    if (signed_coeffs[k + J] == 0.0) continue;
    s += signed_coeffs[k + J] * rotcoh::wigner::small_d(J, M, k, th) * std::polar(1.0, k * ch);
  }
  return std::sqrt((2 * J + 1) / (8 * pi * pi)) * std::polar(1.0, M * ph) * s;
}

inline cd psi(const rotcoh::RotorState& st, int M, double th, double ph, double ch) {
  return psi(st.J, M, st.signed_coeffs(), th, ph, ch);
}

inline Eigen::Matrix3d rz(double a) {
  Eigen::Matrix3d r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

inline Eigen::Matrix3d rot(double th, double ph, double ch) {
  Eigen::Matrix3d ry;
  ry << std::cos(th), 0, std::sin(th), 0, 1, 0, -std::sin(th), 0, std::cos(th);
  return rz(ph) * ry * rz(ch);
}

// Lab spherical components of a symmetric tensor.
inline cd lab_component(const Eigen::Matrix3d& a, int p) {
  if (p == 0) return (2 * a(2, 2) - a(0, 0) - a(1, 1)) / std::sqrt(6.0);
  if (p == 2) return cd(a(0, 0) - a(1, 1), 2 * a(0, 1)) / 2.0;
  if (p == -2) return cd(a(0, 0) - a(1, 1), -2 * a(0, 1)) / 2.0;
  if (p == 1) return -cd(a(0, 2), a(1, 2));
  return cd(a(0, 2), -a(1, 2));
}

// Integral of f(theta, phi, chi) sin(theta) over the rotation group: Gauss-Legendre in
// cos(theta), trapezoid (exact for trigonometric polynomials) in the two azimuths.
template <class F>
cd group_integral(F&& f, int n_theta, int n_angle) {
  const auto gl = rotcoh::wigner::gauss_legendre(n_theta);
  cd sum = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double th = std::acos(gl.nodes[i]);
    for (int j = 0; j < n_angle; ++j) {
      const double ph = 2 * pi * j / n_angle;
      for (int l = 0; l < n_angle; ++l) sum += gl.weights[i] * f(th, ph, 2 * pi * l / n_angle);
    }
  }
  return sum * std::pow(2 * pi / n_angle, 2);
}

// Adaptive Simpson on a real integrand.
template <class F>
double simpson(F&& f, double a, double b, double tol, int depth = 40) {
  auto rec = [&](auto&& self, double a, double b, double fa, double fm, double fb, double whole, double eps, int d) -> double {
    const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (d <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
    return self(self, a, m, fa, flm, fm, left, eps / 2, d - 1) + self(self, m, b, fm, frm, fb, right, eps / 2, d - 1);
  };
  // 13 panels so periodic integrands cannot alias the first estimates
  const int panels = 13;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + (b - a) * i / panels, x1 = a + (b - a) * (i + 1) / panels;
    const double fa = f(x0), fb = f(x1), fm = f(0.5 * (x0 + x1));
    sum += rec(rec, x0, x1, fa, fm, fb, (x1 - x0) / 6 * (fa + 4 * fm + fb), tol / panels, depth);
  }
  return sum;
}

}  // namespace oracle
