#pragma once

// Angular-momentum special functions.
//
// Conventions (used consistently by every module):
//   * Euler angles (phi, theta, chi) describe the active z-y-z rotation
//       R = Rz(phi) * Ry(theta) * Rz(chi),
//     whose columns are the body-fixed x, y, z axes expressed in the lab frame.
//   * D^J_{mk}(phi, theta, chi) = exp(-i m phi) d^J_{mk}(theta) exp(-i k chi)
//     with d^J the Wigner small-d matrix in the Condon-Shortley phase convention,
//     e.g. d^1_{1,0}(theta) = -sin(theta)/sqrt(2).
//   * Symmetric-top functions <Omega|J k M> = sqrt((2J+1)/(8 pi^2)) conj(D^J_{Mk}(Omega)),
//     so M is the lab Z projection and k the body z projection.

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace rotcoh::wigner {

struct AngularIndex {
  int J = 0;
  int m = 0;
  int k = 0;

  AngularIndex() = default;
  AngularIndex(int J_, int m_, int k_);  // throws std::invalid_argument
};

// log(n!) from a lazily built table; n may be up to a few thousand.
double log_factorial(int n);

double small_d(int J, int m1, int m2, double theta);

// Fills out[k + J] = d^J_{m,k}(theta) for k = -J..J. out.size() must be 2J+1.
void small_d_row(int J, int m, double theta, std::span<double> out);

std::complex<double> big_D(int J, int m, int k, double theta, double phi, double chi);

// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) for integer arguments. Returns 0 when the
// triangle or projection rules fail.
double three_j(int j1, int j2, int j3, int m1, int m2, int m3);

// b_{J J' K K'} = int_0^pi sin(theta) d^J_{J,K}(theta) d^{J'}_{J',K'}(theta) dtheta.
// Closed form: the M = J row of d is a single monomial in cos/sin(theta/2), so the
// integral is a Beta function.
double b_overlap(int J, int Jp, int K, int Kp);

// Same integral by Gauss-Legendre quadrature over theta using small_d.
double b_overlap_quadrature(int J, int Jp, int K, int Kp);

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

}  // namespace rotcoh::wigner
