#include "rotcoh/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rotcoh/constants.hpp"

namespace rotcoh::wigner {

namespace {

constexpr int kFactorialTable = 4096;

const std::vector<double>& log_factorial_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(kFactorialTable + 1, 0.0);
    for (int n = 2; n <= kFactorialTable; ++n) t[n] = t[n - 1] + std::log(static_cast<double>(n));
    return t;
  }();
  return table;
}

inline double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

void check_index(int J, int m, int k, const char* what) {
  if (J < 0 || std::abs(m) > J || std::abs(k) > J) {
    throw std::invalid_argument(std::string(what) + ": index out of range (J=" + std::to_string(J) +
                                ", m=" + std::to_string(m) + ", k=" + std::to_string(k) + ")");
  }
}

// Jacobi polynomial P_n^{(a,b)}(x) by forward recurrence.
double jacobi(int n, int a, int b, double x) {
  if (n == 0) return 1.0;
  const double A = a, B = b;
  double p0 = 1.0;
  double p1 = 0.5 * (2.0 * (A + 1.0) + (A + B + 2.0) * (x - 1.0));
  for (int i = 2; i <= n; ++i) {
    const double N = i;
    const double s = 2.0 * N + A + B;
    const double c1 = 2.0 * N * (N + A + B) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + A * A - B * B);
    const double c3 = 2.0 * (N + A - 1.0) * (N + B - 1.0) * s;
    const double p2 = (c2 * p1 - c3 * p0) / c1;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// d^J_{mp,m}(theta) for mp >= |m|.
double small_d_canonical(int J, int mp, int m, double theta) {
  const int n = J - mp;
  const int a = mp - m;
  const int b = mp + m;
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  if ((a > 0 && s == 0.0) || (b > 0 && c == 0.0)) return 0.0;

  double sign = parity(a);
  if (s < 0.0 && (a % 2 != 0)) sign = -sign;
  if (c < 0.0 && (b % 2 != 0)) sign = -sign;
  double log_mag = 0.5 * (log_factorial(J + mp) + log_factorial(J - mp) - log_factorial(J + m) -
                          log_factorial(J - m));
  if (a > 0) log_mag += a * std::log(std::abs(s));
  if (b > 0) log_mag += b * std::log(std::abs(c));
  return sign * std::exp(log_mag) * jacobi(n, a, b, std::cos(theta));
}

// Row d^J_{J,k}(theta), k = -J..J, by two-sided monomial recurrence.
void top_row(int J, double theta, std::span<double> out) {
  const double s = std::sin(0.5 * theta);
  const double c = std::cos(0.5 * theta);
  if (std::abs(c) >= std::abs(s)) {
    double v = std::pow(c, 2 * J);  // k = J
    out[2 * J] = v;
    for (int k = J; k > -J; --k) {
      // d_{J,k-1} / d_{J,k} = -sqrt((J+k)/(J-k+1)) * s / c
      v *= -std::sqrt(static_cast<double>(J + k) / (J - k + 1)) * (s / c);
      out[k - 1 + J] = v;
    }
  } else {
    double v = std::pow(s, 2 * J);  // k = -J, sign (-1)^{2J} = +1
    out[0] = v;
    for (int k = -J; k < J; ++k) {
      v *= -std::sqrt(static_cast<double>(J - k) / (J + k + 1)) * (c / s);
      out[k + 1 + J] = v;
    }
  }
}

}  // namespace

AngularIndex::AngularIndex(int J_, int m_, int k_) : J(J_), m(m_), k(k_) {
  check_index(J, m, k, "AngularIndex");
}

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: negative argument");
  if (n <= kFactorialTable) return log_factorial_table()[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double small_d(int J, int m1, int m2, double theta) {
  check_index(J, m1, m2, "small_d");
  if (m1 >= std::abs(m2)) return small_d_canonical(J, m1, m2, theta);
  if (m2 >= std::abs(m1)) return parity(m1 - m2) * small_d_canonical(J, m2, m1, theta);
  if (-m1 >= std::abs(m2)) return parity(m1 - m2) * small_d_canonical(J, -m1, -m2, theta);
  return small_d_canonical(J, -m2, -m1, theta);
}

void small_d_row(int J, int m, double theta, std::span<double> out) {
  check_index(J, m, 0, "small_d_row");
  if (out.size() != static_cast<std::size_t>(2 * J + 1)) {
    throw std::invalid_argument("small_d_row: output span must hold 2J+1 values");
  }
  if (m == J) {
    top_row(J, theta, out);
    return;
  }
  if (m == -J) {
    // d_{-J,k} = (-1)^{J+k} d_{J,-k}
    std::vector<double> tmp(out.size());
    top_row(J, theta, tmp);
    for (int k = -J; k <= J; ++k) out[k + J] = parity(J + k) * tmp[-k + J];
    return;
  }
  for (int k = -J; k <= J; ++k) out[k + J] = small_d(J, m, k, theta);
}

std::complex<double> big_D(int J, int m, int k, double theta, double phi, double chi) {
  const double d = small_d(J, m, k, theta);
  return std::polar(d, -(m * phi + k * chi));
}

double three_j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (j1 < 0 || j2 < 0 || j3 < 0) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  if (j3 > j1 + j2 || j3 < std::abs(j1 - j2)) return 0.0;

  const double log_delta = log_factorial(j1 + j2 - j3) + log_factorial(j1 - j2 + j3) +
                           log_factorial(-j1 + j2 + j3) - log_factorial(j1 + j2 + j3 + 1);
  const double log_m = log_factorial(j1 + m1) + log_factorial(j1 - m1) + log_factorial(j2 + m2) +
                       log_factorial(j2 - m2) + log_factorial(j3 + m3) + log_factorial(j3 - m3);
  const double log_pref = 0.5 * (log_delta + log_m);

  const int t_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int t_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  double sum = 0.0;
  for (int t = t_min; t <= t_max; ++t) {
    const double log_den = log_factorial(t) + log_factorial(j3 - j2 + t + m1) +
                           log_factorial(j3 - j1 + t - m2) + log_factorial(j1 + j2 - j3 - t) +
                           log_factorial(j1 - t - m1) + log_factorial(j2 - t + m2);
    sum += parity(t) * std::exp(log_pref - log_den);
  }
  return parity(j1 - j2 - m3) * sum;
}

double b_overlap(int J, int Jp, int K, int Kp) {
  check_index(J, J, K, "b_overlap");
  check_index(Jp, Jp, Kp, "b_overlap");
  // d^J_{J,K} = (-1)^{J-K} sqrt(C(2J, J+K)) cos^{J+K}(theta/2) sin^{J-K}(theta/2)
  const double sign = parity((J - K) + (Jp - Kp));
  const double log_binom = 0.5 * (log_factorial(2 * J) - log_factorial(J + K) - log_factorial(J - K) +
                                  log_factorial(2 * Jp) - log_factorial(Jp + Kp) -
                                  log_factorial(Jp - Kp));
  const double a = J + K + Jp + Kp;  // power of cos(theta/2)
  const double b = J - K + Jp - Kp;  // power of sin(theta/2)
  // int_0^pi sin(theta) c^a s^b dtheta = 2 B(a/2 + 1, b/2 + 1)
  const double log_beta =
      std::lgamma(0.5 * a + 1.0) + std::lgamma(0.5 * b + 1.0) - std::lgamma(0.5 * (a + b) + 2.0);
  return sign * 2.0 * std::exp(log_binom + log_beta);
}

double b_overlap_quadrature(int J, int Jp, int K, int Kp) {
  check_index(J, J, K, "b_overlap_quadrature");
  check_index(Jp, Jp, Kp, "b_overlap_quadrature");
  const int n = std::max(2 * (J + Jp) + 32, 64);
  const GaussLegendre gl = gauss_legendre(n);
  const double half = 0.5 * units::kPi;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = half * (gl.nodes[i] + 1.0);
    sum += gl.weights[i] * std::sin(theta) * small_d(J, J, K, theta) * small_d(Jp, Jp, Kp, theta);
  }
  return half * sum;
}

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(units::kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = x; p0 = 1.0; }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) { p1 = x; p0 = 1.0; }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[n - 1 - i] = w;
  }
  return gl;
}

}  // namespace rotcoh::wigner
