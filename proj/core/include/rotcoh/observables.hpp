#pragma once

// Measurement-side quantities: wavefunctions on the rotation group, Monte-Carlo 2D
// alignment cosines, analytic coherence formulas, densities and axis distributions.
//
// A 2D alignment cosine cos^2(theta_{lambda,PQ}) takes the molecular axis lambda in the lab
// frame, projects it onto the lab plane PQ and measures cos^2 of the angle to a reference
// axis in that plane. The default reference is Z when the plane contains Z, X otherwise.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotcoh/dynamics.hpp"
#include "rotcoh/rotor.hpp"

namespace rotcoh {

// One component sum_k b_k |J, k, M> with amplitude amp at time t0.
struct PacketComponent {
  int J = 0;
  int M = 0;
  int tau = -1;  // Wang parity when built from a RotorState, -1 otherwise
  std::vector<double> signed_coeffs;  // k = -J..J
  double energy_cm1 = 0.0;
  std::complex<double> amp{1.0, 0.0};
};

// Superposition of rotor eigenstates sharing one body embedding. Amplitudes evolve freely:
// c_n(t) = c_n exp(-i 2 pi c E_n (t - t0)).
struct StatePacket {
  std::vector<PacketComponent> components;
  Embedding embedding;
  double t0_ps = 0.0;

  std::vector<std::complex<double>> amplitudes(double t) const;
  double norm() const;
  int j_max() const;
};

PacketComponent component_from_state(const RotorState& state, int M, std::complex<double> amp);

// Components with |c|^2 >= min_population (0 keeps everything).
StatePacket packet_from_wavepacket(const Wavepacket& wp, const RotorLevels& levels,
                                   double min_population = 0.0);

struct CoherenceSpec {
  Axis axis = Axis::a;
  int j_min = 0;
  int j_max = 0;
  std::vector<double> weights;  // |c_J|, one per member; empty means flat
  std::vector<double> phases;   // static phases phi_J^0; empty means zero unless random
  bool random_phases = false;
  std::uint64_t seed = 1;
  SymmetryFilter filter = SymmetryFilter::ground_species;

  std::vector<int> members() const;  // j_min, j_min + 2, ..., j_max
  void validate() const;
};

// Members resolved as the axis-principal state at M = J in the embedding z = axis,
// c_J = |c_J| exp(-i phi_J^0) at t = 0.
StatePacket resolve_coherence(const CoherenceSpec& spec, const MoleculeSpec& molecule);

std::complex<double> evaluate_wavefunction(const StatePacket& packet, double t, double theta,
                                           double phi, double chi);
std::complex<double> evaluate_wavefunction(const Wavepacket& wp, const RotorLevels& levels,
                                           double theta, double phi, double chi);

// R = Rz(phi) Ry(theta) Rz(chi); columns are the body axes in the lab frame.
Eigen::Matrix3d euler_rotation(double theta, double phi, double chi);

enum class LabAxis { X = 0, Y = 1, Z = 2 };

struct CosineSpec {
  enum class Kind { projected_axis, inplane_euler };
  Kind kind = Kind::projected_axis;
  Axis axis = Axis::a;
  std::array<LabAxis, 2> plane{LabAxis::Z, LabAxis::X};
  LabAxis ref = LabAxis::Z;

  std::string name() const;  // e.g. cos2_b_ZX, cos2_a_XY_refY, cos2_phichi
};

// "bZX", "cXY", "aXZ", optional "/Y" reference suffix, or "phichi" for cos^2(phi + chi).
CosineSpec parse_cosine(const std::string& text);  // throws std::invalid_argument

// Value of the cosine for one orientation; nullopt when the projection is degenerate.
std::optional<double> cosine_value(const CosineSpec& cosine, const Embedding& embedding,
                                   double theta, double phi, double chi);

struct MonteCarloConfig {
  long samples = 1'000'000;
  std::uint64_t seed = 1;
  int batches = 64;
  int threads = 0;  // 0: hardware concurrency
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
  long skipped = 0;
};

struct AlignmentTrace {
  std::vector<double> times_ps;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;   // [cosine][time]
  std::vector<std::vector<double>> stderrs;  // [cosine][time]
  std::vector<long> skipped;                 // per cosine

  double max(std::size_t cosine) const;
  double min(std::size_t cosine) const;
};

// Self-normalized importance sampling from uniform proposals on the rotation group.
AlignmentTrace alignment_trace(const StatePacket& packet, const std::vector<CosineSpec>& cosines,
                               const std::vector<double>& times_ps, const MonteCarloConfig& mc);

Estimate alignment_cos2_mc(const StatePacket& packet, double t, const CosineSpec& cosine,
                           const MonteCarloConfig& mc);

// Closed-form K = J coherence cosine:
//   1/2 + sum_J |c_J||c_J+2| sqrt((2J+1)(2J+5)) / (4J+6) cos(omega t + dphi).
// Requires a Delta J = 2 ladder of M = J components.
double analytic_cos2phi(const StatePacket& packet, double t);

// Expectation of cos^2(phi + chi) from the full signed-k coefficients:
//   1/2 + sum_J Re(c_J^* c_J+2) sqrt((2J+1)(2J+5))/4 sum_k b^J_k b^{J+2}_{k+2} b_overlap(J, J+2, k, k+2).
double analytic_cos2phi_full(const StatePacket& packet, double t);

// Same expectation by tensor-product quadrature over (theta, phi, chi).
double cos2phi_quadrature(const StatePacket& packet, double t);

std::complex<double> phi_integral(int delta_j);
std::complex<double> chi_integral(int delta_k);

struct EulerOffsets {
  double theta = 0.0;
  double phi = 0.0;
  double chi = 0.0;
};

// |psi|^2 of (|J,J,J> + |J+2,J+2,J+2>)/sqrt(2):
//   c^{4J} [ (2J+1) + (2J+5) c^8 + 2 sqrt((2J+1)(2J+5)) c^4 cos(2(phi~ + chi~) - omega t) ] / (16 pi^2)
// with c = cos(theta~/2) and tilde angles measured from the offsets; omega in rad/ps.
double cogwheel_density(int J, double theta, double phi, double chi, double t,
                        const EulerOffsets& offsets, double omega);

// T = 1 / (c dE), ps.
double cogwheel_period(double e_j_cm1, double e_jp2_cm1);

struct CloudPoint {
  std::string atom;
  Eigen::Vector3d position_A;
};

// Orientations drawn from |psi(t)|^2 by sampling-importance-resampling; every atom of the
// rigid geometry is placed in the lab frame for each drawn orientation.
std::vector<CloudPoint> density_cloud(const StatePacket& packet, double t,
                                      const std::vector<Atom>& geometry, long n_samples,
                                      std::uint64_t seed);

struct AxisDistribution {
  std::vector<double> theta_deg;  // polar angle from the body z axis
  std::vector<double> phi_deg;    // azimuth from body x
  Eigen::MatrixXd value;          // [theta][phi], max normalized to 1
  Embedding embedding;
};

// Husimi distribution |<J, k=J along n | state>|^2 over body directions n.
AxisDistribution rotation_axis_distribution(const RotorState& state, int n_theta, int n_phi);

}  // namespace rotcoh
