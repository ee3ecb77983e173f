#pragma once

// Optical centrifuge in the cycle-averaged (carrier-free) picture.
//
// The polarization angle is phi(t) = pi * beta * (t - t0)^2 with beta in GHz/ps
// (instantaneous rotation frequency beta * (t - t0)), so the Raman resonance with a
// transition of frequency omega is reached at t = t0 + omega[GHz] / (2 beta).
// Interaction, cm^-1:
//   V(t) = -(1/4) E(t)^2 [ a_iso - A_0/sqrt(6) + (A_+2 e^{-2i phi} + A_-2 e^{2i phi}) / 2 ]
// with E in atomic units and the lab polarizability operators from coupling.hpp.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rotcoh/coupling.hpp"

namespace rotcoh {

enum class EnvelopeShape {
  intensity_sinc,  // intensity = E0^2 * max(0, sum of sinc lobes)
  amplitude_sinc,  // amplitude = E0 * max(0, sum of sinc lobes)
};

struct CentrifugeParams {
  double E0_V_per_cm = 1.7e8;
  double beta_GHz_per_ps = 60.0;
  double sigma_ps = 7.0;
  int handedness = +1;  // +1 raises M, -1 lowers it
  double t0_ps = 0.0;
  double window_sigmas = 4.0;  // each lobe is cut at |t - t_k| > window_sigmas * sigma
  EnvelopeShape shape = EnvelopeShape::intensity_sinc;

  void validate() const;  // throws std::invalid_argument
};

struct ScheduleEntry {
  double t_ps = 0.0;
  StateKey from;
  StateKey to;
  double omega_cm1 = 0.0;
};

struct EnvelopeSchedule {
  std::vector<ScheduleEntry> entries;
  std::vector<std::string> warnings;
};

EnvelopeSchedule resonance_schedule(const PathSpec& path, const CentrifugeParams& params);

double sinc(double x);  // sin(pi x) / (pi x)

// Field amplitude in V/cm. Zero before t0.
double envelope(double t, const EnvelopeSchedule& schedule, const CentrifugeParams& params);

double polarization_angle(double t, const CentrifugeParams& params);

// Scalar coefficients of V(t) = shift + c0 A_0 + c2 A_+2 + conj(c2) A_-2, cm^-1 per a.u.
struct InteractionTerms {
  double shift = 0.0;
  double c0 = 0.0;
  std::complex<double> c2{0.0, 0.0};
};

InteractionTerms interaction_terms(double t, const CentrifugeParams& params,
                                   const EnvelopeSchedule& schedule, double isotropic_au);

// Dense V(t) over the basis of `lab`, cm^-1.
Eigen::MatrixXcd interaction_hamiltonian(double t, const CentrifugeParams& params,
                                         const EnvelopeSchedule& schedule,
                                         const LabPolarizability& lab);

}  // namespace rotcoh
