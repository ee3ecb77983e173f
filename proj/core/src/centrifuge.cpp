#include "rotcoh/centrifuge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rotcoh/constants.hpp"

namespace rotcoh {

void CentrifugeParams::validate() const {
  if (!(E0_V_per_cm >= 0.0)) throw std::invalid_argument("centrifuge: E0 must be non-negative");
  if (!(beta_GHz_per_ps > 0.0)) throw std::invalid_argument("centrifuge: beta must be positive");
  if (!(sigma_ps > 0.0)) throw std::invalid_argument("centrifuge: sigma must be positive");
  if (handedness != 1 && handedness != -1) throw std::invalid_argument("centrifuge: handedness must be +1 or -1");
  if (!(window_sigmas > 0.0)) throw std::invalid_argument("centrifuge: lobe window must be positive");
}

EnvelopeSchedule resonance_schedule(const PathSpec& path, const CentrifugeParams& params) {
  params.validate();
  if (path.empty()) throw std::invalid_argument("resonance_schedule: path has no transitions");
  EnvelopeSchedule out;
  for (std::size_t k = 0; k < path.hops(); ++k) {
    const double omega = path.omegas_cm1[k];
    ScheduleEntry e;
    e.from = path.states[k];
    e.to = path.states[k + 1];
    e.omega_cm1 = omega;
    e.t_ps = params.t0_ps + units::wavenumber_to_ghz(omega) / (2.0 * params.beta_GHz_per_ps);
    if (k > 0 && !(omega > path.omegas_cm1[k - 1])) {
      std::ostringstream os;
      os << "non-monotonic resonance frequencies at hop " << k << ": " << path.omegas_cm1[k - 1]
         << " -> " << omega << " cm^-1";
      out.warnings.push_back(os.str());
    }
    out.entries.push_back(e);
  }
  return out;
}

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (units::kPi * x) * (units::kPi * x) / 6.0;
  return std::sin(units::kPi * x) / (units::kPi * x);
}

double envelope(double t, const EnvelopeSchedule& schedule, const CentrifugeParams& params) {
  if (t < params.t0_ps) return 0.0;
  double sum = 0.0;
  for (const auto& e : schedule.entries) {
    const double x = (t - e.t_ps) / params.sigma_ps;
    if (std::abs(x) > params.window_sigmas) continue;
    sum += sinc(x);
  }
  sum = std::max(sum, 0.0);
  return params.shape == EnvelopeShape::intensity_sinc ? params.E0_V_per_cm * std::sqrt(sum)
                                                       : params.E0_V_per_cm * sum;
}

double polarization_angle(double t, const CentrifugeParams& params) {
  const double dt = t - params.t0_ps;
  // beta [GHz/ps] = 1e-3 ps^-2
  return params.handedness * units::kPi * params.beta_GHz_per_ps * 1e-3 * dt * dt;
}

InteractionTerms interaction_terms(double t, const CentrifugeParams& params,
                                   const EnvelopeSchedule& schedule, double isotropic_au) {
  const double e_au = envelope(t, schedule, params) / units::kFieldAuInVPerCm;
  const double pre = -0.25 * e_au * e_au * units::kHartreeInWavenumber;
  const double phi = polarization_angle(t, params);
  InteractionTerms out;
  out.shift = pre * isotropic_au;
  out.c0 = -pre / std::sqrt(6.0);
  out.c2 = 0.5 * pre * std::polar(1.0, -2.0 * phi);
  return out;
}

Eigen::MatrixXcd interaction_hamiltonian(double t, const CentrifugeParams& params,
                                         const EnvelopeSchedule& schedule,
                                         const LabPolarizability& lab) {
  if (lab.a0.rows() != lab.a_plus2.rows() || lab.a0.rows() != lab.a0.cols()) {
    throw std::invalid_argument("interaction_hamiltonian: inconsistent coupling matrices");
  }
  const InteractionTerms c = interaction_terms(t, params, schedule, lab.isotropic);
  const Eigen::MatrixXd a0 = Eigen::MatrixXd(lab.a0);
  const Eigen::MatrixXd a2 = Eigen::MatrixXd(lab.a_plus2);
  const auto n = a0.rows();
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(n, n) * c.shift;
  H += c.c0 * a0.cast<std::complex<double>>();
  H += c.c2 * a2.cast<std::complex<double>>();
  H += std::conj(c.c2) * a2.transpose().cast<std::complex<double>>();
  return H;
}

}  // namespace rotcoh
