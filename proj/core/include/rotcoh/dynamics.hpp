#pragma once

// Rotational wavepacket propagation in the field-free eigenbasis.
// One step: c <- D(dt/2) exp(-i 2 pi c V(t_mid) dt) D(dt/2) c, D = exp(-i 2 pi c E_n dt/2),
// with the interaction exponential applied by a Lanczos iteration.

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rotcoh/centrifuge.hpp"
#include "rotcoh/coupling.hpp"

namespace rotcoh {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Wavepacket {
  std::vector<StateKey> basis;
  Eigen::VectorXd energies;  // cm^-1
  Eigen::VectorXcd amps;
  double t_ps = 0.0;

  Wavepacket() = default;
  Wavepacket(std::vector<StateKey> basis_, Eigen::VectorXd energies_, Eigen::VectorXcd amps_,
             double t = 0.0);

  std::size_t size() const { return basis.size(); }
  double norm() const { return amps.squaredNorm(); }
  std::optional<std::size_t> index(const StateKey& key) const;
  double population(const StateKey& key) const;  // 0 when the key is not in the basis

  // Field-free evolution to time t (exact phases).
  Wavepacket evolved_to(double t) const;
};

struct PropagatorConfig {
  double dt = 0.010;
  int krylov_dim = 12;
  double krylov_tol = 1e-12;
  int j_max = -1;                // basis truncation; < 0 means target J + 4
  double amplitude_floor = 0.0;  // for truncate_basis
  double leak_threshold = 1e-3;
  int record_stride = 10;
  int splitting_order = 2;       // 2: single split step; 4: triple-jump composition of split steps

  void validate() const;
};

// Hermitian generator in cm^-1, applied to vectors. shift() is a multiple of the identity
// that is applied as an exact phase and kept out of the Krylov space.
class HermitianOperator {
 public:
  virtual ~HermitianOperator() = default;
  virtual Eigen::Index size() const = 0;
  virtual void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const = 0;
  virtual double shift() const { return 0.0; }
};

class DenseOperator final : public HermitianOperator {
 public:
  explicit DenseOperator(Eigen::MatrixXcd h) : h_(std::move(h)) {}
  Eigen::Index size() const override { return h_.rows(); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override { y.noalias() = h_ * x; }

 private:
  Eigen::MatrixXcd h_;
};

// Centrifuge interaction over a fixed basis.
class CentrifugeOperator final : public HermitianOperator {
 public:
  explicit CentrifugeOperator(const LabPolarizability& lab);
  void set_terms(const InteractionTerms& terms) { terms_ = terms; }
  Eigen::Index size() const override { return a0_.rows(); }
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override;
  double shift() const override { return terms_.shift; }

 private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> a0_, a2_, a2t_;
  InteractionTerms terms_;
};

// y = exp(-i tau H) x via Lanczos. Returns the a posteriori error estimate.
// Throws NumericError when the estimate exceeds tol after krylov_dim vectors.
double krylov_expmv(const HermitianOperator& h, double tau, const Eigen::VectorXcd& x,
                    Eigen::VectorXcd& y, int krylov_dim, double tol);

// One split-operator step of length dt (negative dt steps backwards) with the interaction
// already evaluated at t + dt/2.
void step(Wavepacket& wp, const HermitianOperator& h_mid, double dt, const PropagatorConfig& cfg);
inline void step(Wavepacket& wp, const HermitianOperator& h_mid, const PropagatorConfig& cfg) {
  step(wp, h_mid, cfg.dt, cfg);
}

struct Centrifuge {
  CentrifugeParams params;
  EnvelopeSchedule schedule;
};

struct TrajectorySample {
  double t_ps = 0.0;
  double norm = 1.0;
  std::vector<double> populations;  // one per tracked key
};

struct Trajectory {
  Wavepacket final_state;
  std::vector<StateKey> tracked;
  std::vector<TrajectorySample> samples;
  std::vector<std::string> warnings;
  double max_norm_drift = 0.0;
  double max_outer_shell_population = 0.0;
  long steps = 0;
  bool leak_warning = false;
};

using Recorder = std::function<void(const Wavepacket&)>;

// Propagates from wp0.t_ps to t_end. Samples every cfg.record_stride steps plus the end point.
Trajectory propagate(const Wavepacket& wp0, const Centrifuge& pulse, const LabPolarizability& lab,
                     double t_end, const PropagatorConfig& cfg,
                     const std::vector<StateKey>& tracked = {}, const Recorder& recorder = {});

struct TruncationReport {
  Wavepacket packet;
  std::size_t dropped_states = 0;
  double dropped_mass = 0.0;
};

// Drops components with |c|^2 below the floor provided the removed mass is < 1e-12.
TruncationReport truncate_basis(const Wavepacket& wp, const PropagatorConfig& cfg);

// Eigenstates (J <= j_max, all even and odd M) connected to `seeds` by the polarizability,
// ordered by (J, M, h). Components outside this set never acquire amplitude.
std::vector<StateKey> reachable_basis(const PolarizabilityCoupling& coupling,
                                      const std::vector<StateKey>& seeds, int j_max);

Wavepacket make_eigenstate_packet(const PolarizabilityCoupling& coupling,
                                  const std::vector<StateKey>& basis, const StateKey& occupied,
                                  double t0 = 0.0);

}  // namespace rotcoh
