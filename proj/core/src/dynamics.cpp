#include "rotcoh/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "rotcoh/constants.hpp"

namespace rotcoh {

using cd = std::complex<double>;

Wavepacket::Wavepacket(std::vector<StateKey> basis_, Eigen::VectorXd energies_,
                       Eigen::VectorXcd amps_, double t)
    : basis(std::move(basis_)), energies(std::move(energies_)), amps(std::move(amps_)), t_ps(t) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (energies.size() != n || amps.size() != n) {
    throw std::invalid_argument("Wavepacket: basis, energies and amplitudes differ in length");
  }
}

std::optional<std::size_t> Wavepacket::index(const StateKey& key) const {
  const auto it = std::find(basis.begin(), basis.end(), key);
  if (it == basis.end()) return std::nullopt;
  return static_cast<std::size_t>(it - basis.begin());
}

double Wavepacket::population(const StateKey& key) const {
  const auto i = index(key);
  return i ? std::norm(amps(static_cast<Eigen::Index>(*i))) : 0.0;
}

Wavepacket Wavepacket::evolved_to(double t) const {
  Wavepacket out = *this;
  const double w = 2.0 * units::kPi * units::kLightCmPerPs * (t - t_ps);
  for (Eigen::Index i = 0; i < amps.size(); ++i) out.amps(i) *= std::polar(1.0, -w * energies(i));
  out.t_ps = t;
  return out;
}

void PropagatorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("propagator: dt must be positive");
  if (krylov_dim < 2) throw std::invalid_argument("propagator: krylov_dim must be >= 2");
  if (!(krylov_tol > 0.0)) throw std::invalid_argument("propagator: krylov_tol must be positive");
  if (amplitude_floor < 0.0) throw std::invalid_argument("propagator: amplitude_floor must be >= 0");
  if (record_stride < 1) throw std::invalid_argument("propagator: record_stride must be >= 1");
  if (splitting_order != 2 && splitting_order != 4) {
    throw std::invalid_argument("propagator: splitting_order must be 2 or 4");
  }
}

CentrifugeOperator::CentrifugeOperator(const LabPolarizability& lab)
    : a0_(lab.a0), a2_(lab.a_plus2), a2t_(lab.a_plus2.transpose()) {
  if (a0_.rows() != a2_.rows()) throw std::invalid_argument("CentrifugeOperator: size mismatch");
}

void CentrifugeOperator::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  y.noalias() = terms_.c0 * (a0_ * x);
  y.noalias() += terms_.c2 * (a2_ * x);
  y.noalias() += std::conj(terms_.c2) * (a2t_ * x);
}

double krylov_expmv(const HermitianOperator& h, double tau, const Eigen::VectorXcd& x,
                    Eigen::VectorXcd& y, int krylov_dim, double tol) {
  const Eigen::Index n = x.size();
  if (h.size() != n) throw std::invalid_argument("krylov_expmv: operator and vector sizes differ");
  const double beta0 = x.norm();
  y.resize(n);
  if (beta0 == 0.0) {
    y.setZero();
    return 0.0;
  }
  const int m_max = static_cast<int>(std::min<Eigen::Index>(krylov_dim, n));
  Eigen::MatrixXcd Q(n, m_max);
  std::vector<double> alpha, beta;
  Q.col(0) = x / beta0;
  Eigen::VectorXcd w(n);
  Eigen::VectorXcd u;
  double err = 0.0;
  int m = 0;
  for (int j = 0; j < m_max; ++j) {
    h.apply(Q.col(j), w);
    alpha.push_back(Q.col(j).dot(w).real());
    // Full reorthogonalization (twice is enough).
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) w -= Q.col(i).dot(w) * Q.col(i);
    }
    const double b = w.norm();
    m = j + 1;

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const Eigen::MatrixXd& S = es.eigenvectors();
    Eigen::VectorXcd ph(m);
    for (int i = 0; i < m; ++i) ph(i) = std::polar(1.0, -tau * es.eigenvalues()(i)) * S(0, i);
    u = S.cast<cd>() * ph;

    const double scale = std::max(1.0, std::abs(tau) * T.cwiseAbs().maxCoeff());
    if (b <= 1e-14 * scale) {  // invariant subspace: exact
      err = 0.0;
      break;
    }
    err = std::abs(tau) * b * std::abs(u(m - 1)) * beta0;
    if (err < tol || j + 1 == m_max) {
      if (j + 1 == m_max && err >= tol && m_max < n) {
        std::ostringstream os;
        os << "Krylov exponential did not converge: error estimate " << err << " > " << tol
           << " with dimension " << krylov_dim << "; increase the Krylov dimension or reduce dt";
        throw NumericError(os.str());
      }
      break;
    }
    beta.push_back(b);
    Q.col(j + 1) = w / b;
  }
  y.noalias() = beta0 * (Q.leftCols(m) * u);
  return err;
}

void step(Wavepacket& wp, const HermitianOperator& h_mid, double dt, const PropagatorConfig& cfg) {
  if (dt == 0.0) return;
  const auto n = static_cast<Eigen::Index>(wp.size());
  if (h_mid.size() != n) throw std::invalid_argument("step: interaction size does not match the basis");
  const double w = 2.0 * units::kPi * units::kLightCmPerPs;
  const double half = 0.5 * w * dt;
  for (Eigen::Index i = 0; i < n; ++i) wp.amps(i) *= std::polar(1.0, -half * wp.energies(i));
  Eigen::VectorXcd y;
  krylov_expmv(h_mid, w * dt, wp.amps, y, cfg.krylov_dim, cfg.krylov_tol);
  y *= std::polar(1.0, -w * dt * h_mid.shift());
  for (Eigen::Index i = 0; i < n; ++i) y(i) *= std::polar(1.0, -half * wp.energies(i));
  wp.amps = std::move(y);
  wp.t_ps += dt;
}

Trajectory propagate(const Wavepacket& wp0, const Centrifuge& pulse, const LabPolarizability& lab,
                     double t_end, const PropagatorConfig& cfg,
                     const std::vector<StateKey>& tracked, const Recorder& recorder) {
  cfg.validate();
  pulse.params.validate();
  if (static_cast<Eigen::Index>(wp0.size()) != lab.a0.rows()) {
    throw std::invalid_argument("propagate: coupling matrices do not match the wavepacket basis");
  }
  Trajectory traj;
  traj.tracked = tracked;
  Wavepacket wp = wp0;
  const double norm0 = wp.norm();
  int j_outer = 0;
  for (const auto& k : wp.basis) j_outer = std::max(j_outer, k.J);
  std::vector<Eigen::Index> outer;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    if (wp.basis[i].J == j_outer) outer.push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<std::optional<std::size_t>> tracked_index;
  for (const auto& k : tracked) tracked_index.push_back(wp.index(k));

  auto sample = [&]() {
    TrajectorySample s;
    s.t_ps = wp.t_ps;
    s.norm = wp.norm();
    for (const auto& i : tracked_index) {
      s.populations.push_back(i ? std::norm(wp.amps(static_cast<Eigen::Index>(*i))) : 0.0);
    }
    traj.samples.push_back(std::move(s));
    if (recorder) recorder(wp);
  };

  const double span = t_end - wp.t_ps;
  const long n_steps = span > 0.0 ? std::max(1L, std::lround(span / cfg.dt)) : 0L;
  const double dt = n_steps > 0 ? span / static_cast<double>(n_steps) : cfg.dt;
  CentrifugeOperator op(lab);
  std::vector<double> fractions{1.0};
  if (cfg.splitting_order == 4) {
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    fractions = {w1, 1.0 - 2.0 * w1, w1};
  }
  sample();
  for (long s = 0; s < n_steps; ++s) {
    double t = wp0.t_ps + static_cast<double>(s) * dt;
    for (double f : fractions) {
      const double h = f * dt;
      op.set_terms(interaction_terms(t + 0.5 * h, pulse.params, pulse.schedule, lab.isotropic));
      step(wp, op, h, cfg);
      t += h;
    }
    wp.t_ps = wp0.t_ps + static_cast<double>(s + 1) * dt;
    traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(wp.norm() - norm0));
    double p_outer = 0.0;
    for (Eigen::Index i : outer) p_outer += std::norm(wp.amps(i));
    traj.max_outer_shell_population = std::max(traj.max_outer_shell_population, p_outer);
    if ((s + 1) % cfg.record_stride == 0 || s + 1 == n_steps) sample();
  }
  traj.steps = n_steps;
  if (traj.max_outer_shell_population > cfg.leak_threshold) {
    traj.leak_warning = true;
    std::ostringstream os;
    os << "population in the outermost shell J=" << j_outer << " reached "
       << traj.max_outer_shell_population << " (threshold " << cfg.leak_threshold
       << "); enlarge j_max";
    traj.warnings.push_back(os.str());
  }
  traj.final_state = std::move(wp);
  return traj;
}

TruncationReport truncate_basis(const Wavepacket& wp, const PropagatorConfig& cfg) {
  TruncationReport rep;
  if (cfg.amplitude_floor <= 0.0) {
    rep.packet = wp;
    return rep;
  }
  std::vector<std::size_t> order(wp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::abs(wp.amps(static_cast<Eigen::Index>(l))) < std::abs(wp.amps(static_cast<Eigen::Index>(r)));
  });
  std::vector<char> drop(wp.size(), 0);
  double mass = 0.0;
  for (std::size_t i : order) {
    const double a = std::abs(wp.amps(static_cast<Eigen::Index>(i)));
    if (a >= cfg.amplitude_floor || mass + a * a >= 1e-12) break;
    mass += a * a;
    drop[i] = 1;
    ++rep.dropped_states;
  }
  std::vector<StateKey> basis;
  std::vector<double> e;
  std::vector<cd> c;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    if (drop[i]) continue;
    basis.push_back(wp.basis[i]);
    e.push_back(wp.energies(static_cast<Eigen::Index>(i)));
    c.push_back(wp.amps(static_cast<Eigen::Index>(i)));
  }
  rep.packet = Wavepacket(std::move(basis), Eigen::Map<Eigen::VectorXd>(e.data(), static_cast<Eigen::Index>(e.size())),
                          Eigen::Map<Eigen::VectorXcd>(c.data(), static_cast<Eigen::Index>(c.size())), wp.t_ps);
  rep.dropped_mass = mass;
  return rep;
}

std::vector<StateKey> reachable_basis(const PolarizabilityCoupling& coupling,
                                      const std::vector<StateKey>& seeds, int j_max) {
  if (j_max > coupling.j_max()) throw std::invalid_argument("reachable_basis: j_max exceeds the coupling table");
  std::set<StateKey> seen;
  std::deque<StateKey> queue;
  for (const auto& s : seeds) {
    s.validate();
    if (s.J > j_max) throw std::invalid_argument("reachable_basis: seed " + s.label() + " beyond j_max");
    if (seen.insert(s).second) queue.push_back(s);
  }
  while (!queue.empty()) {
    const StateKey u = queue.front();
    queue.pop_front();
    for (int Jp = std::max(0, u.J - 2); Jp <= std::min(j_max, u.J + 2); ++Jp) {
      const Eigen::MatrixXd& G = coupling.reduced(Jp, u.J);
      for (int p = -2; p <= 2; p += 2) {
        const int Mp = u.M + p;
        if (std::abs(Mp) > Jp) continue;
        const double f = PolarizabilityCoupling::m_factor(Jp, u.J, u.M, p);
        if (f == 0.0) continue;
        for (const auto& st : coupling.levels().multiplet(Jp)) {
          if (std::abs(f * G(st.h - 1, u.h - 1)) < 1e-14) continue;
          const StateKey v{Jp, st.h, st.tau, Mp};
          if (seen.insert(v).second) queue.push_back(v);
        }
      }
    }
  }
  std::vector<StateKey> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [](const StateKey& l, const StateKey& r) {
    return std::tie(l.J, l.M, l.h) < std::tie(r.J, r.M, r.h);
  });
  return out;
}

Wavepacket make_eigenstate_packet(const PolarizabilityCoupling& coupling,
                                  const std::vector<StateKey>& basis, const StateKey& occupied,
                                  double t0) {
  Eigen::VectorXd e(static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  bool found = false;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    e(static_cast<Eigen::Index>(i)) = coupling.energy(basis[i]);
    if (basis[i] == occupied) {
      c(static_cast<Eigen::Index>(i)) = 1.0;
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("make_eigenstate_packet: " + occupied.label() + " not in basis");
  return Wavepacket(basis, std::move(e), std::move(c), t0);
}

}  // namespace rotcoh
