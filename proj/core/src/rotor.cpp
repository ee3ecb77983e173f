#include "rotcoh/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "rotcoh/constants.hpp"

namespace rotcoh {

namespace {

double offdiag_factor(int J, int k) {
  // sqrt((J(J+1) - k(k+1)) (J(J+1) - (k+1)(k+2))): <k+2| J_+^2 |k>
  const double jj = J * (J + 1.0);
  const double v = (jj - k * (k + 1.0)) * (jj - (k + 1.0) * (k + 2.0));
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

// Columns: Wang kets of parity tau with K of the given parity, expressed over signed k.
Eigen::MatrixXd wang_transform(int J, int tau, int k_parity) {
  std::vector<int> ks;
  for (int K = 0; K <= J; ++K) {
    if (K % 2 != k_parity) continue;
    if (K == 0 && tau == 1) continue;
    ks.push_back(K);
  }
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * J + 1, static_cast<Eigen::Index>(ks.size()));
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t col = 0; col < ks.size(); ++col) {
    const int K = ks[col];
    const auto c = static_cast<Eigen::Index>(col);
    if (K == 0) {
      U(J, c) = 1.0;
    } else {
      U(J + K, c) = r;
      U(J - K, c) = (tau == 0 ? r : -r);
    }
  }
  return U;
}

std::vector<int> wang_ks(int J, int tau, int k_parity) {
  std::vector<int> ks;
  for (int K = 0; K <= J; ++K) {
    if (K % 2 != k_parity) continue;
    if (K == 0 && tau == 1) continue;
    ks.push_back(K);
  }
  return ks;
}

std::array<double, 3> body_projections(int J, const std::vector<double>& b) {
  const double jj = J * (J + 1.0);
  double diag_perp = 0.0, z2 = 0.0, raise = 0.0;
  for (int k = -J; k <= J; ++k) {
    const double w = b[k + J] * b[k + J];
    z2 += w * k * k;
    diag_perp += 0.5 * w * (jj - k * k);
    if (k + 2 <= J) raise += b[k + J] * b[k + 2 + J] * offdiag_factor(J, k);
  }
  // <Jx^2>, <Jy^2>, <Jz^2>
  return {diag_perp + 0.5 * raise, diag_perp - 0.5 * raise, z2};
}

}  // namespace

char axis_name(Axis axis) {
  switch (axis) {
    case Axis::a: return 'a';
    case Axis::b: return 'b';
    case Axis::c: return 'c';
  }
  return '?';
}

Axis parse_axis(char name) {
  switch (name) {
    case 'a': case 'A': return Axis::a;
    case 'b': case 'B': return Axis::b;
    case 'c': case 'C': return Axis::c;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown molecular axis '") + name + "'");
}

double Polarizability::along(Axis axis) const {
  switch (axis) {
    case Axis::a: return aa;
    case Axis::b: return bb;
    case Axis::c: return cc;
  }
  return 0.0;
}

double MoleculeSpec::constant(Axis axis) const {
  switch (axis) {
    case Axis::a: return A_GHz;
    case Axis::b: return B_GHz;
    case Axis::c: return C_GHz;
  }
  return 0.0;
}

double MoleculeSpec::constant_cm1(Axis axis) const {
  return units::ghz_to_wavenumber(constant(axis));
}

void MoleculeSpec::validate() const {
  if (!(C_GHz > 0.0)) throw std::invalid_argument("molecule '" + name + "': C must be positive");
  if (A_GHz < B_GHz || B_GHz < C_GHz) {
    throw std::invalid_argument("molecule '" + name + "': rotational constants must satisfy A >= B >= C");
  }
  if (geometry.empty()) return;
  const bool have_masses =
      std::all_of(geometry.begin(), geometry.end(), [](const Atom& a) { return a.mass_amu > 0.0; });
  if (!have_masses) return;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  double total = 0.0;
  for (const auto& atom : geometry) {
    com += atom.mass_amu * atom.position_A;
    total += atom.mass_amu;
  }
  com /= total;
  if (com.norm() > 1e-9) {
    throw std::invalid_argument("molecule '" + name + "': centre of mass is not at the origin (" +
                                std::to_string(com.norm()) + " A)");
  }
}

Embedding Embedding::with_z(Axis z) {
  switch (z) {
    case Axis::a: return Embedding{{Axis::b, Axis::c, Axis::a}};
    case Axis::b: return Embedding{{Axis::c, Axis::a, Axis::b}};
    case Axis::c: return Embedding{{Axis::a, Axis::b, Axis::c}};
  }
  throw std::invalid_argument("invalid embedding axis");
}

int Embedding::body_index(Axis axis) const {
  for (int i = 0; i < 3; ++i) {
    if (body[i] == axis) return i;
  }
  throw std::invalid_argument("embedding does not contain the requested axis");
}

WangKet::WangKet(int J_, int K_, int M_, int tau_) : J(J_), K(K_), M(M_), tau(tau_) {
  if (J < 0 || K < 0 || K > J || std::abs(M) > J || (tau != 0 && tau != 1)) {
    throw std::invalid_argument("WangKet: index out of range");
  }
  if (K == 0 && tau != 0) throw std::invalid_argument("WangKet: K = 0 exists only for tau = 0");
}

std::vector<double> RotorState::signed_coeffs() const {
  std::vector<double> b(2 * J + 1, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  b[J] = coeffs.empty() ? 0.0 : coeffs[0];
  for (int K = 1; K <= J; ++K) {
    b[J + K] = r * coeffs[K];
    b[J - K] = (tau == 0 ? r : -r) * coeffs[K];
  }
  return b;
}

bool ground_species(const RotorState& state) {
  return state.k_parity == 0 && state.tau == state.J % 2;
}

Eigen::MatrixXd build_symmetric_top_hamiltonian(int J, const MoleculeSpec& spec,
                                                const Embedding& embedding) {
  if (J < 0) throw std::invalid_argument("build_symmetric_top_hamiltonian: J must be >= 0");
  const double X = spec.constant_cm1(embedding.body[0]);
  const double Y = spec.constant_cm1(embedding.body[1]);
  const double Z = spec.constant_cm1(embedding.body[2]);
  const double jj = J * (J + 1.0);
  const int n = 2 * J + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int k = -J; k <= J; ++k) {
    H(k + J, k + J) = 0.5 * (X + Y) * (jj - k * k) + Z * k * k;
    if (k + 2 <= J) {
      const double v = 0.25 * (X - Y) * offdiag_factor(J, k);
      H(k + J, k + 2 + J) = v;
      H(k + 2 + J, k + J) = v;
    }
  }
  return H;
}

Eigen::MatrixXd build_hamiltonian_block(int J, int tau, const MoleculeSpec& spec,
                                        const Embedding& embedding) {
  if (tau != 0 && tau != 1) throw std::invalid_argument("build_hamiltonian_block: tau must be 0 or 1");
  const Eigen::MatrixXd H = build_symmetric_top_hamiltonian(J, spec, embedding);
  // Wang kets ordered by K = 0..J regardless of K parity.
  std::vector<int> ks;
  for (int K = (tau == 0 ? 0 : 1); K <= J; ++K) ks.push_back(K);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(2 * J + 1, static_cast<Eigen::Index>(ks.size()));
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t col = 0; col < ks.size(); ++col) {
    const int K = ks[col];
    const auto c = static_cast<Eigen::Index>(col);
    if (K == 0) {
      U(J, c) = 1.0;
    } else {
      U(J + K, c) = r;
      U(J - K, c) = (tau == 0 ? r : -r);
    }
  }
  return U.transpose() * H * U;
}

std::vector<RotorState> diagonalize_multiplet(int J, const MoleculeSpec& spec,
                                              const Embedding& embedding) {
  if (J < 0) throw std::invalid_argument("diagonalize_multiplet: J must be >= 0");
  const Eigen::MatrixXd H = build_symmetric_top_hamiltonian(J, spec, embedding);
  const int iz = 2, ix = 0, iy = 1;

  std::vector<RotorState> states;
  states.reserve(2 * J + 1);
  for (int tau = 0; tau <= 1; ++tau) {
    for (int kp = 0; kp <= 1; ++kp) {
      const std::vector<int> ks = wang_ks(J, tau, kp);
      if (ks.empty()) continue;
      const Eigen::MatrixXd U = wang_transform(J, tau, kp);
      const Eigen::MatrixXd block = U.transpose() * H * U;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
      if (solver.info() != Eigen::Success) {
        throw std::runtime_error("diagonalize_multiplet: eigensolver failed for J=" +
                                 std::to_string(J) + ", tau=" + std::to_string(tau) +
                                 ", K parity=" + std::to_string(kp));
      }
      for (Eigen::Index col = 0; col < solver.eigenvalues().size(); ++col) {
        RotorState st;
        st.J = J;
        st.tau = tau;
        st.k_parity = kp;
        st.energy_cm1 = solver.eigenvalues()(col);
        st.embedding = embedding;
        st.coeffs.assign(J + 1, 0.0);
        Eigen::VectorXd v = solver.eigenvectors().col(col);
        // Fix the overall sign: largest component positive.
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        for (std::size_t i = 0; i < ks.size(); ++i) st.coeffs[ks[i]] = v(static_cast<Eigen::Index>(i));
        const std::array<double, 3> body = body_projections(J, st.signed_coeffs());
        st.proj[static_cast<int>(embedding.body[ix])] = body[ix];
        st.proj[static_cast<int>(embedding.body[iy])] = body[iy];
        st.proj[static_cast<int>(embedding.body[iz])] = body[iz];
        states.push_back(std::move(st));
      }
    }
  }
  std::stable_sort(states.begin(), states.end(), [](const RotorState& l, const RotorState& r) {
    return l.energy_cm1 < r.energy_cm1;
  });
  for (std::size_t i = 0; i < states.size(); ++i) states[i].h = static_cast<int>(i) + 1;
  return states;
}

std::vector<RotorState> diagonalize_multiplet(int J, const MoleculeSpec& spec) {
  return diagonalize_multiplet(J, spec, Embedding::with_z(Axis::a));
}

char label_name(StateLabel label) {
  switch (label) {
    case StateLabel::a: return 'a';
    case StateLabel::b: return 'b';
    case StateLabel::c: return 'c';
    case StateLabel::mixed: return 'm';
  }
  return '?';
}

Classification classify_state(const RotorState& state, double threshold) {
  Classification out;
  if (state.J == 0) return out;
  const double norm = state.J * (state.J + 1.0);
  for (int i = 0; i < 3; ++i) out.barycentric[i] = state.proj[i] / norm;
  for (int i = 0; i < 3; ++i) {
    if (out.barycentric[i] > threshold) out.label = static_cast<StateLabel>(i);
  }
  return out;
}

PrincipalState find_principal_state(int J, Axis axis, const MoleculeSpec& spec,
                                    SymmetryFilter filter, double threshold) {
  if (axis == Axis::b && J < 2) {
    throw std::invalid_argument("find_principal_state: b-principal states need J >= 2");
  }
  if (J < 0) throw std::invalid_argument("find_principal_state: J must be >= 0");
  const std::vector<RotorState> states = diagonalize_multiplet(J, spec, Embedding::with_z(axis));
  const RotorState* best = nullptr;
  for (const auto& st : states) {
    if (filter == SymmetryFilter::ground_species && !ground_species(st)) continue;
    // Ties (degenerate partners) resolve to the lower h.
    if (best == nullptr || st.projection(axis) > best->projection(axis) + 1e-12) best = &st;
  }
  if (best == nullptr) {
    throw std::invalid_argument("find_principal_state: no state of the requested symmetry at J=" +
                                std::to_string(J));
  }
  PrincipalState out{*best, false};
  out.weak = J > 0 && best->projection(axis) / (J * (J + 1.0)) <= threshold;
  return out;
}

RotorLevels::RotorLevels(const MoleculeSpec& spec, int j_max, Embedding embedding)
    : spec_(spec), embedding_(embedding) {
  if (j_max < 0) throw std::invalid_argument("RotorLevels: j_max must be >= 0");
  multiplets_.reserve(static_cast<std::size_t>(j_max) + 1);
  for (int J = 0; J <= j_max; ++J) multiplets_.push_back(diagonalize_multiplet(J, spec_, embedding_));
}

const std::vector<RotorState>& RotorLevels::multiplet(int J) const {
  if (J < 0 || J > j_max()) throw std::out_of_range("RotorLevels: J=" + std::to_string(J) + " not built");
  return multiplets_[static_cast<std::size_t>(J)];
}

const RotorState& RotorLevels::state(int J, int h) const {
  const auto& m = multiplet(J);
  if (h < 1 || h > static_cast<int>(m.size())) {
    throw std::out_of_range("RotorLevels: h=" + std::to_string(h) + " out of range at J=" + std::to_string(J));
  }
  return m[static_cast<std::size_t>(h - 1)];
}

}  // namespace rotcoh
