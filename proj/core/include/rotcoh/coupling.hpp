#pragma once

// Lab-frame polarizability matrix elements between rotor eigenstates, the
// field-coupled transition graph and excitation-route search.
//
// Lab spherical components of the traceless polarizability tensor:
//   A_0   = (2 a_ZZ - a_XX - a_YY) / sqrt(6)
//   A_+-1 = -+(a_XZ +- i a_YZ)
//   A_+-2 = (a_XX - a_YY +- 2i a_XY) / 2
// A_p raises M by p. They are related to body components through
//   A_p(lab) = sum_q conj(D^2_{pq}(Omega)) A_q(body),
// with A_0(body) = (2 a_zz - a_xx - a_yy)/sqrt(6), A_+-2(body) = (a_xx - a_yy)/2 for the
// principal polarizability tensor placed on the body axes by the embedding.

#include <complex>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rotcoh/rotor.hpp"

namespace rotcoh {

struct StateKey {
  int J = 0;
  int h = 1;
  int tau = 0;
  int M = 0;

  auto operator<=>(const StateKey&) const = default;
  void validate() const;  // |M| <= J, 1 <= h <= 2J+1
  std::string label() const;  // "|J,M,h,tau>"
};

struct TransitionEdge {
  StateKey from;
  StateKey to;
  double moment = 0.0;  // |<to| A_{deltaM} |from>|, atomic units of polarizability
  int delta_m = 2;
};

struct PathSpec {
  std::vector<StateKey> states;
  std::vector<double> energies_cm1;   // one per state
  std::vector<double> omegas_cm1;     // one per hop: E[k+1] - E[k]
  std::vector<double> moments_au;     // one per hop

  std::size_t hops() const { return omegas_cm1.size(); }
  bool empty() const { return hops() == 0; }
};

// Matrix elements of the anisotropic polarizability between eigenstates up to j_max.
class PolarizabilityCoupling {
 public:
  PolarizabilityCoupling(const MoleculeSpec& spec, int j_max);

  const RotorLevels& levels() const { return levels_; }
  const MoleculeSpec& molecule() const { return levels_.molecule(); }
  int j_max() const { return levels_.j_max(); }

  StateKey key(int J, int h, int M) const;  // fills tau from the rotor state
  double energy(const StateKey& key) const;

  // <bra| A_p |ket>, p in -2..2. Zero when |J'-J| > 2 or M' != M + p.
  std::complex<double> element(const StateKey& bra, const StateKey& ket, int p) const;

  // Reduced matrix G[h'][h] between multiplets J' and J; element = phase(M, p) * G.
  const Eigen::MatrixXd& reduced(int Jp, int J) const;
  static double m_factor(int Jp, int J, int M, int p);

 private:
  void check_key(const StateKey& key) const;

  RotorLevels levels_;
  std::map<std::pair<int, int>, Eigen::MatrixXd> reduced_;
};

std::complex<double> polarizability_element(const StateKey& bra, const StateKey& ket,
                                            const MoleculeSpec& spec, int p);

// Lab operators A_0 and A_+2 (a.u.) over an ordered basis; A_-2 is the transpose of A_+2.
struct LabPolarizability {
  Eigen::SparseMatrix<double> a0;
  Eigen::SparseMatrix<double> a_plus2;
  double isotropic = 0.0;
};

LabPolarizability build_lab_polarizability(const PolarizabilityCoupling& coupling,
                                           const std::vector<StateKey>& basis);

inline constexpr double kDefaultMomentFloor = 1e-8;

class TransitionGraph {
 public:
  const std::vector<StateKey>& nodes() const { return nodes_; }
  const std::vector<TransitionEdge>& out_edges(const StateKey& key) const;
  std::optional<std::size_t> index(const StateKey& key) const;
  double energy(const StateKey& key) const;
  std::size_t edge_count() const;

 private:
  friend TransitionGraph build_transition_graph(const PolarizabilityCoupling&, int, int, double);
  std::vector<StateKey> nodes_;
  std::vector<double> energies_;
  std::map<StateKey, std::size_t> index_;
  std::vector<std::vector<TransitionEdge>> edges_;
};

// Nodes: every (J, h, tau, M) with J <= j_max and M = 0, 2, 4, ... <= J.
// Edges: J -> J+2, M -> M+delta_m with moment above the floor.
TransitionGraph build_transition_graph(const PolarizabilityCoupling& coupling, int j_max,
                                       int delta_m = 2, double floor = kDefaultMomentFloor);

struct PathResult {
  std::optional<PathSpec> path;
  int first_unreachable_J = -1;
  std::string message;

  bool found() const { return path.has_value(); }
};

// Maximum product of transition moments (minimum sum of -log moment).
PathResult shortest_path(const TransitionGraph& graph, const StateKey& source,
                         const StateKey& target);

// Route target for (J, axis) at M = J: the axis-principal state among the species reachable
// from the ground state. When that state is not dominated by `axis` the overall principal
// state is used instead, which the search then reports as dark.
StateKey route_target(const PolarizabilityCoupling& coupling, int J, Axis axis);

// Search from |0,0,1,+> to route_target(J, axis) with Delta M = +2 hops. J must be even.
PathResult find_route(const PolarizabilityCoupling& coupling, int J, Axis axis);

}  // namespace rotcoh
