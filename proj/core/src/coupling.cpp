#include "rotcoh/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rotcoh/wigner.hpp"

namespace rotcoh {

void StateKey::validate() const {
  if (J < 0 || std::abs(M) > J || h < 1 || h > 2 * J + 1 || (tau != 0 && tau != 1)) {
    throw std::invalid_argument("StateKey: invalid " + label());
  }
}

std::string StateKey::label() const {
  std::ostringstream os;
  os << '|' << J << ',' << M << ',' << h << ',' << (tau == 0 ? '+' : '-') << '>';
  return os.str();
}

namespace {

// Body spherical components of the anisotropic polarizability, q = -2, 0, 2.
std::array<double, 3> body_components(const MoleculeSpec& spec, const Embedding& emb) {
  const double xx = spec.alpha_au.along(emb.body[0]);
  const double yy = spec.alpha_au.along(emb.body[1]);
  const double zz = spec.alpha_au.along(emb.body[2]);
  const double a2 = 0.5 * (xx - yy);
  return {a2, (2.0 * zz - xx - yy) / std::sqrt(6.0), a2};
}

Eigen::MatrixXd signed_matrix(const std::vector<RotorState>& states, int J) {
  Eigen::MatrixXd V(2 * J + 1, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::vector<double> b = states[i].signed_coeffs();
    for (int k = 0; k < 2 * J + 1; ++k) V(k, static_cast<Eigen::Index>(i)) = b[static_cast<std::size_t>(k)];
  }
  return V;
}

}  // namespace

PolarizabilityCoupling::PolarizabilityCoupling(const MoleculeSpec& spec, int j_max)
    : levels_(spec, j_max, Embedding::with_z(Axis::b)) {
  const std::array<double, 3> Aq = body_components(spec, levels_.embedding());
  std::vector<Eigen::MatrixXd> V;
  for (int J = 0; J <= j_max; ++J) V.push_back(signed_matrix(levels_.multiplet(J), J));

  for (int J = 0; J <= j_max; ++J) {
    for (int Jp = std::max(0, J - 2); Jp <= std::min(j_max, J + 2); ++Jp) {
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * Jp + 1, 2 * J + 1);
      const double norm = std::sqrt((2.0 * J + 1.0) * (2.0 * Jp + 1.0));
      for (int k = -J; k <= J; ++k) {
        for (int q = -2; q <= 2; q += 2) {
          const int kp = k + q;
          if (std::abs(kp) > Jp) continue;
          const double a = Aq[static_cast<std::size_t>((q + 2) / 2)];
          if (a == 0.0) continue;
          const double sign = ((q + k) % 2 == 0) ? 1.0 : -1.0;
          K(kp + Jp, k + J) = norm * a * sign * wigner::three_j(Jp, 2, J, kp, -q, -k);
        }
      }
      reduced_[{Jp, J}] = V[static_cast<std::size_t>(Jp)].transpose() * K * V[static_cast<std::size_t>(J)];
    }
  }
}

void PolarizabilityCoupling::check_key(const StateKey& key) const {
  key.validate();
  if (key.J > j_max()) {
    throw std::out_of_range("PolarizabilityCoupling: " + key.label() + " beyond j_max=" +
                            std::to_string(j_max()));
  }
  const RotorState& st = levels_.state(key.J, key.h);
  if (st.tau != key.tau) {
    throw std::invalid_argument("PolarizabilityCoupling: parity mismatch for " + key.label());
  }
}

StateKey PolarizabilityCoupling::key(int J, int h, int M) const {
  StateKey k{J, h, levels_.state(J, h).tau, M};
  k.validate();
  return k;
}

double PolarizabilityCoupling::energy(const StateKey& key) const {
  return levels_.state(key.J, key.h).energy_cm1;
}

const Eigen::MatrixXd& PolarizabilityCoupling::reduced(int Jp, int J) const {
  const auto it = reduced_.find({Jp, J});
  if (it == reduced_.end()) {
    throw std::out_of_range("PolarizabilityCoupling: no reduced block for J'=" + std::to_string(Jp) +
                            ", J=" + std::to_string(J));
  }
  return it->second;
}

double PolarizabilityCoupling::m_factor(int Jp, int J, int M, int p) {
  const double sign = ((p + M) % 2 == 0) ? 1.0 : -1.0;
  return sign * wigner::three_j(Jp, 2, J, M + p, -p, -M);
}

std::complex<double> PolarizabilityCoupling::element(const StateKey& bra, const StateKey& ket,
                                                     int p) const {
  if (p < -2 || p > 2) throw std::invalid_argument("PolarizabilityCoupling: p must be in -2..2");
  check_key(bra);
  check_key(ket);
  if (std::abs(bra.J - ket.J) > 2 || bra.M != ket.M + p) return {0.0, 0.0};
  const double f = m_factor(bra.J, ket.J, ket.M, p);
  if (f == 0.0) return {0.0, 0.0};
  return {f * reduced(bra.J, ket.J)(bra.h - 1, ket.h - 1), 0.0};
}

std::complex<double> polarizability_element(const StateKey& bra, const StateKey& ket,
                                            const MoleculeSpec& spec, int p) {
  const PolarizabilityCoupling coupling(spec, std::max(bra.J, ket.J));
  return coupling.element(bra, ket, p);
}

LabPolarizability build_lab_polarizability(const PolarizabilityCoupling& coupling,
                                           const std::vector<StateKey>& basis) {
  std::map<std::pair<int, int>, std::vector<Eigen::Index>> groups;  // (J, M) -> basis rows
  for (std::size_t i = 0; i < basis.size(); ++i) {
    basis[i].validate();
    if (basis[i].J > coupling.j_max()) {
      throw std::out_of_range("build_lab_polarizability: basis exceeds coupling j_max");
    }
    groups[{basis[i].J, basis[i].M}].push_back(static_cast<Eigen::Index>(i));
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<double>> t0, t2;
  for (const auto& [jm, cols] : groups) {
    const auto [J, M] = jm;
    for (int p : {0, 2}) {
      for (int Jp = J - 2; Jp <= J + 2; ++Jp) {
        const auto it = groups.find({Jp, M + p});
        if (it == groups.end()) continue;
        const double f = PolarizabilityCoupling::m_factor(Jp, J, M, p);
        if (f == 0.0) continue;
        const Eigen::MatrixXd& G = coupling.reduced(Jp, J);
        for (Eigen::Index r : it->second) {
          for (Eigen::Index c : cols) {
            const double v = f * G(basis[static_cast<std::size_t>(r)].h - 1,
                                   basis[static_cast<std::size_t>(c)].h - 1);
            if (std::abs(v) < 1e-14) continue;
            (p == 0 ? t0 : t2).emplace_back(r, c, v);
          }
        }
      }
    }
  }
  LabPolarizability out;
  out.a0.resize(n, n);
  out.a0.setFromTriplets(t0.begin(), t0.end());
  out.a_plus2.resize(n, n);
  out.a_plus2.setFromTriplets(t2.begin(), t2.end());
  out.isotropic = coupling.molecule().alpha_au.isotropic();
  return out;
}

const std::vector<TransitionEdge>& TransitionGraph::out_edges(const StateKey& key) const {
  const auto i = index(key);
  if (!i) throw std::out_of_range("TransitionGraph: unknown node " + key.label());
  return edges_[*i];
}

std::optional<std::size_t> TransitionGraph::index(const StateKey& key) const {
  const auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double TransitionGraph::energy(const StateKey& key) const {
  const auto i = index(key);
  if (!i) throw std::out_of_range("TransitionGraph: unknown node " + key.label());
  return energies_[*i];
}

std::size_t TransitionGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.size();
  return n;
}

TransitionGraph build_transition_graph(const PolarizabilityCoupling& coupling, int j_max,
                                       int delta_m, double floor) {
  if (j_max > coupling.j_max()) {
    throw std::invalid_argument("build_transition_graph: j_max exceeds the coupling table");
  }
  if (delta_m != 2 && delta_m != -2 && delta_m != 0) {
    throw std::invalid_argument("build_transition_graph: delta_m must be +2, -2 or 0");
  }
  TransitionGraph g;
  const int m_step = delta_m == 0 ? 2 : delta_m;
  for (int J = 0; J <= j_max; ++J) {
    for (int M = 0; std::abs(M) <= J; M += m_step) {
      for (const auto& st : coupling.levels().multiplet(J)) {
        g.index_[StateKey{J, st.h, st.tau, M}] = g.nodes_.size();
        g.nodes_.push_back(StateKey{J, st.h, st.tau, M});
        g.energies_.push_back(st.energy_cm1);
      }
    }
  }
  g.edges_.resize(g.nodes_.size());
  for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
    const StateKey& from = g.nodes_[i];
    const int Jp = from.J + 2;
    const int Mp = from.M + delta_m;
    if (Jp > j_max || std::abs(Mp) > Jp) continue;
    const double f = PolarizabilityCoupling::m_factor(Jp, from.J, from.M, delta_m);
    if (f == 0.0) continue;
    const Eigen::MatrixXd& G = coupling.reduced(Jp, from.J);
    for (const auto& st : coupling.levels().multiplet(Jp)) {
      const double m = std::abs(f * G(st.h - 1, from.h - 1));
      if (!(m > floor)) continue;
      g.edges_[i].push_back(TransitionEdge{from, StateKey{Jp, st.h, st.tau, Mp}, m, delta_m});
    }
  }
  return g;
}

namespace {

std::vector<char> reach(const TransitionGraph& g, std::size_t start, bool forward) {
  const auto& nodes = g.nodes();
  std::vector<std::vector<std::size_t>> adj(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& e : g.out_edges(nodes[i])) {
      const std::size_t j = *g.index(e.to);
      if (forward) adj[i].push_back(j); else adj[j].push_back(i);
    }
  }
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::size_t> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) { seen[v] = 1; stack.push_back(v); }
    }
  }
  return seen;
}

}  // namespace

PathResult shortest_path(const TransitionGraph& graph, const StateKey& source,
                         const StateKey& target) {
  const auto si = graph.index(source);
  const auto ti = graph.index(target);
  if (!si) throw std::invalid_argument("shortest_path: source " + source.label() + " not in graph");
  if (!ti) throw std::invalid_argument("shortest_path: target " + target.label() + " not in graph");

  PathResult result;
  if (*si == *ti) {
    result.path = PathSpec{{source}, {graph.energy(source)}, {}, {}};
    result.message = "source equals target";
    return result;
  }

  const auto& nodes = graph.nodes();
  double m_max = 0.0;
  for (const auto& n : nodes) {
    for (const auto& e : graph.out_edges(n)) m_max = std::max(m_max, e.moment);
  }

  // Every source-target path has the same number of hops, so shifting each weight by
  // log(m_max) keeps the ordering and makes all weights non-negative.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(nodes.size(), inf);
  std::vector<std::ptrdiff_t> pred(nodes.size(), -1);
  std::vector<double> pred_moment(nodes.size(), 0.0);
  std::vector<char> done(nodes.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[*si] = 0.0;
  queue.emplace(0.0, *si);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (const auto& e : graph.out_edges(nodes[u])) {
      const std::size_t v = *graph.index(e.to);
      if (done[v]) continue;
      const double nd = d + (std::log(m_max) - std::log(e.moment));
      const double tol = 1e-12 * (1.0 + std::abs(nd));
      const bool better = nd < dist[v] - tol;
      const bool tie = !better && std::abs(nd - dist[v]) <= tol && pred[v] >= 0 &&
                       nodes[u] < nodes[static_cast<std::size_t>(pred[v])];
      if (better || tie) {
        if (better) dist[v] = nd;
        pred[v] = static_cast<std::ptrdiff_t>(u);
        pred_moment[v] = e.moment;
        if (better) queue.emplace(nd, v);
      }
    }
  }

  if (!std::isfinite(dist[*ti])) {
    const std::vector<char> fwd = reach(graph, *si, true);
    const std::vector<char> bwd = reach(graph, *ti, false);
    int first = target.J;
    for (int J = source.J + 2; J <= target.J; J += 2) {
      bool connected = false;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].J == J && fwd[i] && bwd[i]) { connected = true; break; }
      }
      if (!connected) { first = J; break; }
    }
    result.first_unreachable_J = first;
    result.message = "no path from " + source.label() + " to " + target.label() +
                     "; first unreachable J-shell: J=" + std::to_string(first);
    return result;
  }

  std::vector<std::size_t> chain;
  for (std::ptrdiff_t v = static_cast<std::ptrdiff_t>(*ti); v >= 0; v = pred[static_cast<std::size_t>(v)]) {
    chain.push_back(static_cast<std::size_t>(v));
  }
  std::reverse(chain.begin(), chain.end());
  PathSpec path;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    path.states.push_back(nodes[chain[i]]);
    path.energies_cm1.push_back(graph.energy(nodes[chain[i]]));
    if (i > 0) {
      path.omegas_cm1.push_back(path.energies_cm1[i] - path.energies_cm1[i - 1]);
      path.moments_au.push_back(pred_moment[chain[i]]);
    }
  }
  result.path = std::move(path);
  result.message = "ok";
  return result;
}

StateKey route_target(const PolarizabilityCoupling& coupling, int J, Axis axis) {
  if (J < 0 || J % 2 != 0 || J > coupling.j_max()) {
    throw std::invalid_argument("route_target: J must be even and within the coupling range");
  }
  if (J == 0) return coupling.key(0, 1, 0);
  const MoleculeSpec& spec = coupling.molecule();
  const PrincipalState accessible = find_principal_state(J, axis, spec, SymmetryFilter::ground_species);
  const Classification c = classify_state(accessible.state, 0.0);
  const auto& bary = c.barycentric;
  const int dominant = static_cast<int>(std::max_element(bary.begin(), bary.end()) - bary.begin());
  if (dominant == static_cast<int>(axis)) return coupling.key(J, accessible.state.h, J);
  const PrincipalState overall = find_principal_state(J, axis, spec);
  return coupling.key(J, overall.state.h, J);
}

PathResult find_route(const PolarizabilityCoupling& coupling, int J, Axis axis) {
  const StateKey target = route_target(coupling, J, axis);
  const TransitionGraph graph = build_transition_graph(coupling, J);
  return shortest_path(graph, coupling.key(0, 1, 0), target);
}

}  // namespace rotcoh
