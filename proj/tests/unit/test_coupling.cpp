#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "doctest.h"
#include "rotcoh/coupling.hpp"
#include "rotcoh/wigner.hpp"
#include "oracles.hpp"

using namespace rotcoh;
using cd = std::complex<double>;

namespace {

MoleculeSpec d2s() { return MoleculeSpec{"D2S", 164.57, 135.38, 73.24, {23.5, 24.0, 23.0}, {}}; }

using oracle::lab_component;
using oracle::psi;
using oracle::rot;

// <bra| A_p |ket> by quadrature over the rotation group.
cd element_quadrature(const PolarizabilityCoupling& pc, const StateKey& bra, const StateKey& ket, int p) {
  const auto& lv = pc.levels();
  const RotorState& sb = lv.state(bra.J, bra.h);
  const RotorState& sk = lv.state(ket.J, ket.h);
  const auto emb = lv.embedding();
  Eigen::Matrix3d body = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) body(i, i) = pc.molecule().alpha_au.along(emb.body[i]);
  const int nth = bra.J + ket.J + 10, nang = 2 * (bra.J + ket.J) + 8;
  const auto gl = wigner::gauss_legendre(nth);
  cd sum = 0.0;
  for (int i = 0; i < nth; ++i) {
    const double th = std::acos(gl.nodes[i]);
    for (int j = 0; j < nang; ++j) {
      const double ph = 2 * std::numbers::pi * j / nang;
      for (int l = 0; l < nang; ++l) {
        const double ch = 2 * std::numbers::pi * l / nang;
        const Eigen::Matrix3d r = rot(th, ph, ch);
        const Eigen::Matrix3d a = r * body * r.transpose();
        sum += gl.weights[i] * std::conj(psi(sb, bra.M, th, ph, ch)) * lab_component(a, p) * psi(sk, ket.M, th, ph, ch);
      }
    }
  }
  return sum * std::pow(2 * std::numbers::pi / nang, 2);
}

}  // namespace

TEST_CASE("matrix elements agree with rotation-group quadrature") {
  const PolarizabilityCoupling pc(d2s(), 4);
  struct Case {
    int J, h, M, Jp, hp, p;
  } cases[] = {{0, 1, 0, 2, 1, 2}, {0, 1, 0, 2, 5, 2}, {2, 1, 2, 4, 1, 2}, {2, 1, 0, 2, 1, 0},
               {2, 5, 1, 3, 3, 2}, {3, 2, -1, 4, 7, -2}, {4, 9, 4, 2, 5, -2}, {2, 3, 0, 2, 3, 0}};
  int nonzero = 0;
  for (const auto& c : cases) {
    const StateKey ket = pc.key(c.J, c.h, c.M);
    const StateKey bra = pc.key(c.Jp, c.hp, c.M + c.p);
    const cd e = pc.element(bra, ket, c.p);
    const cd q = element_quadrature(pc, bra, ket, c.p);
    CHECK(std::abs(e - q) < 1e-10);
    nonzero += std::abs(q) > 1e-6;
  }
  CHECK(nonzero >= 4);
}

TEST_CASE("elements obey A_p^dagger = (-1)^p A_-p") {
  const PolarizabilityCoupling pc(d2s(), 8);
  for (int J = 2; J <= 6; ++J) {
    for (int Jp = J - 2; Jp <= J + 2; ++Jp) {
      for (int h = 1; h <= 2 * J + 1; h += 3) {
        for (int hp = 1; hp <= 2 * Jp + 1; hp += 2) {
          for (int p : {-2, 0, 2}) {
            const int M = 1;
            if (std::abs(M + p) > Jp) continue;
            const StateKey a = pc.key(Jp, hp, M + p), b = pc.key(J, h, M);
            const cd lhs = pc.element(a, b, p);
            const cd rhs = (p % 2 ? -1.0 : 1.0) * std::conj(pc.element(b, a, -p));
            CHECK(std::abs(lhs - rhs) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("isotropic polarizability does not couple") {
  MoleculeSpec s = d2s();
  s.alpha_au = {10, 10, 10};
  const PolarizabilityCoupling pc(s, 4);
  CHECK(std::abs(pc.element(pc.key(2, 1, 2), pc.key(0, 1, 0), 2)) < 1e-14);
  const auto basis = std::vector<StateKey>{pc.key(0, 1, 0), pc.key(2, 1, 2)};
  const auto lab = build_lab_polarizability(pc, basis);
  CHECK(lab.isotropic == doctest::Approx(10.0));
  CHECK(lab.a_plus2.norm() < 1e-14);
}

TEST_CASE("lab operators match element()") {
  const PolarizabilityCoupling pc(d2s(), 4);
  std::vector<StateKey> basis;
  for (int J = 0; J <= 4; ++J)
    for (int h = 1; h <= 2 * J + 1; ++h)
      for (int M = -J; M <= J; ++M) basis.push_back(pc.key(J, h, M));
  const auto lab = build_lab_polarizability(pc, basis);
  const Eigen::MatrixXd a0 = lab.a0.toDense(), a2 = lab.a_plus2.toDense();
  CHECK((a0 - a0.transpose()).norm() < 1e-13);
  for (std::size_t i = 0; i < basis.size(); i += 7) {
    for (std::size_t j = 0; j < basis.size(); j += 5) {
      CHECK(std::abs(a0(i, j) - pc.element(basis[i], basis[j], 0).real()) < 1e-13);
      CHECK(std::abs(a2(i, j) - pc.element(basis[i], basis[j], 2).real()) < 1e-13);
    }
  }
  CHECK(lab.isotropic == doctest::Approx(23.5));
}

TEST_CASE("route to the J=14 b-state follows the K=J ladder") {
  const PolarizabilityCoupling pc(d2s(), 14);
  const PathResult r = find_route(pc, 14, Axis::b);
  REQUIRE(r.found());
  const auto& p = *r.path;
  REQUIRE(p.hops() == 7);
  const int taus[] = {1, 1, 1, 1, 5, 9, 13, 17};
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    CHECK(p.states[i].J == 2 * static_cast<int>(i));
    CHECK(p.states[i].M == 2 * static_cast<int>(i));
    CHECK(p.states[i].tau == 0);
    CHECK(p.states[i].h == taus[i]);
    if (i < p.hops()) CHECK(p.omegas_cm1[i] == doctest::Approx(p.energies_cm1[i + 1] - p.energies_cm1[i]));
  }
  for (std::size_t i = 1; i < p.omegas_cm1.size(); ++i) CHECK(p.omegas_cm1[i] > p.omegas_cm1[i - 1]);
}

TEST_CASE("J=2 b target is dark") {
  const PolarizabilityCoupling pc(d2s(), 2);
  const PathResult r = find_route(pc, 2, Axis::b);
  CHECK_FALSE(r.found());
  CHECK(r.first_unreachable_J == 2);
  const PathResult g = find_route(pc, 0, Axis::a);
  REQUIRE(g.found());
  CHECK(g.path->empty());
}

TEST_CASE("Dijkstra route maximizes the moment product") {
  const PolarizabilityCoupling pc(d2s(), 6);
  const TransitionGraph graph = build_transition_graph(pc, 6);
  const StateKey src = pc.key(0, 1, 0);
  for (int h = 1; h <= 13; ++h) {
    const StateKey tgt = pc.key(6, h, 6);
    double best = 0.0;
    std::function<void(const StateKey&, double)> dfs = [&](const StateKey& k, double prod) {
      if (k == tgt) {
        best = std::max(best, prod);
        return;
      }
      for (const auto& e : graph.out_edges(k)) dfs(e.to, prod * e.moment);
    };
    dfs(src, 1.0);
    const PathResult r = shortest_path(graph, src, tgt);
    CHECK(r.found() == (best > 0.0));
    if (!r.found()) continue;
    double prod = 1.0;
    for (double m : r.path->moments_au) prod *= m;
    CHECK(prod == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("state keys") {
  CHECK_THROWS_AS((StateKey{2, 6, 0, 0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((StateKey{2, 1, 0, 3}.validate()), std::invalid_argument);
  CHECK(StateKey{14, 17, 0, 14}.label() == "|14,14,17,+>");
}
