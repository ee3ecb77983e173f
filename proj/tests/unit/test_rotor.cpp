#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "rotcoh/constants.hpp"
#include "rotcoh/rotor.hpp"

using namespace rotcoh;

namespace {

MoleculeSpec d2s() { return MoleculeSpec{"D2S", 164.57, 135.38, 73.24, {23.5, 24.0, 23.0}, {}}; }

std::vector<double> energies(int J, const MoleculeSpec& s, Embedding e = {}) {
  std::vector<double> out;
  for (const auto& st : diagonalize_multiplet(J, s, e)) out.push_back(st.energy_cm1);
  return out;
}

double cm(double ghz) { return units::ghz_to_wavenumber(ghz); }

}  // namespace

TEST_CASE("J=1 multiplet is {B+C, A+C, A+B}") {
  const auto e = energies(1, d2s());
  REQUIRE(e.size() == 3);
  CHECK(e[0] == doctest::Approx(cm(135.38 + 73.24)).epsilon(1e-12));
  CHECK(e[1] == doctest::Approx(cm(164.57 + 73.24)).epsilon(1e-12));
  CHECK(e[2] == doctest::Approx(cm(164.57 + 135.38)).epsilon(1e-12));
}

TEST_CASE("J=2 multiplet closed form") {
  const double A = 164.57, B = 135.38, C = 73.24;
  const double root = std::sqrt((A - B) * (A - B) + (A - C) * (B - C));
  std::vector<double> ref{2 * (A + B + C) - 2 * root, 4 * A + B + C, A + 4 * B + C, A + B + 4 * C, 2 * (A + B + C) + 2 * root};
  for (auto& x : ref) x = cm(x);
  std::sort(ref.begin(), ref.end());
  const auto e = energies(2, d2s());
  REQUIRE(e.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(e[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("prolate symmetric-top limit") {
  MoleculeSpec s{"prolate", 300.0, 100.0, 100.0, {1, 1, 1}, {}};
  const int J = 6;
  std::vector<double> ref;
  for (int K = -J; K <= J; ++K) ref.push_back(cm(100.0 * J * (J + 1) + 200.0 * K * K));
  std::sort(ref.begin(), ref.end());
  const auto e = energies(J, s);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(e[i] == doctest::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("energies do not depend on the embedding") {
  for (int J : {3, 8, 15}) {
    const auto ref = energies(J, d2s());
    for (Axis z : {Axis::a, Axis::b, Axis::c}) {
      const auto e = energies(J, d2s(), Embedding::with_z(z));
      for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == doctest::Approx(ref[i]).epsilon(1e-11));
    }
  }
}

TEST_CASE("projection sum rule and energy identity") {
  const auto s = d2s();
  for (int J : {1, 7, 20, 45}) {
    for (const auto& st : diagonalize_multiplet(J, s)) {
      CHECK(std::abs(st.proj[0] + st.proj[1] + st.proj[2] - J * (J + 1.0)) < 1e-8);
      const double e = cm(s.A_GHz) * st.proj[0] + cm(s.B_GHz) * st.proj[1] + cm(s.C_GHz) * st.proj[2];
      CHECK(e == doctest::Approx(st.energy_cm1).epsilon(1e-10));
    }
  }
}

TEST_CASE("h ranks and parity labels") {
  const auto states = diagonalize_multiplet(9, d2s());
  REQUIRE(states.size() == 19);
  for (std::size_t i = 0; i < states.size(); ++i) {
    CHECK(states[i].h == static_cast<int>(i) + 1);
    if (i) CHECK(states[i].energy_cm1 >= states[i - 1].energy_cm1);
    double norm = 0.0;
    for (double c : states[i].coeffs) norm += c * c;
    CHECK(norm == doctest::Approx(1.0));
  }
}

TEST_CASE("extreme states are a- and c-like") {
  const auto states = diagonalize_multiplet(10, d2s());
  const auto top = classify_state(states.back());
  const auto bottom = classify_state(states.front());
  CHECK(top.barycentric[0] > 0.85);
  CHECK(top.label == StateLabel::a);
  CHECK(bottom.barycentric[2] > 0.85);
  CHECK(bottom.label == StateLabel::c);
}

TEST_CASE("principal states") {
  const auto s = d2s();
  const auto b10 = find_principal_state(10, Axis::b, s, SymmetryFilter::ground_species);
  CHECK(b10.state.h == 13);
  CHECK(b10.state.tau == 0);
  CHECK(ground_species(b10.state));
  const auto b20 = find_principal_state(20, Axis::b, s, SymmetryFilter::ground_species);
  CHECK(b20.state.h == 25);
  const auto b58 = find_principal_state(58, Axis::b, s, SymmetryFilter::ground_species);
  CHECK(b58.state.h > 30);
  CHECK(b58.state.h < 90);
  CHECK_THROWS_AS(find_principal_state(1, Axis::b, s), std::invalid_argument);
  CHECK(ground_species(diagonalize_multiplet(0, s).front()));
}

TEST_CASE("molecule validation") {
  auto s = d2s();
  CHECK_NOTHROW(s.validate());
  s.B_GHz = 200.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = d2s();
  s.geometry = {{"X", 1.0, Eigen::Vector3d(0.1, 0, 0)}, {"Y", 1.0, Eigen::Vector3d(0.1, 0, 0)}};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.geometry[1].position_A = Eigen::Vector3d(-0.1, 0, 0);
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS(WangKet(2, 0, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_axis('q'), std::invalid_argument);
}

TEST_CASE("embedding is a cyclic permutation") {
  for (Axis z : {Axis::a, Axis::b, Axis::c}) {
    const auto e = Embedding::with_z(z);
    CHECK(e.z() == z);
    CHECK(e.body_index(z) == 2);
    CHECK((static_cast<int>(e.body[1]) - static_cast<int>(e.body[0]) + 3) % 3 == 1);
  }
}

TEST_CASE("random constants: J=1 closed form") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(1.0, 500.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> c{u(rng), u(rng), u(rng)};
    std::sort(c.rbegin(), c.rend());
    MoleculeSpec s{"r", c[0], c[1], c[2], {1, 1, 1}, {}};
    std::vector<double> ref{cm(c[1] + c[2]), cm(c[0] + c[2]), cm(c[0] + c[1])};
    const auto e = energies(1, s);
    for (int k = 0; k < 3; ++k) CHECK(e[k] == doctest::Approx(ref[k]).epsilon(1e-10));
  }
}
