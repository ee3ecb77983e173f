#pragma once

// Rigid asymmetric-top eigenproblem in the Wang-symmetrized symmetric-top basis
//   |J, K, M, tau> = (|J, K, M> + (-1)^tau |J, -K, M>) / sqrt(2),  K > 0,
//   |J, 0, M, 0>   = |J, 0, M>.
// Energies are in cm^-1; rotational constants are given in GHz.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rotcoh {

enum class Axis { a = 0, b = 1, c = 2 };

char axis_name(Axis axis);
Axis parse_axis(char name);  // throws std::invalid_argument

struct Polarizability {
  double aa = 0.0;
  double bb = 0.0;
  double cc = 0.0;

  double along(Axis axis) const;
  double isotropic() const { return (aa + bb + cc) / 3.0; }
};

struct Atom {
  std::string label;
  double mass_amu = 0.0;        // optional; used only for the centre-of-mass check
  Eigen::Vector3d position_A;   // components along the principal axes (a, b, c), angstrom
};

struct MoleculeSpec {
  std::string name;
  double A_GHz = 0.0;
  double B_GHz = 0.0;
  double C_GHz = 0.0;
  Polarizability alpha_au;
  std::vector<Atom> geometry;

  double constant(Axis axis) const;           // GHz
  double constant_cm1(Axis axis) const;       // cm^-1
  // A >= B >= C > 0; if every atom carries a mass, the centre of mass must be at the origin.
  void validate() const;                      // throws std::invalid_argument
};

// Assignment of principal axes to the body-fixed x, y, z axes. Always a cyclic
// permutation of (a, b, c), so the body frame stays right-handed.
struct Embedding {
  std::array<Axis, 3> body{Axis::a, Axis::b, Axis::c};  // body[0] = x, body[1] = y, body[2] = z

  static Embedding with_z(Axis z);
  Axis z() const { return body[2]; }
  int body_index(Axis axis) const;  // 0, 1 or 2
};

struct WangKet {
  int J = 0;
  int K = 0;
  int M = 0;
  int tau = 0;

  WangKet() = default;
  WangKet(int J_, int K_, int M_, int tau_);  // throws std::invalid_argument
};

struct RotorState {
  int J = 0;
  int h = 0;           // 1-based energy rank within the J multiplet (both parities merged)
  int tau = 0;         // Wang parity: 0 <-> '+', 1 <-> '-'
  int k_parity = 0;    // parity of K in the embedding (D2 sub-block)
  double energy_cm1 = 0.0;
  std::vector<double> coeffs;   // a_K for K = 0..J
  std::array<double, 3> proj{}; // <J_a^2>, <J_b^2>, <J_c^2>
  Embedding embedding;

  // Coefficients over signed k = -J..J (index k + J) in the symmetric-top basis.
  std::vector<double> signed_coeffs() const;
  double projection(Axis axis) const { return proj[static_cast<int>(axis)]; }
};

// True when the state belongs to the D2 species of the J = 0 ground state, i.e. it is
// reachable from |0,0> through the rank-2 polarizability: K even and tau == J mod 2.
bool ground_species(const RotorState& state);

Eigen::MatrixXd build_symmetric_top_hamiltonian(int J, const MoleculeSpec& spec,
                                                const Embedding& embedding);

// Hamiltonian restricted to Wang parity tau (K = 0..J, K = 0 only for tau = 0).
Eigen::MatrixXd build_hamiltonian_block(int J, int tau, const MoleculeSpec& spec,
                                        const Embedding& embedding);

std::vector<RotorState> diagonalize_multiplet(int J, const MoleculeSpec& spec,
                                              const Embedding& embedding);
std::vector<RotorState> diagonalize_multiplet(int J, const MoleculeSpec& spec);

enum class StateLabel { a, b, c, mixed };
char label_name(StateLabel label);

struct Classification {
  StateLabel label = StateLabel::mixed;
  std::array<double, 3> barycentric{};  // <J_lambda^2> / J(J+1), lambda = a, b, c
};

inline constexpr double kDefaultClassifyThreshold = 0.7;

Classification classify_state(const RotorState& state,
                              double threshold = kDefaultClassifyThreshold);

enum class SymmetryFilter { any, ground_species };

struct PrincipalState {
  RotorState state;
  bool weak = false;  // the axis fraction does not exceed the classification threshold
};

// State of the J multiplet with the largest <J_axis^2>. The embedding puts `axis` on body z.
PrincipalState find_principal_state(int J, Axis axis, const MoleculeSpec& spec,
                                    SymmetryFilter filter = SymmetryFilter::any,
                                    double threshold = kDefaultClassifyThreshold);

// Multiplets J = 0..j_max diagonalized once and shared by every M.
class RotorLevels {
 public:
  RotorLevels(const MoleculeSpec& spec, int j_max, Embedding embedding);

  int j_max() const { return static_cast<int>(multiplets_.size()) - 1; }
  const Embedding& embedding() const { return embedding_; }
  const MoleculeSpec& molecule() const { return spec_; }
  const std::vector<RotorState>& multiplet(int J) const;
  const RotorState& state(int J, int h) const;  // throws std::out_of_range

 private:
  MoleculeSpec spec_;
  Embedding embedding_;
  std::vector<std::vector<RotorState>> multiplets_;
};

}  // namespace rotcoh
