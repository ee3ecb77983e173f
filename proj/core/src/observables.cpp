#include "rotcoh/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rotcoh/constants.hpp"
#include "rotcoh/wigner.hpp"

namespace rotcoh {

using cd = std::complex<double>;
using units::kPi;

namespace {

// Neumaier compensated accumulator.
struct Neumaier {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) c += (sum - t) + x; else c += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

std::mt19937_64 batch_engine(std::uint64_t seed, int batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(batch), 0x5eedu};
  return std::mt19937_64(seq);
}

template <class F>
void parallel_batches(int n_batches, int threads, F&& work) {
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, n_batches);
  if (n_threads == 1) {
    for (int b = 0; b < n_batches; ++b) work(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int i = 0; i < n_threads; ++i) {
    pool.emplace_back([&] {
      for (int b = next++; b < n_batches; b = next++) {
        try {
          work(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

long batch_size(long total, int batches, int b) {
  return total / batches + (b < total % batches ? 1 : 0);
}

// Evaluates every component function psi_n(Omega) (without amplitudes).
class BasisEvaluator {
 public:
  explicit BasisEvaluator(const StatePacket& packet) : packet_(packet) {
    for (const auto& c : packet.components) {
      if (static_cast<int>(c.signed_coeffs.size()) != 2 * c.J + 1) {
        throw std::invalid_argument("StatePacket: coefficient vector does not match J");
      }
      const auto key = std::make_pair(c.J, c.M);
      if (!row_index_.count(key)) {
        row_index_[key] = rows_.size();
        rows_.emplace_back(static_cast<std::size_t>(2 * c.J + 1));
        row_keys_.push_back(key);
      }
      j_max_ = std::max(j_max_, c.J);
      m_max_ = std::max(m_max_, std::abs(c.M));
    }
    echi_.resize(static_cast<std::size_t>(2 * j_max_ + 1));
    ephi_.resize(static_cast<std::size_t>(2 * m_max_ + 1));
  }

  std::size_t size() const { return packet_.components.size(); }

  void evaluate(double theta, double phi, double chi, std::vector<cd>& out) {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      wigner::small_d_row(row_keys_[r].first, row_keys_[r].second, theta, rows_[r]);
    }
    for (int k = -j_max_; k <= j_max_; ++k) echi_[static_cast<std::size_t>(k + j_max_)] = std::polar(1.0, k * chi);
    for (int m = -m_max_; m <= m_max_; ++m) ephi_[static_cast<std::size_t>(m + m_max_)] = std::polar(1.0, m * phi);
    out.resize(size());
    for (std::size_t n = 0; n < size(); ++n) {
      const auto& c = packet_.components[n];
      const auto& row = rows_[row_index_.at({c.J, c.M})];
      cd s{0.0, 0.0};
      for (int k = -c.J; k <= c.J; ++k) {
        const double b = c.signed_coeffs[static_cast<std::size_t>(k + c.J)];
        if (b == 0.0) continue;
        s += b * row[static_cast<std::size_t>(k + c.J)] * echi_[static_cast<std::size_t>(k + j_max_)];
      }
      out[n] = std::sqrt((2.0 * c.J + 1.0) / (8.0 * kPi * kPi)) * ephi_[static_cast<std::size_t>(c.M + m_max_)] * s;
    }
  }

 private:
  const StatePacket& packet_;
  std::map<std::pair<int, int>, std::size_t> row_index_;
  std::vector<std::pair<int, int>> row_keys_;
  std::vector<std::vector<double>> rows_;
  std::vector<cd> echi_, ephi_;
  int j_max_ = 0;
  int m_max_ = 0;
};

struct Orientation {
  double theta, phi, chi;
};

Orientation draw_uniform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double cos_t = 2.0 * u(rng) - 1.0;
  const double phi = 2.0 * kPi * u(rng);
  const double chi = 2.0 * kPi * u(rng);
  return {std::acos(std::clamp(cos_t, -1.0, 1.0)), phi, chi};
}

char lab_name(LabAxis a) { return "XYZ"[static_cast<int>(a)]; }

LabAxis parse_lab(char c) {
  switch (c) {
    case 'X': case 'x': return LabAxis::X;
    case 'Y': case 'y': return LabAxis::Y;
    case 'Z': case 'z': return LabAxis::Z;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown lab axis '") + c + "'");
}

LabAxis default_ref(const std::array<LabAxis, 2>& plane) {
  return (plane[0] == LabAxis::Z || plane[1] == LabAxis::Z) ? LabAxis::Z : LabAxis::X;
}

std::vector<const PacketComponent*> ladder(const StatePacket& packet, bool same_tau) {
  std::vector<const PacketComponent*> out;
  for (const auto& c : packet.components) out.push_back(&c);
  std::sort(out.begin(), out.end(), [](auto* l, auto* r) { return l->J < r->J; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i]->M != out[i]->J) throw std::invalid_argument("coherence formula: components must have M = J");
    if (i > 0 && out[i]->J - out[i - 1]->J != 2) {
      throw std::invalid_argument("coherence formula: components must form a Delta J = 2 ladder");
    }
    if (same_tau && i > 0 && out[i]->tau != out[0]->tau) {
      throw std::invalid_argument("coherence formula: component parities differ");
    }
  }
  return out;
}

}  // namespace

std::vector<cd> StatePacket::amplitudes(double t) const {
  std::vector<cd> out;
  const double w = 2.0 * kPi * units::kLightCmPerPs * (t - t0_ps);
  for (const auto& c : components) out.push_back(c.amp * std::polar(1.0, -w * c.energy_cm1));
  return out;
}

double StatePacket::norm() const {
  double s = 0.0;
  for (const auto& c : components) s += std::norm(c.amp);
  return s;
}

int StatePacket::j_max() const {
  int j = 0;
  for (const auto& c : components) j = std::max(j, c.J);
  return j;
}

PacketComponent component_from_state(const RotorState& state, int M, cd amp) {
  if (std::abs(M) > state.J) throw std::invalid_argument("component_from_state: |M| > J");
  return PacketComponent{state.J, M, state.tau, state.signed_coeffs(), state.energy_cm1, amp};
}

StatePacket packet_from_wavepacket(const Wavepacket& wp, const RotorLevels& levels,
                                   double min_population) {
  StatePacket out;
  out.embedding = levels.embedding();
  out.t0_ps = wp.t_ps;
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const cd a = wp.amps(static_cast<Eigen::Index>(i));
    if (min_population > 0.0 && std::norm(a) < min_population) continue;
    const StateKey& k = wp.basis[i];
    const RotorState& st = levels.state(k.J, k.h);
    if (st.tau != k.tau) throw std::invalid_argument("packet_from_wavepacket: parity mismatch for " + k.label());
    out.components.push_back(component_from_state(st, k.M, a));
  }
  return out;
}

std::vector<int> CoherenceSpec::members() const {
  std::vector<int> out;
  for (int J = j_min; J <= j_max; J += 2) out.push_back(J);
  return out;
}

void CoherenceSpec::validate() const {
  if (j_min < 0 || j_max < j_min || (j_max - j_min) % 2 != 0) {
    throw std::invalid_argument("CoherenceSpec: need 0 <= j_min <= j_max with j_max - j_min even");
  }
  const std::size_t n = members().size();
  if (!weights.empty() && weights.size() != n) throw std::invalid_argument("CoherenceSpec: one weight per member");
  if (!phases.empty() && phases.size() != n) throw std::invalid_argument("CoherenceSpec: one phase per member");
  if (!weights.empty() && std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw std::invalid_argument("CoherenceSpec: weights are all zero");
  }
}

StatePacket resolve_coherence(const CoherenceSpec& spec, const MoleculeSpec& molecule) {
  spec.validate();
  const std::vector<int> js = spec.members();
  std::vector<double> w = spec.weights.empty() ? std::vector<double>(js.size(), 1.0) : spec.weights;
  double s = 0.0;
  for (double x : w) s += x * x;
  for (double& x : w) x /= std::sqrt(s);
  std::vector<double> ph = spec.phases;
  if (ph.empty()) {
    ph.assign(js.size(), 0.0);
    if (spec.random_phases) {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
      for (double& p : ph) p = u(rng);
    }
  }
  StatePacket out;
  out.embedding = Embedding::with_z(spec.axis);
  for (std::size_t i = 0; i < js.size(); ++i) {
    const PrincipalState ps = find_principal_state(js[i], spec.axis, molecule, spec.filter);
    out.components.push_back(component_from_state(ps.state, js[i], std::polar(w[i], -ph[i])));
  }
  return out;
}

std::complex<double> evaluate_wavefunction(const StatePacket& packet, double t, double theta,
                                           double phi, double chi) {
  BasisEvaluator ev(packet);
  std::vector<cd> v;
  ev.evaluate(theta, phi, chi, v);
  const std::vector<cd> c = packet.amplitudes(t);
  cd s{0.0, 0.0};
  for (std::size_t n = 0; n < v.size(); ++n) s += c[n] * v[n];
  return s;
}

std::complex<double> evaluate_wavefunction(const Wavepacket& wp, const RotorLevels& levels,
                                           double theta, double phi, double chi) {
  return evaluate_wavefunction(packet_from_wavepacket(wp, levels), wp.t_ps, theta, phi, chi);
}

Eigen::Matrix3d euler_rotation(double theta, double phi, double chi) {
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cc = std::cos(chi), sc = std::sin(chi);
  Eigen::Matrix3d R;
  R << cp * ct * cc - sp * sc, -cp * ct * sc - sp * cc, cp * st,
       sp * ct * cc + cp * sc, -sp * ct * sc + cp * cc, sp * st,
       -st * cc, st * sc, ct;
  return R;
}

std::string CosineSpec::name() const {
  if (kind == Kind::inplane_euler) return "cos2_phichi";
  std::string s = "cos2_";
  s += axis_name(axis);
  s += '_';
  s += lab_name(plane[0]);
  s += lab_name(plane[1]);
  if (ref != default_ref(plane)) {
    s += "_ref";
    s += lab_name(ref);
  }
  return s;
}

CosineSpec parse_cosine(const std::string& text) {
  std::string s = text;
  if (s.rfind("cos2_", 0) == 0) s = s.substr(5);
  CosineSpec out;
  if (s == "phichi") {
    out.kind = CosineSpec::Kind::inplane_euler;
    return out;
  }
  std::optional<char> ref;
  if (const auto pos = s.find("_ref"); pos != std::string::npos && pos + 5 == s.size()) {
    ref = s.back();
    s = s.substr(0, pos);
  } else if (const auto slash = s.find('/'); slash != std::string::npos && slash + 2 == s.size()) {
    ref = s.back();
    s = s.substr(0, slash);
  }
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  if (s.size() != 3) throw std::invalid_argument("cannot parse alignment cosine '" + text + "'");
  out.axis = parse_axis(s[0]);
  out.plane = {parse_lab(s[1]), parse_lab(s[2])};
  if (out.plane[0] == out.plane[1]) throw std::invalid_argument("alignment cosine '" + text + "': plane axes coincide");
  out.ref = ref ? parse_lab(*ref) : default_ref(out.plane);
  if (out.ref != out.plane[0] && out.ref != out.plane[1]) {
    throw std::invalid_argument("alignment cosine '" + text + "': reference axis not in the plane");
  }
  return out;
}

std::optional<double> cosine_value(const CosineSpec& cosine, const Embedding& embedding,
                                   double theta, double phi, double chi) {
  if (cosine.kind == CosineSpec::Kind::inplane_euler) {
    const double c = std::cos(phi + chi);
    return c * c;
  }
  const Eigen::Vector3d v = euler_rotation(theta, phi, chi).col(embedding.body_index(cosine.axis));
  const double p = v(static_cast<int>(cosine.plane[0]));
  const double q = v(static_cast<int>(cosine.plane[1]));
  const double den = p * p + q * q;
  if (den < 1e-24) return std::nullopt;
  const double r = v(static_cast<int>(cosine.ref));
  return r * r / den;
}

double AlignmentTrace::max(std::size_t cosine) const {
  const auto& v = values.at(cosine);
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

double AlignmentTrace::min(std::size_t cosine) const {
  const auto& v = values.at(cosine);
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

AlignmentTrace alignment_trace(const StatePacket& packet, const std::vector<CosineSpec>& cosines,
                               const std::vector<double>& times_ps, const MonteCarloConfig& mc) {
  if (packet.components.empty()) throw std::invalid_argument("alignment_trace: empty packet");
  if (mc.samples < 1 || mc.batches < 2) throw std::invalid_argument("alignment_trace: need samples >= 1 and batches >= 2");
  const std::size_t n = packet.components.size();
  const std::size_t nc = cosines.size();
  const std::size_t nt = times_ps.size();
  const int B = mc.batches;
  // Small packets: accumulate F_nm = sum psi_n^* psi_m f and W_nm per batch, then any time
  // point costs O(n^2). Large packets: accumulate per time point directly.
  const bool matrix_mode = n <= 32;

  std::vector<std::vector<cd>> amps(nt);
  for (std::size_t it = 0; it < nt; ++it) amps[it] = packet.amplitudes(times_ps[it]);

  // Per batch: num[c][t], den[c][t]
  std::vector<std::vector<double>> num(static_cast<std::size_t>(B), std::vector<double>(nc * nt, 0.0));
  std::vector<std::vector<double>> den(static_cast<std::size_t>(B), std::vector<double>(nc * nt, 0.0));
  std::vector<std::vector<long>> skipped(static_cast<std::size_t>(B), std::vector<long>(nc, 0));

  parallel_batches(B, mc.threads, [&](int b) {
    auto rng = batch_engine(mc.seed, b);
    BasisEvaluator ev(packet);
    std::vector<cd> v;
    const long ns = batch_size(mc.samples, B, b);
    auto& nb = num[static_cast<std::size_t>(b)];
    auto& db = den[static_cast<std::size_t>(b)];
    auto& sb = skipped[static_cast<std::size_t>(b)];
    std::vector<Eigen::MatrixXcd> F, W;
    if (matrix_mode) {
      F.assign(nc, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
      W.assign(nc, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    }
    Eigen::MatrixXcd outer(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<std::optional<double>> f(nc);
    for (long s = 0; s < ns; ++s) {
      const Orientation o = draw_uniform(rng);
      ev.evaluate(o.theta, o.phi, o.chi, v);
      for (std::size_t c = 0; c < nc; ++c) {
        f[c] = cosine_value(cosines[c], packet.embedding, o.theta, o.phi, o.chi);
        if (!f[c]) ++sb[c];
      }
      if (matrix_mode) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            outer(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::conj(v[i]) * v[j];
          }
        }
        for (std::size_t c = 0; c < nc; ++c) {
          if (!f[c]) continue;
          W[c] += outer;
          F[c] += *f[c] * outer;
        }
      } else {
        for (std::size_t it = 0; it < nt; ++it) {
          cd psi{0.0, 0.0};
          for (std::size_t i = 0; i < n; ++i) psi += amps[it][i] * v[i];
          const double w = std::norm(psi);
          for (std::size_t c = 0; c < nc; ++c) {
            if (!f[c]) continue;
            db[c * nt + it] += w;
            nb[c * nt + it] += w * *f[c];
          }
        }
      }
    }
    if (matrix_mode) {
      for (std::size_t c = 0; c < nc; ++c) {
        for (std::size_t it = 0; it < nt; ++it) {
          const Eigen::Map<const Eigen::VectorXcd> a(amps[it].data(), static_cast<Eigen::Index>(n));
          nb[c * nt + it] = a.dot(F[c] * a).real();
          db[c * nt + it] = a.dot(W[c] * a).real();
        }
      }
    }
  });

  AlignmentTrace out;
  out.times_ps = times_ps;
  for (const auto& c : cosines) out.names.push_back(c.name());
  out.values.assign(nc, std::vector<double>(nt, 0.0));
  out.stderrs.assign(nc, std::vector<double>(nt, 0.0));
  out.skipped.assign(nc, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    for (int b = 0; b < B; ++b) out.skipped[c] += skipped[static_cast<std::size_t>(b)][c];
    for (std::size_t it = 0; it < nt; ++it) {
      Neumaier sn, sd;
      for (int b = 0; b < B; ++b) {
        sn.add(num[static_cast<std::size_t>(b)][c * nt + it]);
        sd.add(den[static_cast<std::size_t>(b)][c * nt + it]);
      }
      if (!(sd.value() > 0.0)) throw NumericError("alignment_trace: vanishing importance weights");
      const double R = sn.value() / sd.value();
      const double dbar = sd.value() / B;
      Neumaier sv;
      for (int b = 0; b < B; ++b) {
        const double r = (num[static_cast<std::size_t>(b)][c * nt + it] - R * den[static_cast<std::size_t>(b)][c * nt + it]) / dbar;
        sv.add(r * r);
      }
      out.values[c][it] = R;
      out.stderrs[c][it] = std::sqrt(sv.value() / (static_cast<double>(B) * (B - 1)));
    }
  }
  return out;
}

Estimate alignment_cos2_mc(const StatePacket& packet, double t, const CosineSpec& cosine,
                           const MonteCarloConfig& mc) {
  const AlignmentTrace tr = alignment_trace(packet, {cosine}, {t}, mc);
  return Estimate{tr.values[0][0], tr.stderrs[0][0], tr.skipped[0]};
}

double analytic_cos2phi(const StatePacket& packet, double t) {
  const auto comps = ladder(packet, false);
  const double norm = packet.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("analytic_cos2phi: zero packet");
  const double w = 2.0 * kPi * units::kLightCmPerPs * (t - packet.t0_ps);
  double value = 0.5 * norm;
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
    const int J = comps[i]->J;
    const cd a = comps[i]->amp * std::polar(1.0, -w * comps[i]->energy_cm1);
    const cd b = comps[i + 1]->amp * std::polar(1.0, -w * comps[i + 1]->energy_cm1);
    value += (std::conj(a) * b).real() * std::sqrt((2.0 * J + 1.0) * (2.0 * J + 5.0)) / (4.0 * J + 6.0);
  }
  return value / norm;
}

double analytic_cos2phi_full(const StatePacket& packet, double t) {
  const auto comps = ladder(packet, true);
  const double norm = packet.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("analytic_cos2phi_full: zero packet");
  const double w = 2.0 * kPi * units::kLightCmPerPs * (t - packet.t0_ps);
  double value = 0.5 * norm;
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
    const PacketComponent& lo = *comps[i];
    const PacketComponent& hi = *comps[i + 1];
    const int J = lo.J;
    double overlap = 0.0;
    for (int k = -J; k <= J; ++k) {
      const double bl = lo.signed_coeffs[static_cast<std::size_t>(k + J)];
      const double bh = hi.signed_coeffs[static_cast<std::size_t>(k + 2 + J + 2)];
      if (bl == 0.0 || bh == 0.0) continue;
      overlap += bl * bh * wigner::b_overlap(J, J + 2, k, k + 2);
    }
    const cd a = lo.amp * std::polar(1.0, -w * lo.energy_cm1);
    const cd b = hi.amp * std::polar(1.0, -w * hi.energy_cm1);
    value += (std::conj(a) * b).real() * std::sqrt((2.0 * J + 1.0) * (2.0 * J + 5.0)) / 4.0 * overlap;
  }
  return value / norm;
}

double cos2phi_quadrature(const StatePacket& packet, double t) {
  const int jm = packet.j_max();
  const int n_theta = 2 * jm + 40;
  const int n_ang = 2 * jm + 12;
  const wigner::GaussLegendre gl = wigner::gauss_legendre(n_theta);
  BasisEvaluator ev(packet);
  const std::vector<cd> c = packet.amplitudes(t);
  std::vector<cd> v;
  Neumaier num, den;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = std::acos(gl.nodes[static_cast<std::size_t>(i)]);
    for (int a = 0; a < n_ang; ++a) {
      const double phi = 2.0 * kPi * a / n_ang;
      for (int b = 0; b < n_ang; ++b) {
        const double chi = 2.0 * kPi * b / n_ang;
        ev.evaluate(theta, phi, chi, v);
        cd psi{0.0, 0.0};
        for (std::size_t k = 0; k < v.size(); ++k) psi += c[k] * v[k];
        const double wgt = gl.weights[static_cast<std::size_t>(i)] * std::norm(psi);
        const double cp = std::cos(phi + chi);
        num.add(wgt * cp * cp);
        den.add(wgt);
      }
    }
  }
  return num.value() / den.value();
}

std::complex<double> phi_integral(int delta_j) {
  if (delta_j == 0) return {kPi, 0.0};
  if (std::abs(delta_j) == 2) return {0.5 * kPi, 0.0};
  return {0.0, 0.0};
}

std::complex<double> chi_integral(int delta_k) {
  return delta_k == 0 ? cd{2.0 * kPi, 0.0} : cd{0.0, 0.0};
}

double cogwheel_density(int J, double theta, double phi, double chi, double t,
                        const EulerOffsets& offsets, double omega) {
  if (J < 0) throw std::invalid_argument("cogwheel_density: J must be >= 0");
  const double c = std::cos(0.5 * (theta - offsets.theta));
  const double c4 = std::pow(c, 4);
  const double a = 2.0 * J + 1.0;
  const double b = 2.0 * J + 5.0;
  const double beat = std::cos(2.0 * ((phi - offsets.phi) + (chi - offsets.chi)) - omega * t);
  return std::pow(c, 4 * J) * (a + b * c4 * c4 + 2.0 * std::sqrt(a * b) * c4 * beat) / (16.0 * kPi * kPi);
}

double cogwheel_period(double e_j_cm1, double e_jp2_cm1) {
  const double de = std::abs(e_jp2_cm1 - e_j_cm1);
  if (!(de > 0.0)) throw std::invalid_argument("cogwheel_period: energies must differ");
  return 1.0 / (units::kLightCmPerPs * de);
}

std::vector<CloudPoint> density_cloud(const StatePacket& packet, double t,
                                      const std::vector<Atom>& geometry, long n_samples,
                                      std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("density_cloud: n_samples must be positive");
  if (geometry.empty()) throw std::invalid_argument("density_cloud: molecule has no geometry");
  const long n_prop = std::max<long>(50 * n_samples, 200000);
  std::mt19937_64 rng = batch_engine(seed, -1);
  BasisEvaluator ev(packet);
  const std::vector<cd> c = packet.amplitudes(t);
  std::vector<cd> v;
  std::vector<Orientation> prop(static_cast<std::size_t>(n_prop));
  std::vector<double> cum(static_cast<std::size_t>(n_prop));
  double total = 0.0;
  for (long i = 0; i < n_prop; ++i) {
    const Orientation o = draw_uniform(rng);
    ev.evaluate(o.theta, o.phi, o.chi, v);
    cd psi{0.0, 0.0};
    for (std::size_t k = 0; k < v.size(); ++k) psi += c[k] * v[k];
    total += std::norm(psi);
    prop[static_cast<std::size_t>(i)] = o;
    cum[static_cast<std::size_t>(i)] = total;
  }
  if (!(total > 0.0)) throw NumericError("density_cloud: vanishing density");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double start = u(rng);
  std::vector<Eigen::Vector3d> body;
  for (const auto& atom : geometry) {
    body.emplace_back(atom.position_A(static_cast<int>(packet.embedding.body[0])),
                      atom.position_A(static_cast<int>(packet.embedding.body[1])),
                      atom.position_A(static_cast<int>(packet.embedding.body[2])));
  }
  std::vector<CloudPoint> out;
  out.reserve(static_cast<std::size_t>(n_samples) * geometry.size());
  std::size_t j = 0;
  for (long s = 0; s < n_samples; ++s) {
    const double target = (start + static_cast<double>(s)) / static_cast<double>(n_samples) * total;
    while (j + 1 < cum.size() && cum[j] < target) ++j;
    const Orientation& o = prop[j];
    const Eigen::Matrix3d R = euler_rotation(o.theta, o.phi, o.chi);
    for (std::size_t a = 0; a < geometry.size(); ++a) out.push_back({geometry[a].label, R * body[a]});
  }
  return out;
}

AxisDistribution rotation_axis_distribution(const RotorState& state, int n_theta, int n_phi) {
  if (state.J < 1) throw std::invalid_argument("rotation_axis_distribution: J must be >= 1");
  if (n_theta < 2 || n_phi < 1) throw std::invalid_argument("rotation_axis_distribution: grid too small");
  const int J = state.J;
  const std::vector<double> b = state.signed_coeffs();
  AxisDistribution out;
  out.embedding = state.embedding;
  out.value.resize(n_theta, n_phi);
  std::vector<double> row(static_cast<std::size_t>(2 * J + 1));
  for (int i = 0; i < n_theta; ++i) {
    const double beta = kPi * i / (n_theta - 1);
    out.theta_deg.push_back(180.0 * i / (n_theta - 1));
    wigner::small_d_row(J, J, beta, row);  // d^J_{J,k}; d^J_{k,J} = (-1)^{J-k} d^J_{J,k}
    for (int j = 0; j < n_phi; ++j) {
      const double alpha = 2.0 * kPi * j / n_phi;
      cd s{0.0, 0.0};
      for (int k = -J; k <= J; ++k) {
        const double d = ((J - k) % 2 == 0 ? 1.0 : -1.0) * row[static_cast<std::size_t>(k + J)];
        s += b[static_cast<std::size_t>(k + J)] * d * std::polar(1.0, k * alpha);
      }
      out.value(i, j) = std::norm(s);
    }
  }
  for (int j = 0; j < n_phi; ++j) out.phi_deg.push_back(360.0 * j / n_phi);
  const double m = out.value.maxCoeff();
  if (m > 0.0) out.value /= m;
  return out;
}

}  // namespace rotcoh
