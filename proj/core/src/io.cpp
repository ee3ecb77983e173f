#include "rotcoh/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace rotcoh::io {

using nlohmann::json;

namespace {

double number(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw FormatError(std::string(where) + ": missing numeric field '" + key + "'");
  }
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key, const char* where) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw FormatError(std::string(where) + ": missing integer field '" + key + "'");
  }
  return j.at(key).get<int>();
}

json parse_json(const std::string& text, const char* where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(where) + ": invalid JSON: " + e.what());
  }
}

json key_json(const StateKey& k) {
  return json{{"J", k.J}, {"M", k.M}, {"h", k.h}, {"tau", k.tau}};
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

MoleculeSpec parse_molecule(const std::string& json_text) {
  const json j = parse_json(json_text, "molecule");
  if (!j.is_object()) throw FormatError("molecule: expected a JSON object");
  MoleculeSpec s;
  s.name = j.value("name", std::string("molecule"));
  s.A_GHz = number(j, "A_GHz", "molecule");
  s.B_GHz = number(j, "B_GHz", "molecule");
  s.C_GHz = number(j, "C_GHz", "molecule");
  if (!j.contains("alpha_au") || !j.at("alpha_au").is_object()) {
    throw FormatError("molecule: missing object 'alpha_au'");
  }
  const json& a = j.at("alpha_au");
  s.alpha_au = Polarizability{number(a, "aa", "alpha_au"), number(a, "bb", "alpha_au"), number(a, "cc", "alpha_au")};
  if (j.contains("geometry")) {
    if (!j.at("geometry").is_array()) throw FormatError("molecule: 'geometry' must be an array");
    for (const json& g : j.at("geometry")) {
      Atom atom;
      if (!g.contains("atom") || !g.at("atom").is_string()) throw FormatError("geometry: missing atom label");
      atom.label = g.at("atom").get<std::string>();
      atom.position_A = Eigen::Vector3d(number(g, "x_A", "geometry"), number(g, "y_A", "geometry"),
                                        number(g, "z_A", "geometry"));
      if (g.contains("mass_amu")) atom.mass_amu = number(g, "mass_amu", "geometry");
      s.geometry.push_back(atom);
    }
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what());
  }
  return s;
}

MoleculeSpec read_molecule(const std::filesystem::path& path) { return parse_molecule(read_text(path)); }

std::string molecule_to_json(const MoleculeSpec& s) {
  json j{{"name", s.name}, {"A_GHz", s.A_GHz}, {"B_GHz", s.B_GHz}, {"C_GHz", s.C_GHz},
         {"alpha_au", {{"aa", s.alpha_au.aa}, {"bb", s.alpha_au.bb}, {"cc", s.alpha_au.cc}}}};
  json g = json::array();
  for (const auto& atom : s.geometry) {
    json a{{"atom", atom.label}, {"x_A", atom.position_A.x()}, {"y_A", atom.position_A.y()}, {"z_A", atom.position_A.z()}};
    if (atom.mass_amu > 0.0) a["mass_amu"] = atom.mass_amu;
    g.push_back(a);
  }
  j["geometry"] = g;
  return j.dump(2);
}

void write_levels_csv(std::ostream& os, const RotorLevels& levels, double threshold) {
  os << "J,h,tau,energy_cm1,bary_a,bary_b,bary_c,label,degenerate\n";
  for (int J = 0; J <= levels.j_max(); ++J) {
    const auto& states = levels.multiplet(J);
    const double scale = std::max(1.0, std::abs(states.back().energy_cm1));
    for (std::size_t i = 0; i < states.size(); ++i) {
      const auto& st = states[i];
      bool degenerate = false;
      if (i > 0) degenerate |= std::abs(st.energy_cm1 - states[i - 1].energy_cm1) < 1e-9 * scale;
      if (i + 1 < states.size()) degenerate |= std::abs(states[i + 1].energy_cm1 - st.energy_cm1) < 1e-9 * scale;
      const Classification c = classify_state(st, threshold);
      os << st.J << ',' << st.h << ',' << st.tau << ',' << format_number(st.energy_cm1) << ','
         << format_number(c.barycentric[0]) << ',' << format_number(c.barycentric[1]) << ','
         << format_number(c.barycentric[2]) << ',' << label_name(c.label) << ',' << (degenerate ? 1 : 0) << '\n';
    }
  }
}

std::string path_to_json(const PathSpec& path) {
  json arr = json::array();
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    const StateKey& k = path.states[i];
    json r{{"J", k.J}, {"M", k.M}, {"h", k.h}, {"tau", k.tau}, {"energy_cm1", path.energies_cm1.at(i)}};
    if (i < path.hops()) {
      r["omega_to_next_cm1"] = path.omegas_cm1[i];
      r["moment_to_next_au"] = i < path.moments_au.size() ? json(path.moments_au[i]) : json(nullptr);
    } else {
      r["omega_to_next_cm1"] = nullptr;
      r["moment_to_next_au"] = nullptr;
    }
    arr.push_back(r);
  }
  return arr.dump(2);
}

PathSpec path_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "path");
  if (!j.is_array()) throw FormatError("path: expected a JSON array");
  PathSpec p;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& r = j[i];
    StateKey k{integer(r, "J", "path"), integer(r, "h", "path"), integer(r, "tau", "path"), integer(r, "M", "path")};
    try {
      k.validate();
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("path: ") + e.what());
    }
    p.states.push_back(k);
    p.energies_cm1.push_back(number(r, "energy_cm1", "path"));
    if (i + 1 < j.size()) {
      p.omegas_cm1.push_back(number(r, "omega_to_next_cm1", "path"));
      if (r.contains("moment_to_next_au") && r.at("moment_to_next_au").is_number()) {
        p.moments_au.push_back(r.at("moment_to_next_au").get<double>());
      }
    }
  }
  if (p.moments_au.size() != p.omegas_cm1.size()) p.moments_au.clear();
  return p;
}

StateKey parse_state_label(const std::string& label) {
  int J = 0, M = 0, h = 0;
  char sign = '+';
  if (std::sscanf(label.c_str(), "|%d,%d,%d,%c>", &J, &M, &h, &sign) != 4 || (sign != '+' && sign != '-')) {
    throw FormatError("cannot parse state label '" + label + "'");
  }
  return StateKey{J, h, sign == '+' ? 0 : 1, M};
}

std::string pulse_to_json(const CentrifugeParams& params, const EnvelopeSchedule& schedule) {
  json sched = json::array();
  for (const auto& e : schedule.entries) {
    sched.push_back(json{{"t_ps", e.t_ps}, {"from", e.from.label()}, {"to", e.to.label()}, {"omega_cm1", e.omega_cm1}});
  }
  json j{{"E0_V_per_cm", params.E0_V_per_cm},
         {"beta_GHz_per_ps", params.beta_GHz_per_ps},
         {"sigma_ps", params.sigma_ps},
         {"handedness", params.handedness > 0 ? "+" : "-"},
         {"t0_ps", params.t0_ps},
         {"window_sigmas", params.window_sigmas},
         {"envelope", params.shape == EnvelopeShape::intensity_sinc ? "intensity_sinc" : "amplitude_sinc"},
         {"schedule", sched}};
  if (!schedule.warnings.empty()) j["warnings"] = schedule.warnings;
  return j.dump(2);
}

void pulse_from_json(const std::string& json_text, CentrifugeParams& params, EnvelopeSchedule& schedule) {
  const json j = parse_json(json_text, "pulse");
  params.E0_V_per_cm = number(j, "E0_V_per_cm", "pulse");
  params.beta_GHz_per_ps = number(j, "beta_GHz_per_ps", "pulse");
  params.sigma_ps = number(j, "sigma_ps", "pulse");
  params.t0_ps = number(j, "t0_ps", "pulse");
  const std::string hand = j.value("handedness", std::string("+"));
  if (hand != "+" && hand != "-") throw FormatError("pulse: handedness must be \"+\" or \"-\"");
  params.handedness = hand == "+" ? 1 : -1;
  params.window_sigmas = j.value("window_sigmas", 4.0);
  const std::string env = j.value("envelope", std::string("intensity_sinc"));
  if (env == "intensity_sinc") params.shape = EnvelopeShape::intensity_sinc;
  else if (env == "amplitude_sinc") params.shape = EnvelopeShape::amplitude_sinc;
  else throw FormatError("pulse: unknown envelope '" + env + "'");
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("pulse: ") + e.what());
  }
  schedule = EnvelopeSchedule{};
  if (!j.contains("schedule") || !j.at("schedule").is_array()) throw FormatError("pulse: missing 'schedule' array");
  for (const json& e : j.at("schedule")) {
    ScheduleEntry s;
    s.t_ps = number(e, "t_ps", "schedule");
    s.omega_cm1 = number(e, "omega_cm1", "schedule");
    s.from = parse_state_label(e.value("from", std::string()));
    s.to = parse_state_label(e.value("to", std::string()));
    schedule.entries.push_back(s);
  }
}

void write_envelope_csv(std::ostream& os, const EnvelopeSchedule& schedule,
                        const CentrifugeParams& params, double t_begin, double t_end, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("write_envelope_csv: dt must be positive");
  os << "t_ps,amplitude,intensity\n";
  const long n = std::lround(std::floor((t_end - t_begin) / dt + 1e-9));
  for (long i = 0; i <= n; ++i) {
    const double t = t_begin + static_cast<double>(i) * dt;
    const double a = envelope(t, schedule, params);
    os << format_number(t) << ',' << format_number(a) << ',' << format_number(a * a) << '\n';
  }
}

std::string population_column(const StateKey& key) {
  std::ostringstream os;
  os << "P_J" << key.J << "_M" << key.M << "_h" << key.h << "_t" << key.tau;
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "t_ps,norm";
  for (const auto& k : trajectory.tracked) os << ',' << population_column(k);
  os << '\n';
  for (const auto& s : trajectory.samples) {
    os << format_number(s.t_ps) << ',' << format_number(s.norm);
    for (double p : s.populations) os << ',' << format_number(p);
    os << '\n';
  }
}

std::string wavepacket_to_json(const Wavepacket& wp) {
  json states = json::array();
  for (std::size_t i = 0; i < wp.size(); ++i) {
    const auto& k = wp.basis[i];
    const auto a = wp.amps(static_cast<Eigen::Index>(i));
    json s = key_json(k);
    s["energy_cm1"] = wp.energies(static_cast<Eigen::Index>(i));
    s["re"] = a.real();
    s["im"] = a.imag();
    states.push_back(s);
  }
  return json{{"t_ps", wp.t_ps}, {"states", states}}.dump(1);
}

Wavepacket wavepacket_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "wavepacket");
  if (!j.contains("states") || !j.at("states").is_array()) throw FormatError("wavepacket: missing 'states' array");
  std::vector<StateKey> basis;
  std::vector<double> e;
  std::vector<std::complex<double>> c;
  for (const json& s : j.at("states")) {
    StateKey k{integer(s, "J", "wavepacket"), integer(s, "h", "wavepacket"), integer(s, "tau", "wavepacket"),
               integer(s, "M", "wavepacket")};
    basis.push_back(k);
    e.push_back(number(s, "energy_cm1", "wavepacket"));
    c.emplace_back(number(s, "re", "wavepacket"), number(s, "im", "wavepacket"));
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  return Wavepacket(std::move(basis), Eigen::Map<Eigen::VectorXd>(e.data(), n),
                    Eigen::Map<Eigen::VectorXcd>(c.data(), n), number(j, "t_ps", "wavepacket"));
}

void write_trace_csv(std::ostream& os, const AlignmentTrace& trace) {
  os << "t_ps";
  for (const auto& n : trace.names) os << ',' << n;
  for (const auto& n : trace.names) os << ",stderr_" << n;
  os << '\n';
  for (std::size_t t = 0; t < trace.times_ps.size(); ++t) {
    os << format_number(trace.times_ps[t]);
    for (const auto& v : trace.values) os << ',' << format_number(v[t]);
    for (const auto& v : trace.stderrs) os << ',' << format_number(v[t]);
    os << '\n';
  }
}

void write_xyz(std::ostream& os, const std::vector<CloudPoint>& cloud, const std::string& comment) {
  os << cloud.size() << '\n' << comment << '\n';
  for (const auto& p : cloud) {
    os << p.atom << ' ' << format_number(p.position_A.x()) << ' ' << format_number(p.position_A.y()) << ' '
       << format_number(p.position_A.z()) << '\n';
  }
}

void write_axis_distribution_csv(std::ostream& os, const AxisDistribution& dist) {
  os << "theta_deg,phi_deg,value\n";
  for (std::size_t i = 0; i < dist.theta_deg.size(); ++i) {
    for (std::size_t j = 0; j < dist.phi_deg.size(); ++j) {
      os << format_number(dist.theta_deg[i]) << ',' << format_number(dist.phi_deg[j]) << ','
         << format_number(dist.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << '\n';
    }
  }
}

}  // namespace rotcoh::io
