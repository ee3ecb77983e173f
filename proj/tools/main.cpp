// rotcoh: rotational-state preparation and alignment pipeline.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rotcoh/centrifuge.hpp"
#include "rotcoh/coupling.hpp"
#include "rotcoh/dynamics.hpp"
#include "rotcoh/io.hpp"
#include "rotcoh/observables.hpp"
#include "rotcoh/rotor.hpp"

#ifndef ROTCOH_VERSION
#define ROTCOH_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rotcoh;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitWarning = 1;  // finished, but the result carries a warning flag
constexpr int kExitConfig = 2;
constexpr int kExitNoPath = 3;
constexpr int kExitNumeric = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoPath : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::string molecule;
  std::string out = ".";
  std::uint64_t seed = 1;
  int jmax = -1;
  long samples = 1'000'000;
  std::vector<std::string> e0, sigma, beta;
  double dt = 0.010;
  bool force = false;
};

// Writes artifacts into the output directory, each with a <name>.meta.json sidecar.
class Output {
 public:
  Output(const Global& g, std::string command, json config)
      : dir_(g.out), force_(g.force), command_(std::move(command)), config_(std::move(config)), seed_(g.seed) {}

  void claim(const std::vector<std::string>& names) const {
    for (const auto& n : names) {
      for (const fs::path& p : {dir_ / n, dir_ / (n + ".meta.json")}) {
        if (fs::exists(p) && !force_) {
          throw ConfigError("refusing to overwrite '" + p.string() + "' (use --force)");
        }
      }
    }
  }

  void write(const std::string& name, const std::string& content, const json& extra = json::object(),
             const std::vector<std::string>& warnings = {}) const {
    claim({name});
    fs::create_directories(dir_);
    put(dir_ / name, content);
    json meta{{"tool", "rotcoh"}, {"version", ROTCOH_VERSION}, {"command", command_},
              {"seed", seed_},    {"config", config_},         {"warnings", warnings}};
    if (!extra.empty()) meta["result"] = extra;
    put(dir_ / (name + ".meta.json"), meta.dump(2) + "\n");
    std::cout << "wrote " << (dir_ / name).string() << '\n';
  }

 private:
  static void put(const fs::path& p, const std::string& content) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    os << content;
    if (!os) throw ConfigError("write failed for '" + p.string() + "'");
  }

  fs::path dir_;
  bool force_;
  std::string command_;
  json config_;
  std::uint64_t seed_;
};

MoleculeSpec load_molecule(const Global& g) {
  if (g.molecule.empty()) throw ConfigError("--molecule is required");
  return io::read_molecule(g.molecule);
}

std::vector<double> parse_list(const std::vector<std::string>& raw, const char* flag) {
  std::vector<double> out;
  for (const auto& s : raw) {
    if (s.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ConfigError(std::string(flag) + ": not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

double single(const std::vector<std::string>& raw, const char* flag, double fallback) {
  if (raw.empty()) return fallback;
  const auto v = parse_list(raw, flag);
  if (v.size() != 1) throw ConfigError(std::string(flag) + " takes one value for this command");
  return v.front();
}

Axis axis_option(const std::string& s) {
  if (s.size() != 1) throw ConfigError("axis must be one of a, b, c");
  try {
    return parse_axis(s[0]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

template <class F>
std::string render(F&& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

json key_json(const StateKey& k) { return json{{"J", k.J}, {"M", k.M}, {"h", k.h}, {"tau", k.tau}, {"label", k.label()}}; }

// ---------------------------------------------------------------- levels / classify

struct LevelsOpts {
  double threshold = kDefaultClassifyThreshold;
};

int run_levels(const Global& g, const LevelsOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  const int jmax = g.jmax < 0 ? 10 : g.jmax;
  Output out(g, "levels", {{"molecule", g.molecule}, {"jmax", jmax}, {"threshold", o.threshold}});
  const RotorLevels levels(spec, jmax, Embedding{});
  out.write("levels.csv", render([&](std::ostream& os) { io::write_levels_csv(os, levels, o.threshold); }));
  return kExitOk;
}

struct ClassifyOpts {
  double threshold = kDefaultClassifyThreshold;
  std::string filter = "ground";
};

int run_classify(const Global& g, const ClassifyOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  const int jmax = g.jmax < 0 ? 20 : g.jmax;
  SymmetryFilter filter = SymmetryFilter::any;
  if (o.filter == "ground") filter = SymmetryFilter::ground_species;
  else if (o.filter != "any") throw ConfigError("--filter must be 'any' or 'ground'");
  Output out(g, "classify", {{"molecule", g.molecule}, {"jmax", jmax}, {"threshold", o.threshold}, {"filter", o.filter}});
  out.claim({"principal.csv"});
  std::ostringstream os;
  os << "J,axis,h,tau,energy_cm1,fraction,label,weak\n";
  for (int J = 1; J <= jmax; ++J) {
    for (Axis axis : {Axis::a, Axis::b, Axis::c}) {
      if (axis == Axis::b && J < 2) continue;
      PrincipalState p;
      try {
        p = find_principal_state(J, axis, spec, filter, o.threshold);
      } catch (const std::invalid_argument&) {
        continue;  // no state of the filtered species in this multiplet
      }
      const Classification c = classify_state(p.state, o.threshold);
      os << J << ',' << axis_name(axis) << ',' << p.state.h << ',' << p.state.tau << ','
         << io::format_number(p.state.energy_cm1) << ',' << io::format_number(c.barycentric[static_cast<int>(axis)])
         << ',' << label_name(c.label) << ',' << (p.weak ? 1 : 0) << '\n';
    }
  }
  out.write("principal.csv", os.str());
  return kExitOk;
}

// ---------------------------------------------------------------- path

struct PathOpts {
  int J = 14;
  std::string axis = "b";
};

int run_path(const Global& g, const PathOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  if (o.J < 0 || o.J % 2 != 0) throw ConfigError("--J must be even and non-negative");
  const Axis axis = axis_option(o.axis);
  Output out(g, "path", {{"molecule", g.molecule}, {"J", o.J}, {"axis", o.axis}});
  out.claim({"path.json"});
  const PolarizabilityCoupling coupling(spec, std::max(o.J, 0));
  const PathResult r = find_route(coupling, o.J, axis);
  if (!r.found()) {
    throw NoPath(r.message);
  }
  const PathSpec& p = *r.path;
  for (std::size_t i = 0; i < p.states.size(); ++i) {
    std::cout << p.states[i].label();
    if (i < p.hops()) std::cout << "  --" << io::format_number(p.omegas_cm1[i]) << " cm-1-->  ";
  }
  std::cout << '\n' << p.hops() << " hops\n";
  out.write("path.json", io::path_to_json(p) + "\n", {{"hops", p.hops()}, {"target", key_json(p.states.back())}});
  return kExitOk;
}

// ---------------------------------------------------------------- pulse

struct PulseOpts {
  std::string path;
  std::string handedness = "+";
  double t0 = 0.0;
  double window = 4.0;
  std::string envelope = "intensity_sinc";
  double sample_dt = 0.01;
  double t_end = -1.0;
};

CentrifugeParams pulse_params(const Global& g, const PulseOpts& o) {
  CentrifugeParams p;
  p.E0_V_per_cm = single(g.e0, "--e0", p.E0_V_per_cm);
  p.sigma_ps = single(g.sigma, "--sigma", p.sigma_ps);
  p.beta_GHz_per_ps = single(g.beta, "--beta", p.beta_GHz_per_ps);
  if (o.handedness != "+" && o.handedness != "-") throw ConfigError("--handedness must be + or -");
  p.handedness = o.handedness == "+" ? 1 : -1;
  p.t0_ps = o.t0;
  p.window_sigmas = o.window;
  if (o.envelope == "intensity_sinc") p.shape = EnvelopeShape::intensity_sinc;
  else if (o.envelope == "amplitude_sinc") p.shape = EnvelopeShape::amplitude_sinc;
  else throw ConfigError("--envelope must be intensity_sinc or amplitude_sinc");
  return p;
}

PathSpec load_path(const std::string& file) {
  if (file.empty()) throw ConfigError("--path is required");
  PathSpec p = io::path_from_json(io::read_text(file));
  if (p.states.empty()) throw ConfigError("path file holds no states");
  return p;
}

json pulse_json(const CentrifugeParams& p) {
  return json{{"E0_V_per_cm", p.E0_V_per_cm}, {"sigma_ps", p.sigma_ps}, {"beta_GHz_per_ps", p.beta_GHz_per_ps},
              {"handedness", p.handedness > 0 ? "+" : "-"}, {"t0_ps", p.t0_ps}, {"window_sigmas", p.window_sigmas},
              {"envelope", p.shape == EnvelopeShape::intensity_sinc ? "intensity_sinc" : "amplitude_sinc"}};
}

double pulse_end(const EnvelopeSchedule& s, const CentrifugeParams& p) {
  const double last = s.entries.empty() ? p.t0_ps : s.entries.back().t_ps;
  return last + p.window_sigmas * p.sigma_ps;
}

int run_pulse(const Global& g, const PulseOpts& o) {
  const PathSpec path = load_path(o.path);
  const CentrifugeParams params = pulse_params(g, o);
  params.validate();
  const EnvelopeSchedule schedule = resonance_schedule(path, params);
  const double t_end = o.t_end > 0.0 ? o.t_end : pulse_end(schedule, params);
  json cfg = pulse_json(params);
  cfg["path"] = o.path;
  cfg["sample_dt_ps"] = o.sample_dt;
  cfg["t_end_ps"] = t_end;
  Output out(g, "pulse", cfg);
  out.claim({"pulse.json", "envelope.csv"});
  json times = json::array();
  for (const auto& e : schedule.entries) times.push_back(e.t_ps);
  out.write("pulse.json", io::pulse_to_json(params, schedule) + "\n", {{"resonance_times_ps", times}},
            schedule.warnings);
  out.write("envelope.csv", render([&](std::ostream& os) {
              io::write_envelope_csv(os, schedule, params, params.t0_ps, t_end, o.sample_dt);
            }));
  return kExitOk;
}

// ---------------------------------------------------------------- propagate / sweep

struct PropagateOpts {
  PulseOpts pulse;
  int order = 2;
  int stride = 10;
  int krylov_dim = 12;
};

struct Setup {
  PathSpec path;
  std::unique_ptr<PolarizabilityCoupling> coupling;
  std::vector<StateKey> basis;
  LabPolarizability lab;
  Wavepacket initial;
  int jmax = 0;
};

Setup make_setup(const Global& g, const MoleculeSpec& spec, const std::string& path_file) {
  Setup s;
  s.path = load_path(path_file);
  const StateKey target = s.path.states.back();
  s.jmax = g.jmax < 0 ? target.J + 4 : g.jmax;
  if (s.jmax < target.J) throw ConfigError("--jmax is below the target J");
  s.coupling = std::make_unique<PolarizabilityCoupling>(spec, s.jmax);
  const StateKey start = s.path.states.front();
  s.basis = reachable_basis(*s.coupling, {start}, s.jmax);
  for (const auto& k : s.path.states) {
    if (!std::binary_search(s.basis.begin(), s.basis.end(), k, [](const StateKey& a, const StateKey& b) {
          return std::tie(a.J, a.M, a.h) < std::tie(b.J, b.M, b.h);
        })) {
      throw ConfigError("path state " + k.label() + " is not reachable from " + start.label());
    }
  }
  s.lab = build_lab_polarizability(*s.coupling, s.basis);
  s.initial = make_eigenstate_packet(*s.coupling, s.basis, start);
  return s;
}

PropagatorConfig propagator_config(const Global& g, const PropagateOpts& o, int jmax) {
  PropagatorConfig cfg;
  cfg.dt = g.dt;
  cfg.j_max = jmax;
  cfg.splitting_order = o.order;
  cfg.record_stride = o.stride;
  cfg.krylov_dim = o.krylov_dim;
  cfg.validate();
  return cfg;
}

struct RunSummary {
  double target_population = 0.0;
  StateKey largest;
  double largest_population = 0.0;
};

RunSummary summarize(const Trajectory& tr, const StateKey& target) {
  RunSummary s;
  s.target_population = tr.final_state.population(target);
  for (std::size_t i = 0; i < tr.final_state.size(); ++i) {
    const double p = std::norm(tr.final_state.amps(static_cast<Eigen::Index>(i)));
    if (p > s.largest_population) {
      s.largest_population = p;
      s.largest = tr.final_state.basis[i];
    }
  }
  return s;
}

int run_propagate(const Global& g, const PropagateOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  Centrifuge pulse;
  pulse.params = pulse_params(g, o.pulse);
  pulse.params.validate();
  Setup s = make_setup(g, spec, o.pulse.path);
  const PropagatorConfig cfg = propagator_config(g, o, s.jmax);
  pulse.schedule = resonance_schedule(s.path, pulse.params);
  const double t_end = o.pulse.t_end > 0.0 ? o.pulse.t_end : pulse_end(pulse.schedule, pulse.params);

  json config = pulse_json(pulse.params);
  config.update({{"molecule", g.molecule}, {"path", o.pulse.path}, {"dt_ps", cfg.dt}, {"jmax", s.jmax},
                 {"splitting_order", cfg.splitting_order}, {"record_stride", cfg.record_stride},
                 {"krylov_dim", cfg.krylov_dim}, {"t_end_ps", t_end}, {"basis_size", s.basis.size()}});
  Output out(g, "propagate", config);
  out.claim({"trajectory.csv", "wavepacket.json"});

  const Trajectory tr = propagate(s.initial, pulse, s.lab, t_end, cfg, s.path.states);
  const StateKey target = s.path.states.back();
  const RunSummary sum = summarize(tr, target);
  json times = json::array();
  for (const auto& e : pulse.schedule.entries) times.push_back(e.t_ps);
  std::vector<std::string> warnings = pulse.schedule.warnings;
  warnings.insert(warnings.end(), tr.warnings.begin(), tr.warnings.end());
  const json result{{"resonance_times_ps", times},
                    {"target", key_json(target)},
                    {"target_population", sum.target_population},
                    {"largest_state", key_json(sum.largest)},
                    {"largest_population", sum.largest_population},
                    {"max_norm_drift", tr.max_norm_drift},
                    {"max_outer_shell_population", tr.max_outer_shell_population},
                    {"leak_warning", tr.leak_warning},
                    {"steps", tr.steps}};
  out.write("trajectory.csv", render([&](std::ostream& os) { io::write_trajectory_csv(os, tr); }), result, warnings);
  out.write("wavepacket.json", io::wavepacket_to_json(tr.final_state) + "\n", result, warnings);
  std::cout << "target " << target.label() << " population " << sum.target_population << '\n';
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return tr.leak_warning ? kExitWarning : kExitOk;
}

int run_sweep(const Global& g, const PropagateOpts& o, int threads) {
  const MoleculeSpec spec = load_molecule(g);
  CentrifugeParams base = pulse_params(Global{}, o.pulse);
  const auto e0 = g.e0.empty() ? std::vector<double>{base.E0_V_per_cm} : parse_list(g.e0, "--e0");
  const auto sigma = g.sigma.empty() ? std::vector<double>{base.sigma_ps} : parse_list(g.sigma, "--sigma");
  const auto beta = g.beta.empty() ? std::vector<double>{base.beta_GHz_per_ps} : parse_list(g.beta, "--beta");
  if (e0.empty() || sigma.empty() || beta.empty()) throw ConfigError("sweep grid is empty");

  std::vector<CentrifugeParams> grid;
  for (double e : e0) {
    for (double s : sigma) {
      for (double b : beta) {
        CentrifugeParams p = base;
        p.E0_V_per_cm = e;
        p.sigma_ps = s;
        p.beta_GHz_per_ps = b;
        p.validate();
        grid.push_back(p);
      }
    }
  }
  Setup s = make_setup(g, spec, o.pulse.path);
  PropagatorConfig cfg = propagator_config(g, o, s.jmax);
  cfg.record_stride = 1 << 30;
  Output out(g, "sweep", {{"molecule", g.molecule}, {"path", o.pulse.path}, {"e0", e0}, {"sigma", sigma},
                          {"beta", beta}, {"dt_ps", cfg.dt}, {"jmax", s.jmax},
                          {"splitting_order", cfg.splitting_order}, {"window_sigmas", base.window_sigmas}});
  out.claim({"sweep.csv"});

  const StateKey target = s.path.states.back();
  std::vector<RunSummary> rows(grid.size());
  std::vector<Trajectory> runs(grid.size());
  std::vector<std::string> errors(grid.size());
  const unsigned n_workers = std::max(1u, std::min<unsigned>(threads > 0 ? threads : std::thread::hardware_concurrency(),
                                                             static_cast<unsigned>(grid.size())));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < grid.size(); i += n_workers) {
      try {
        Centrifuge pulse{grid[i], resonance_schedule(s.path, grid[i])};
        runs[i] = propagate(s.initial, pulse, s.lab, pulse_end(pulse.schedule, grid[i]), cfg, {target});
        rows[i] = summarize(runs[i], target);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericError(e);
  }

  std::ostringstream os;
  os << "E0_V_per_cm,sigma_ps,beta_GHz_per_ps,target_population,largest_state,largest_population,max_norm_drift,leak_warning\n";
  bool any_leak = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    any_leak |= runs[i].leak_warning;
    os << io::format_number(grid[i].E0_V_per_cm) << ',' << io::format_number(grid[i].sigma_ps) << ','
       << io::format_number(grid[i].beta_GHz_per_ps) << ',' << io::format_number(rows[i].target_population) << ','
       << '"' << rows[i].largest.label() << '"' << ',' << io::format_number(rows[i].largest_population) << ','
       << io::format_number(runs[i].max_norm_drift) << ',' << (runs[i].leak_warning ? 1 : 0) << '\n';
  }
  out.write("sweep.csv", os.str(), {{"grid_points", grid.size()}, {"target", key_json(target)}, {"leak_warning", any_leak}});
  return any_leak ? kExitWarning : kExitOk;
}

// ---------------------------------------------------------------- observe / density

struct SourceOpts {
  std::string wavepacket;
  std::string state;
  std::string coherence;
  std::vector<int> j_range;
  std::string phases = "flat";
  std::vector<double> weights;
  double min_population = 1e-8;
};

StatePacket make_packet(const Global& g, const MoleculeSpec& spec, const SourceOpts& o, json& cfg) {
  const int sources = !o.wavepacket.empty() + !o.state.empty() + !o.coherence.empty();
  if (sources != 1) throw ConfigError("give exactly one of --wavepacket, --state, --coherence");
  if (!o.wavepacket.empty()) {
    cfg["wavepacket"] = o.wavepacket;
    cfg["min_population"] = o.min_population;
    const Wavepacket wp = io::wavepacket_from_json(io::read_text(o.wavepacket));
    int jmax = 0;
    for (const auto& k : wp.basis) jmax = std::max(jmax, k.J);
    const RotorLevels levels(spec, jmax, Embedding::with_z(Axis::b));
    return packet_from_wavepacket(wp, levels, o.min_population);
  }
  if (!o.state.empty()) {
    cfg["state"] = o.state;
    const StateKey k = io::parse_state_label(o.state);
    const RotorLevels levels(spec, k.J, Embedding::with_z(Axis::b));
    try {
      k.validate();
      const RotorState& st = levels.state(k.J, k.h);
      if (st.tau != k.tau) throw ConfigError("state " + o.state + " has the wrong parity label");
      StatePacket packet;
      packet.embedding = levels.embedding();
      packet.components.push_back(component_from_state(st, k.M, 1.0));
      return packet;
    } catch (const std::out_of_range& e) {
      throw ConfigError(e.what());
    }
  }
  CoherenceSpec c;
  c.axis = axis_option(o.coherence);
  if (o.j_range.size() != 2) throw ConfigError("--j-range takes two values: first,last");
  c.j_min = o.j_range[0];
  c.j_max = o.j_range[1];
  c.weights = o.weights;
  if (o.phases == "random") c.random_phases = true;
  else if (o.phases != "flat") throw ConfigError("--phases must be flat or random");
  c.seed = g.seed;
  c.validate();
  cfg["coherence"] = {{"axis", o.coherence}, {"j_range", o.j_range}, {"phases", o.phases}, {"weights", o.weights}};
  return resolve_coherence(c, spec);
}

struct ObserveOpts {
  SourceOpts source;
  std::vector<std::string> cosines{"aXZ", "bZX", "cXY"};
  double t_begin = 0.0;
  double t_end = 0.0;
  int points = 1;
  int batches = 64;
  int threads = 0;
};

int run_observe(const Global& g, const ObserveOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  json cfg{{"molecule", g.molecule}, {"samples", g.samples}, {"batches", o.batches}, {"cosines", o.cosines},
           {"t_begin_ps", o.t_begin}, {"t_end_ps", o.t_end}, {"points", o.points}};
  const StatePacket packet = make_packet(g, spec, o.source, cfg);
  std::vector<CosineSpec> cos;
  for (const auto& c : o.cosines) {
    try {
      cos.push_back(parse_cosine(c));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.points < 1) throw ConfigError("--points must be positive");
  std::vector<double> times;
  for (int i = 0; i < o.points; ++i) {
    times.push_back(o.points == 1 ? o.t_begin : o.t_begin + (o.t_end - o.t_begin) * i / (o.points - 1));
  }
  Output out(g, "observe", cfg);
  out.claim({"trace.csv"});
  MonteCarloConfig mc;
  mc.samples = g.samples;
  mc.seed = g.seed;
  mc.batches = o.batches;
  mc.threads = o.threads;
  const AlignmentTrace trace = alignment_trace(packet, cos, times, mc);
  json summary = json::object();
  for (std::size_t i = 0; i < trace.names.size(); ++i) {
    summary[trace.names[i]] = {{"max", trace.max(i)}, {"min", trace.min(i)}, {"skipped", trace.skipped[i]}};
  }
  out.write("trace.csv", render([&](std::ostream& os) { io::write_trace_csv(os, trace); }), summary);
  return kExitOk;
}

struct DensityOpts {
  SourceOpts source;
  double time = 0.0;
};

int run_density(const Global& g, const DensityOpts& o, bool samples_given) {
  const MoleculeSpec spec = load_molecule(g);
  if (spec.geometry.empty()) throw ConfigError("molecule file has no geometry");
  const long n = samples_given ? g.samples : 2000;
  json cfg{{"molecule", g.molecule}, {"samples", n}, {"t_ps", o.time}};
  const StatePacket packet = make_packet(g, spec, o.source, cfg);
  Output out(g, "density", cfg);
  out.claim({"cloud.xyz"});
  const auto cloud = density_cloud(packet, o.time, spec.geometry, n, g.seed);
  std::ostringstream comment;
  comment << spec.name << " t_ps=" << io::format_number(o.time) << " orientations=" << n << " seed=" << g.seed;
  out.write("cloud.xyz", render([&](std::ostream& os) { io::write_xyz(os, cloud, comment.str()); }));
  return kExitOk;
}

// ---------------------------------------------------------------- axisdist

struct AxisDistOpts {
  int J = 10;
  std::string axis = "b";
  int h = 0;
  int n_theta = 91;
  int n_phi = 181;
  std::string filter = "ground";
};

int run_axisdist(const Global& g, const AxisDistOpts& o) {
  const MoleculeSpec spec = load_molecule(g);
  const Axis axis = axis_option(o.axis);
  if (o.n_theta < 2 || o.n_phi < 2) throw ConfigError("grid needs at least 2 points per angle");
  RotorState state;
  if (o.h > 0) {
    const RotorLevels levels(spec, o.J, Embedding::with_z(axis));
    try {
      state = levels.state(o.J, o.h);
    } catch (const std::out_of_range& e) {
      throw ConfigError(e.what());
    }
  } else {
    if (o.filter != "ground" && o.filter != "any") throw ConfigError("--filter must be 'any' or 'ground'");
    const auto f = o.filter == "ground" ? SymmetryFilter::ground_species : SymmetryFilter::any;
    state = find_principal_state(o.J, axis, spec, f).state;
  }
  Output out(g, "axisdist", {{"molecule", g.molecule}, {"J", o.J}, {"axis", o.axis}, {"h", state.h},
                             {"n_theta", o.n_theta}, {"n_phi", o.n_phi}, {"filter", o.filter}});
  out.claim({"axisdist.csv"});
  const AxisDistribution d = rotation_axis_distribution(state, o.n_theta, o.n_phi);
  out.write("axisdist.csv", render([&](std::ostream& os) { io::write_axis_distribution_csv(os, d); }),
            {{"state", {{"J", state.J}, {"h", state.h}, {"tau", state.tau}}}, {"body_z", std::string(1, axis_name(axis))}});
  return kExitOk;
}

void add_source_options(CLI::App* sub, SourceOpts& s) {
  sub->add_option("--wavepacket", s.wavepacket, "wavepacket JSON from 'propagate'");
  sub->add_option("--state", s.state, "single eigenstate, e.g. '|20,20,25,+>'");
  sub->add_option("--coherence", s.coherence, "principal axis of a Delta J = 2 coherence (a, b, c)");
  sub->add_option("--j-range", s.j_range, "first,last member J of the coherence")->delimiter(',');
  sub->add_option("--phases", s.phases, "flat or random (seeded by --seed)");
  sub->add_option("--weights", s.weights, "member weights |c_J|")->delimiter(',');
  sub->add_option("--min-pop", s.min_population, "drop wavepacket components below this population");
}

void add_pulse_options(CLI::App* sub, PulseOpts& p) {
  sub->add_option("--path", p.path, "path JSON from 'path'")->required();
  sub->add_option("--handedness", p.handedness, "+ raises M, - lowers it");
  sub->add_option("--t0", p.t0, "pulse start, ps");
  sub->add_option("--window", p.window, "sinc lobe cut-off in units of sigma");
  sub->add_option("--envelope", p.envelope, "intensity_sinc or amplitude_sinc");
  sub->add_option("--t-end", p.t_end, "end time, ps (default: last resonance + window)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rotcoh: rotational state preparation and alignment of asymmetric tops"};
  app.set_version_flag("--version", std::string(ROTCOH_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--molecule", g.molecule, "molecule JSON");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--jmax", g.jmax, "largest J");
  auto* samples_opt = app.add_option("--samples", g.samples, "Monte-Carlo samples");
  app.add_option("--e0", g.e0, "peak field, V/cm (comma list for sweep)")->delimiter(',');
  app.add_option("--sigma", g.sigma, "envelope width, ps (comma list for sweep)")->delimiter(',');
  app.add_option("--beta", g.beta, "acceleration, GHz/ps (comma list for sweep)")->delimiter(',');
  app.add_option("--dt", g.dt, "propagation step, ps");
  app.add_flag("--force", g.force, "overwrite existing outputs");

  LevelsOpts levels;
  auto* c_levels = app.add_subcommand("levels", "rotational levels with barycentric coordinates");
  c_levels->add_option("--threshold", levels.threshold, "classification threshold");

  ClassifyOpts classify;
  auto* c_classify = app.add_subcommand("classify", "principal a/b/c states per multiplet");
  c_classify->add_option("--threshold", classify.threshold, "classification threshold");
  c_classify->add_option("--filter", classify.filter, "ground (Raman-accessible species) or any");

  PathOpts path;
  auto* c_path = app.add_subcommand("path", "strongest Delta J = 2 excitation route");
  c_path->add_option("--J", path.J, "target J (even)");
  c_path->add_option("--axis", path.axis, "target principal axis");

  PulseOpts pulse;
  auto* c_pulse = app.add_subcommand("pulse", "centrifuge schedule and sampled envelope");
  add_pulse_options(c_pulse, pulse);
  c_pulse->add_option("--sample-dt", pulse.sample_dt, "envelope sampling step, ps");

  PropagateOpts prop;
  auto* c_prop = app.add_subcommand("propagate", "time-dependent run along a path");
  add_pulse_options(c_prop, prop.pulse);
  c_prop->add_option("--order", prop.order, "splitting order (2 or 4)");
  c_prop->add_option("--stride", prop.stride, "record every n-th step");
  c_prop->add_option("--krylov-dim", prop.krylov_dim, "Lanczos subspace size");

  PropagateOpts sweep;
  int sweep_threads = 0;
  auto* c_sweep = app.add_subcommand("sweep", "final target population over an (E0, sigma, beta) grid");
  add_pulse_options(c_sweep, sweep.pulse);
  c_sweep->add_option("--order", sweep.order, "splitting order (2 or 4)");
  c_sweep->add_option("--threads", sweep_threads, "worker threads (0: hardware)");

  ObserveOpts observe;
  auto* c_observe = app.add_subcommand("observe", "Monte-Carlo alignment cosines over time");
  add_source_options(c_observe, observe.source);
  c_observe->add_option("--cosines", observe.cosines, "e.g. aXZ,bZX,cXY,phichi")->delimiter(',');
  c_observe->add_option("--t-begin", observe.t_begin, "first time, ps");
  c_observe->add_option("--t-end", observe.t_end, "last time, ps");
  c_observe->add_option("--points", observe.points, "number of time points");
  c_observe->add_option("--batches", observe.batches, "independent MC substreams");
  c_observe->add_option("--threads", observe.threads, "worker threads (0: hardware)");

  DensityOpts density;
  auto* c_density = app.add_subcommand("density", "orientation cloud of atom positions (XYZ)");
  add_source_options(c_density, density.source);
  c_density->add_option("--time", density.time, "time, ps");

  AxisDistOpts axisdist;
  auto* c_axis = app.add_subcommand("axisdist", "rotation-axis distribution of a principal state");
  c_axis->add_option("--J", axisdist.J, "J");
  c_axis->add_option("--axis", axisdist.axis, "principal axis");
  c_axis->add_option("--rank", axisdist.h, "explicit energy rank instead of the principal state");
  c_axis->add_option("--ntheta", axisdist.n_theta, "polar grid points");
  c_axis->add_option("--nphi", axisdist.n_phi, "azimuth grid points");
  c_axis->add_option("--filter", axisdist.filter, "ground or any");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*c_levels) return run_levels(g, levels);
    if (*c_classify) return run_classify(g, classify);
    if (*c_path) return run_path(g, path);
    if (*c_pulse) return run_pulse(g, pulse);
    if (*c_prop) return run_propagate(g, prop);
    if (*c_sweep) return run_sweep(g, sweep, sweep_threads);
    if (*c_observe) return run_observe(g, observe);
    if (*c_density) return run_density(g, density, samples_opt->count() > 0);
    if (*c_axis) return run_axisdist(g, axisdist);
  } catch (const NoPath& e) {
    std::cerr << "no path: " << e.what() << '\n';
    return kExitNoPath;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}
