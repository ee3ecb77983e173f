#pragma once

// File formats: molecule/path/pulse/wavepacket JSON and the CSV / XYZ outputs.
// CSV: comma separated, '.' decimal, header row, LF line endings.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotcoh/centrifuge.hpp"
#include "rotcoh/coupling.hpp"
#include "rotcoh/dynamics.hpp"
#include "rotcoh/observables.hpp"
#include "rotcoh/rotor.hpp"

namespace rotcoh::io {

// Malformed or unreadable input.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::filesystem::path& path);

// {name, A_GHz, B_GHz, C_GHz, alpha_au:{aa,bb,cc}, geometry:[{atom, x_A, y_A, z_A, mass_amu?}]}
// with x, y, z along the a, b, c principal axes.
MoleculeSpec parse_molecule(const std::string& json_text);
MoleculeSpec read_molecule(const std::filesystem::path& path);
std::string molecule_to_json(const MoleculeSpec& spec);

std::string format_number(double x);  // shortest round-trip decimal

// J, h, tau, energy, barycentric coordinates, label; `degenerate` marks states sharing an
// energy with another member of the multiplet (relative gap below 1e-9).
void write_levels_csv(std::ostream& os, const RotorLevels& levels, double threshold);

// [{J, M, h, tau, energy_cm1, omega_to_next_cm1, moment_to_next_au}]; the last record has
// null for the "to next" fields.
std::string path_to_json(const PathSpec& path);
PathSpec path_from_json(const std::string& json_text);

// {E0_V_per_cm, beta_GHz_per_ps, sigma_ps, handedness, t0_ps, schedule:[{t_ps, from, to, omega_cm1}]}
std::string pulse_to_json(const CentrifugeParams& params, const EnvelopeSchedule& schedule);
void pulse_from_json(const std::string& json_text, CentrifugeParams& params, EnvelopeSchedule& schedule);
StateKey parse_state_label(const std::string& label);  // "|J,M,h,+>"

void write_envelope_csv(std::ostream& os, const EnvelopeSchedule& schedule,
                        const CentrifugeParams& params, double t_begin, double t_end, double dt);

std::string population_column(const StateKey& key);  // P_J14_M14_h17_t0
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);

// {t_ps, states:[{J, M, h, tau, energy_cm1, re, im}]}
std::string wavepacket_to_json(const Wavepacket& wp);
Wavepacket wavepacket_from_json(const std::string& json_text);

void write_trace_csv(std::ostream& os, const AlignmentTrace& trace);
void write_xyz(std::ostream& os, const std::vector<CloudPoint>& cloud, const std::string& comment);
void write_axis_distribution_csv(std::ostream& os, const AxisDistribution& dist);

}  // namespace rotcoh::io
