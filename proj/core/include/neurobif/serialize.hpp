#pragma once

// Artifact formats. CSV: header row, comma separated, numbers in scientific
// notation with 17 significant digits, so doubles round-trip exactly.
// JSON: two-space indentation, keys in a fixed order.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "neurobif/codim2.hpp"
#include "neurobif/cycles.hpp"
#include "neurobif/equilibria.hpp"
#include "neurobif/scenarios.hpp"

namespace neurobif {

std::string format_double(double v);
double parse_double(const std::string& text, const std::string& where = "");

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;   // throws ConfigError when absent
};

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// Written to a sibling temp file, then renamed over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// bifpoints.json: [{kind, plane: {names}, coords: {...}, diagnostics: {...}, label, warnings}]
std::string bifpoints_to_json(const std::vector<BifurcationPoint>& points);
std::vector<BifurcationPoint> bifpoints_from_json(const std::string& text);

// branch.csv: X, P, state components, n_unstable, stable, max_real.
CsvTable branch_table(const EquilibriumBranch& branch);

// curves.csv: curve, kind, theta, P, X, fold.
CsvTable curves_table(const PlaneAnalysis& plane);

struct CycleRow {
    int branch = 0;
    double P = 0.0;
    double period = 0.0;
    double freq_hz = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    double max_nontrivial = 0.0;
    bool stable = false;
    Band band = Band::alpha;
    std::string event;   // empty, or the event kind at this point
};

// cycles.csv: branch, P, period, freq_hz, x_min, x_max,
// max_nontrivial_multiplier_modulus, stable, band, event.
std::vector<CycleRow> cycle_rows(const CycleSet& set, double a = 100.0);
CsvTable cycles_table(const std::vector<CycleRow>& rows);
std::vector<CycleRow> cycles_from_table(const CsvTable& table);

// flc.csv: theta, P, period.
CsvTable flc_table(const FlcCurve& curve);

// traj.csv: tau, state components, P_inst.
CsvTable traj_table(const SdeTrajectory& traj);
SdeTrajectory traj_from_table(const CsvTable& table);

// spikes.csv: time, amplitude, is_pds.
CsvTable spikes_table(const SpikeTrain& spikes);
SpikeTrain spikes_from_table(const CsvTable& table);

// phases.json: [{phase, start, end}]
std::string phases_to_json(const std::vector<Phase>& phases);
std::vector<Phase> phases_from_json(const std::string& text);

// Re-serializes a JSON document in the canonical layout used for every
// JSON artifact (used for round-trip checks of manifest.json).
std::string canonical_json(const std::string& text);

}  // namespace neurobif
