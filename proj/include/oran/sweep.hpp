#pragma once

#include <map>
#include <string>
#include <vector>

#include "oran/config.hpp"
#include "oran/esa.hpp"

namespace oran {

enum class SweepVariable { NumUes, PRuMax, PSliceMax, LabeledCount };

SweepVariable sweep_variable_from_name(const std::string& name);
const char* sweep_variable_name(SweepVariable v);

// Applies one sweep value to the base scenario. NumUes splits the total
// between eMBB (ceil) and URLLC (rest); PSliceMax sets every slice cap.
// LabeledCount leaves the scenario untouched (it selects checkpoints).
NetworkConfig apply_sweep_value(const NetworkConfig& base, SweepVariable var,
                                double value);

struct ScenarioSweep {
  NetworkConfig base_cfg;
  SweepVariable variable = SweepVariable::NumUes;
  std::vector<double> values;   // nonempty, strictly increasing
  std::vector<uint64_t> seeds;  // one cell per (value, seed)
  std::vector<std::string> solvers;  // esa | dqn | ssvae
  // Per-solver checkpoint paths aligned with `values` (esa needs none).
  std::map<std::string, std::vector<std::string>> checkpoints;
  int grid_levels = 4;
  unsigned long long budget = 50'000'000ULL;
  int dqn_horizon = 50;

  void validate() const;
};

struct SweepCell {
  std::string solver;
  double value = 0.0;
  uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double objective = 0.0;
  size_t violations = 0;
  unsigned long long evaluated = 0;  // ESA lattice coverage; 0 otherwise
  unsigned long long feasible = 0;
  double wall_time_s = 0.0;  // provenance sidecar only, never in the CSV
};

struct ComparisonReport {
  std::vector<SweepCell> cells;  // ordered by (solver, value, seed)

  bool all_failed() const;
  bool any_ok() const;
};

// Executes every (solver, value, seed) cell. Per-cell failures are recorded
// and the run continues. The power grid for cap sweeps is built once from
// the base scenario so raising a cap keeps the same quantized levels (the
// feasible set then grows monotonically).
ComparisonReport run_sweep(const ScenarioSweep& sweep);

// Deterministic CSV: fixed column order documented in the header comment
// line, 9-significant-digit numbers, aggregate mean/stddev rows per
// (solver, value) at the end.
void write_report_csv(const ComparisonReport& rep, const ScenarioSweep& sweep,
                      const std::string& path);

// JSON sidecar with config hash, checkpoint hashes, and per-cell wall times.
void write_report_provenance(const ComparisonReport& rep, const ScenarioSweep& sweep,
                             const std::string& config_text, const std::string& path);

// --- complexity counters ---

struct ComplexityRow {
  std::string solver;
  std::string instance;
  std::string measured;       // counted during the run
  std::string predicted;      // formula value
  std::string formula;        // formula text
  double wall_time_s = 0.0;
};

std::string render_complexity_table(const std::vector<ComplexityRow>& rows);

}  // namespace oran
