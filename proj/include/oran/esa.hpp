#pragma once

#include <functional>
#include <string>

#include "oran/allocation.hpp"
#include "oran/power_grid.hpp"

namespace oran {

std::string u128_to_string(unsigned __int128 v);

// Size of the decision lattice. `exact` is the true number of structurally
// valid (alpha, beta, power) combinations; `paper_formula` is the published
// cost expression (U*B)*(M+1)!*P_levels, reported as-is even though it does
// not describe the same lattice.
struct StructuralCount {
  unsigned __int128 exact = 0;
  bool exact_saturated = false;
  unsigned __int128 paper_formula = 0;
  bool paper_saturated = false;

  std::string exact_str() const;
  std::string paper_str() const;
};

StructuralCount structural_count(const NetworkConfig& cfg, const PowerGrid& grid);

struct EsaOptions {
  // Enumeration refuses to start when the exact lattice size exceeds this.
  unsigned long long budget = 50'000'000ULL;
  // Skip subtrees whose partial RU power already exceeds the cap. Skipped
  // leaves are provably infeasible and are still counted in evaluated_count,
  // so the counters always equal the exact lattice size.
  bool prune_power_cap = true;
};

struct SolveResult {
  Allocation best_alloc;
  double best_value = 0.0;
  unsigned long long feasible_count = 0;
  unsigned long long evaluated_count = 0;
  double wall_time_s = 0.0;

  bool found() const { return feasible_count > 0; }
};

// Streams every structurally valid allocation (association, PRB grants with
// one UE per (b,m,s) slot, nonzero power level on every active grant) in a
// fixed order: association vectors lexicographic in UE index, then per-slot
// choices in (m, b, s) order with options ordered none < (ue, level)
// ascending. The visitor returns false to stop early.
// Throws BudgetError with the exact count before yielding anything if the
// lattice exceeds `budget`.
void enumerate_allocations(const NetworkConfig& cfg, const PowerGrid& grid,
                           unsigned long long budget,
                           const std::function<bool(const Allocation&)>& visitor);

// Exhaustive search for the feasible allocation maximizing the weighted
// throughput. Ties break to the first maximizer in enumeration order.
// feasible_count == 0 (no feasible allocation) is a valid result, not an
// error.
SolveResult solve_esa(const ChannelTensor& h, const NetworkConfig& cfg,
                      const PowerGrid& grid, const EsaOptions& opts = {});

}  // namespace oran
