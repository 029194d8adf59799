#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mec/algorithms.hpp"
#include "mec/scenario.hpp"

namespace mec {

struct SweepSpec {
  ScenarioConfig config;  // config.seed is ignored; `seeds` replaces it
  SweepAxis axis = SweepAxis::kEnergyDb;
  std::vector<double> values;
  std::vector<SchemeLabel> schemes;
  std::vector<std::uint64_t> seeds;
  bool regenerate = true;
  int jobs = 1;
  bool timing = true;            // false writes wall_ms = 0 so files compare byte for byte
  SchemeOptions scheme_options;  // seed is overridden per row
};

struct SweepRow {
  SchemeLabel scheme = SchemeLabel::kProposed;
  SweepAxis axis = SweepAxis::kEnergyDb;
  double value = 0.0;
  std::uint64_t seed = 0;
  double objective = 0.0;
  bool feasible = false;
  double wall_ms = 0.0;
  std::string message;
};

struct SweepResult {
  std::vector<SweepRow> rows;      // ordered by (value, seed, scheme)
  std::vector<int> regenerations;  // per seed, aligned with spec.seeds
};

// One instance per seed is drawn at the hardest axis value (lowest budget,
// fastest helpers, most tasks) and then rewritten for every axis value, so
// all values of a seed share their randomness. Throws std::invalid_argument
// for unusable specs.
SweepResult run_sweep(const SweepSpec& spec);

inline constexpr const char* kSweepCsvHeader =
    "scheme,axis,value,seed,objective_s,feasible,wall_ms";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct SchemeMean {
  SchemeLabel scheme;
  double value;
  double mean_objective;  // over feasible rows; NaN when none
  int feasible;
  int total;
};

// Means per (value, scheme) in row order.
std::vector<SchemeMean> summarize(const std::vector<SweepRow>& rows);

}  // namespace mec
