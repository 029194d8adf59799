#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mec/model.hpp"

namespace mec {

// 10^(x/10).
double db_to_linear(double db);

// Noise is read as dB re 1 W and the budget as dB re 1 J.
struct ScenarioConfig {
  std::size_t num_helpers = 5;
  std::size_t num_tasks = 10;
  double bandwidth_hz = 312500.0;
  double noise_db = -144.0;
  double kappa = 1e-28;
  double local_freq_hz = 1e9;
  double helper_freq_hz = 2e9;
  double energy_budget_db = -20.0;
  double cell_radius_m = 500.0;
  double input_bits_max = 1e4;
  double output_bits_max = 1e3;
  double cycles_per_bit_max = 1e3;
  double pathloss_exponent = 3.0;
  double pathloss_ref_db_at_1m = -40.0;
  std::uint64_t seed = 0;
};

// Empty iff the config is usable.
std::vector<Violation> validate_config(const ScenarioConfig& config);

// Deterministic in (config, attempt). Tasks are drawn one at a time, so the
// first L tasks of a larger instance equal the instance drawn with L tasks.
Instance generate_instance(const ScenarioConfig& config, std::uint32_t attempt = 0);

struct GeneratedInstance {
  Instance instance;
  int regenerations = 0;
};

// Redraws with fresh sub-seeds until sufficient_feasibility holds. Throws
// std::runtime_error when `max_attempts` draws all fail.
GeneratedInstance generate_feasible_instance(const ScenarioConfig& config,
                                             int max_attempts = 10000);

enum class SweepAxis { kEnergyDb, kHelperFreq, kNumTasks };

std::string_view to_string(SweepAxis axis);
// Throws std::invalid_argument for unknown names.
SweepAxis parse_axis(std::string_view name);

void apply_axis(ScenarioConfig& config, SweepAxis axis, double value);

// Rewrites an instance as if it had been generated with the axis field set to
// `value`. For kNumTasks the value must not exceed the current task count.
Instance apply_axis(const Instance& instance, SweepAxis axis, double value);

struct Preset {
  std::string name;
  ScenarioConfig config;
  SweepAxis axis = SweepAxis::kEnergyDb;
  std::vector<double> values;
  bool regenerate = true;  // redraw instances failing sufficient_feasibility
};

// fig2, fig3, fig4; std::nullopt for unknown names.
std::optional<Preset> find_preset(std::string_view name);

}  // namespace mec
