#include "mec/scenario.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mec/convex_core.hpp"

namespace mec {
namespace {

enum Stream : std::uint32_t { kTaskStream = 1, kDistanceStream, kUplinkStream, kDownlinkStream };

// mt19937_64 output is specified by the standard; the distributions are not,
// so uniforms are built from the raw bits.
class Stream64 {
 public:
  Stream64(std::uint64_t seed, std::uint32_t stream, std::uint32_t attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      stream, attempt};
    engine_.seed(seq);
  }
  // [0, 1)
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  double exponential() { return -std::log1p(-unit()); }

 private:
  std::mt19937_64 engine_;
};

Node make_node(double freq, double kappa, double budget, std::size_t num_tasks) {
  Node n;
  n.cpu_freq = freq;
  n.kappa = kappa;
  n.energy_budget = budget;
  n.cycles_per_bit.assign(num_tasks, 0.0);
  return n;
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<Violation> validate_config(const ScenarioConfig& c) {
  std::vector<Violation> out;
  auto positive = [&](const char* field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back({field, "must be positive and finite"});
  };
  auto finite = [&](const char* field, double v) {
    if (!std::isfinite(v)) out.push_back({field, "must be finite"});
  };
  if (c.num_helpers < 1) out.push_back({"num_helpers", "must be at least 1"});
  if (c.num_tasks < 1) out.push_back({"num_tasks", "must be at least 1"});
  positive("bandwidth_hz", c.bandwidth_hz);
  finite("noise_db", c.noise_db);
  positive("kappa", c.kappa);
  positive("local_freq_hz", c.local_freq_hz);
  positive("helper_freq_hz", c.helper_freq_hz);
  finite("energy_budget_db", c.energy_budget_db);
  if (!(c.cell_radius_m >= 1.0) || !std::isfinite(c.cell_radius_m)) {
    out.push_back({"cell_radius_m", "must be at least 1 m"});
  }
  positive("input_bits_max", c.input_bits_max);
  positive("output_bits_max", c.output_bits_max);
  positive("cycles_per_bit_max", c.cycles_per_bit_max);
  positive("pathloss_exponent", c.pathloss_exponent);
  finite("pathloss_ref_db_at_1m", c.pathloss_ref_db_at_1m);
  return out;
}

Instance generate_instance(const ScenarioConfig& config, std::uint32_t attempt) {
  if (const auto v = validate_config(config); !v.empty()) {
    throw std::invalid_argument(
        fmt::format("invalid scenario config: {}: {}", v[0].field, v[0].reason));
  }
  const std::size_t K = config.num_helpers;
  const std::size_t L = config.num_tasks;
  const double budget = db_to_linear(config.energy_budget_db);

  Instance inst;
  inst.bandwidth = config.bandwidth_hz;
  inst.local = make_node(config.local_freq_hz, config.kappa, budget, L);
  inst.helpers.assign(K, make_node(config.helper_freq_hz, config.kappa, budget, L));

  Stream64 tasks(config.seed, kTaskStream, attempt);
  inst.tasks.resize(L);
  for (std::size_t l = 0; l < L; ++l) {
    inst.tasks[l].input_bits = tasks.uniform(0.0, config.input_bits_max);
    inst.tasks[l].output_bits = tasks.uniform(0.0, config.output_bits_max);
    inst.local.cycles_per_bit[l] = tasks.uniform(0.0, config.cycles_per_bit_max);
    for (Node& h : inst.helpers)
      h.cycles_per_bit[l] = tasks.uniform(0.0, config.cycles_per_bit_max);
  }

  Stream64 distance(config.seed, kDistanceStream, attempt);
  Stream64 uplink(config.seed, kUplinkStream, attempt);
  Stream64 downlink(config.seed, kDownlinkStream, attempt);
  const double noise = db_to_linear(config.noise_db);
  const double ref = db_to_linear(config.pathloss_ref_db_at_1m);
  inst.channels.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double d = distance.uniform(1.0, config.cell_radius_m);
    const double large = ref * std::pow(d, -config.pathloss_exponent);
    inst.channels[k].uplink_gain = large * uplink.exponential() / noise;
    inst.channels[k].downlink_gain = large * downlink.exponential() / noise;
  }
  return inst;
}

GeneratedInstance generate_feasible_instance(const ScenarioConfig& config, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Instance inst = generate_instance(config, static_cast<std::uint32_t>(attempt));
    if (sufficient_feasibility(inst).ok) return {std::move(inst), attempt};
  }
  throw std::runtime_error(
      fmt::format("seed {}: no instance passing the sufficient feasibility check in {} draws",
                  config.seed, max_attempts));
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kEnergyDb:
      return "energy_db";
    case SweepAxis::kHelperFreq:
      return "helper_freq";
    case SweepAxis::kNumTasks:
      return "num_tasks";
  }
  return "unknown";
}

SweepAxis parse_axis(std::string_view name) {
  for (SweepAxis a : {SweepAxis::kEnergyDb, SweepAxis::kHelperFreq, SweepAxis::kNumTasks}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument(fmt::format("unknown axis '{}'", name));
}

namespace {

std::size_t task_count(double value) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw std::invalid_argument(fmt::format("num_tasks must be a positive integer, got {}", value));
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

void apply_axis(ScenarioConfig& config, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::kEnergyDb:
      config.energy_budget_db = value;
      break;
    case SweepAxis::kHelperFreq:
      config.helper_freq_hz = value;
      break;
    case SweepAxis::kNumTasks:
      config.num_tasks = task_count(value);
      break;
  }
}

Instance apply_axis(const Instance& instance, SweepAxis axis, double value) {
  Instance out = instance;
  switch (axis) {
    case SweepAxis::kEnergyDb: {
      const double e = db_to_linear(value);
      out.local.energy_budget = e;
      for (Node& h : out.helpers) h.energy_budget = e;
      break;
    }
    case SweepAxis::kHelperFreq:
      for (Node& h : out.helpers) h.cpu_freq = value;
      break;
    case SweepAxis::kNumTasks: {
      const std::size_t L = task_count(value);
      if (L > out.tasks.size()) {
        throw std::invalid_argument(
            fmt::format("cannot grow an instance from {} to {} tasks", out.tasks.size(), L));
      }
      out.tasks.resize(L);
      out.local.cycles_per_bit.resize(L);
      for (Node& h : out.helpers) h.cycles_per_bit.resize(L);
      break;
    }
  }
  return out;
}

std::optional<Preset> find_preset(std::string_view name) {
  Preset p;
  p.name = std::string(name);
  if (name == "fig2") {
    p.axis = SweepAxis::kEnergyDb;
    p.values = {-20.0, -17.5, -15.0, -12.5, -10.0, -7.5, -5.0};
  } else if (name == "fig3") {
    p.config.num_tasks = 6;
    p.axis = SweepAxis::kHelperFreq;
    p.values = {0.5e9, 1e9, 1.5e9, 2e9, 2.5e9, 3e9};
    // Faster helpers burn more energy per cycle; heuristics are expected to
    // break their budgets here, so instances are not filtered.
    p.regenerate = false;
  } else if (name == "fig4") {
    p.config.num_helpers = 4;
    p.config.energy_budget_db = -10.0;
    p.axis = SweepAxis::kNumTasks;
    p.values = {2, 4, 6, 8, 10};
  } else {
    return std::nullopt;
  }
  return p;
}

}  // namespace mec
