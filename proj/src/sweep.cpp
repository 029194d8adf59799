#include "mec/sweep.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mec {
namespace {

double hardest_value(SweepAxis axis, const std::vector<double>& values) {
  switch (axis) {
    case SweepAxis::kEnergyDb:
      return *std::min_element(values.begin(), values.end());
    case SweepAxis::kHelperFreq:
    case SweepAxis::kNumTasks:
      return *std::max_element(values.begin(), values.end());
  }
  return values.front();
}

// Runs fn(i) for i in [0, count) on up to `jobs` threads; rethrows the first
// failure by index.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void check_spec(const SweepSpec& spec) {
  if (spec.values.empty()) throw std::invalid_argument("sweep needs at least one axis value");
  if (spec.schemes.empty()) throw std::invalid_argument("sweep needs at least one scheme");
  if (spec.seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("axis values must be finite");
    if (spec.axis == SweepAxis::kHelperFreq && !(v > 0.0)) {
      throw std::invalid_argument("helper frequencies must be positive");
    }
    ScenarioConfig probe = spec.config;
    apply_axis(probe, spec.axis, v);  // validates task counts
  }
  ScenarioConfig probe = spec.config;
  apply_axis(probe, spec.axis, hardest_value(spec.axis, spec.values));
  if (const auto v = validate_config(probe); !v.empty()) {
    throw std::invalid_argument(
        fmt::format("invalid scenario config: {}: {}", v[0].field, v[0].reason));
  }
  if (std::find(spec.schemes.begin(), spec.schemes.end(), SchemeLabel::kExhaustive) !=
      spec.schemes.end()) {
    double count =
        std::pow(static_cast<double>(probe.num_helpers + 1), static_cast<double>(probe.num_tasks));
    if (count > static_cast<double>(spec.scheme_options.exhaustive_limit)) {
      throw EnumerationLimit(fmt::format(
          "exhaustive search over {}^{} assignments exceeds the limit of {}", probe.num_helpers + 1,
          probe.num_tasks, spec.scheme_options.exhaustive_limit));
    }
  }
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  check_spec(spec);
  const std::size_t S = spec.seeds.size();
  const std::size_t V = spec.values.size();
  const std::size_t M = spec.schemes.size();

  std::vector<Instance> bases(S);
  SweepResult result;
  result.regenerations.assign(S, 0);
  parallel_for(S, spec.jobs, [&](std::size_t i) {
    ScenarioConfig config = spec.config;
    config.seed = spec.seeds[i];
    apply_axis(config, spec.axis, hardest_value(spec.axis, spec.values));
    if (spec.regenerate) {
      GeneratedInstance g = generate_feasible_instance(config);
      bases[i] = std::move(g.instance);
      result.regenerations[i] = g.regenerations;
    } else {
      bases[i] = generate_instance(config);
    }
  });

  result.rows.resize(V * S * M);
  parallel_for(V * S, spec.jobs, [&](std::size_t cell) {
    const std::size_t v = cell / S;
    const std::size_t s = cell % S;
    const Instance instance = apply_axis(bases[s], spec.axis, spec.values[v]);
    SchemeOptions options = spec.scheme_options;
    options.seed = spec.seeds[s];
    for (std::size_t m = 0; m < M; ++m) {
      const auto start = std::chrono::steady_clock::now();
      const Solution sol = run_scheme(instance, spec.schemes[m], options);
      const auto stop = std::chrono::steady_clock::now();
      SweepRow& row = result.rows[cell * M + m];
      row.scheme = spec.schemes[m];
      row.axis = spec.axis;
      row.value = spec.values[v];
      row.seed = spec.seeds[s];
      row.feasible = sol.feasible;
      row.objective = sol.feasible ? sol.objective : std::numeric_limits<double>::infinity();
      row.wall_ms =
          spec.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
      row.message = sol.message;
    }
  });
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepCsvHeader << '\n';
  for (const SweepRow& r : rows) {
    out << fmt::format("{},{},{},{},{},{},{:.3f}\n", to_string(r.scheme), to_string(r.axis),
                       r.value, r.seed, r.objective, r.feasible ? "true" : "false", r.wall_ms);
  }
}

std::vector<SchemeMean> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SchemeMean> out;
  std::vector<double> sums;
  for (const SweepRow& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SchemeMean& m) {
      return m.scheme == r.scheme && m.value == r.value;
    });
    if (it == out.end()) {
      out.push_back({r.scheme, r.value, 0.0, 0, 0});
      sums.push_back(0.0);
      it = out.end() - 1;
    }
    const auto idx = static_cast<std::size_t>(it - out.begin());
    ++it->total;
    if (r.feasible) {
      ++it->feasible;
      sums[idx] += r.objective;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_objective =
        out[i].feasible > 0 ? sums[i] / out[i].feasible : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace mec
