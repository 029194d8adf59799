#include "mec/serialization.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "mec/latency.hpp"

namespace mec {
namespace {

const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object()) throw std::invalid_argument(fmt::format("{}: expected an object", where));
  const auto it = obj.find(name);
  if (it == obj.end())
    throw std::invalid_argument(fmt::format("{}: missing field '{}'", where, name));
  return *it;
}

double number(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_number())
    throw std::invalid_argument(fmt::format("{}.{}: expected a number", where, name));
  return v.get<double>();
}

const Json& array(const Json& obj, const char* name, const std::string& where) {
  const Json& v = field(obj, name, where);
  if (!v.is_array())
    throw std::invalid_argument(fmt::format("{}.{}: expected an array", where, name));
  return v;
}

Json node_to_json(const Node& n) {
  return Json{{"cpu_freq", n.cpu_freq},
              {"kappa", n.kappa},
              {"energy_budget", n.energy_budget},
              {"cycles_per_bit", n.cycles_per_bit}};
}

Node node_from_json(const Json& doc, const std::string& where) {
  Node n;
  n.cpu_freq = number(doc, "cpu_freq", where);
  n.kappa = number(doc, "kappa", where);
  n.energy_budget = number(doc, "energy_budget", where);
  for (const Json& c : array(doc, "cycles_per_bit", where)) {
    if (!c.is_number())
      throw std::invalid_argument(fmt::format("{}.cycles_per_bit: expected numbers", where));
    n.cycles_per_bit.push_back(c.get<double>());
  }
  return n;
}

// JSON has no infinity; unreachable objectives are written as null.
Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json instance_to_json(const Instance& instance) {
  Json tasks = Json::array();
  for (const Task& t : instance.tasks) {
    tasks.push_back({{"input_bits", t.input_bits}, {"output_bits", t.output_bits}});
  }
  Json helpers = Json::array();
  for (const Node& h : instance.helpers) helpers.push_back(node_to_json(h));
  Json channels = Json::array();
  for (const Channel& c : instance.channels) {
    channels.push_back({{"uplink_gain", c.uplink_gain}, {"downlink_gain", c.downlink_gain}});
  }
  return Json{{"tasks", tasks},
              {"local", node_to_json(instance.local)},
              {"helpers", helpers},
              {"channels", channels},
              {"bandwidth", instance.bandwidth}};
}

Instance instance_from_json(const Json& doc) {
  Instance inst;
  std::size_t i = 0;
  for (const Json& t : array(doc, "tasks", "instance")) {
    const std::string where = fmt::format("tasks[{}]", i++);
    inst.tasks.push_back({number(t, "input_bits", where), number(t, "output_bits", where)});
  }
  inst.local = node_from_json(field(doc, "local", "instance"), "local");
  i = 0;
  for (const Json& h : array(doc, "helpers", "instance")) {
    inst.helpers.push_back(node_from_json(h, fmt::format("helpers[{}]", i++)));
  }
  i = 0;
  for (const Json& c : array(doc, "channels", "instance")) {
    const std::string where = fmt::format("channels[{}]", i++);
    inst.channels.push_back({number(c, "uplink_gain", where), number(c, "downlink_gain", where)});
  }
  inst.bandwidth = number(doc, "bandwidth", "instance");
  require_valid(inst);
  return inst;
}

Json config_to_json(const ScenarioConfig& c) {
  return Json{{"num_helpers", c.num_helpers},
              {"num_tasks", c.num_tasks},
              {"bandwidth_hz", c.bandwidth_hz},
              {"noise_db", c.noise_db},
              {"kappa", c.kappa},
              {"local_freq_hz", c.local_freq_hz},
              {"helper_freq_hz", c.helper_freq_hz},
              {"energy_budget_db", c.energy_budget_db},
              {"cell_radius_m", c.cell_radius_m},
              {"input_bits_max", c.input_bits_max},
              {"output_bits_max", c.output_bits_max},
              {"cycles_per_bit_max", c.cycles_per_bit_max},
              {"pathloss_exponent", c.pathloss_exponent},
              {"pathloss_ref_db_at_1m", c.pathloss_ref_db_at_1m},
              {"seed", c.seed}};
}

ScenarioConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config: expected an object");
  ScenarioConfig c;
  const Json defaults = config_to_json(c);
  for (const auto& [key, value] : doc.items()) {
    if (!defaults.contains(key))
      throw std::invalid_argument(fmt::format("config: unknown field '{}'", key));
    if (!value.is_number())
      throw std::invalid_argument(fmt::format("config.{}: expected a number", key));
  }
  auto count = [&](const char* name, std::size_t& out) {
    if (!doc.contains(name)) return;
    const Json& v = doc[name];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw std::invalid_argument(fmt::format("config.{}: expected a nonnegative integer", name));
    }
    out = v.get<std::size_t>();
  };
  auto real = [&](const char* name, double& out) {
    if (doc.contains(name)) out = doc[name].get<double>();
  };
  count("num_helpers", c.num_helpers);
  count("num_tasks", c.num_tasks);
  real("bandwidth_hz", c.bandwidth_hz);
  real("noise_db", c.noise_db);
  real("kappa", c.kappa);
  real("local_freq_hz", c.local_freq_hz);
  real("helper_freq_hz", c.helper_freq_hz);
  real("energy_budget_db", c.energy_budget_db);
  real("cell_radius_m", c.cell_radius_m);
  real("input_bits_max", c.input_bits_max);
  real("output_bits_max", c.output_bits_max);
  real("cycles_per_bit_max", c.cycles_per_bit_max);
  real("pathloss_exponent", c.pathloss_exponent);
  real("pathloss_ref_db_at_1m", c.pathloss_ref_db_at_1m);
  if (doc.contains("seed")) {
    std::size_t seed = 0;
    count("seed", seed);
    c.seed = seed;
  }
  if (const auto v = validate_config(c); !v.empty()) {
    throw std::invalid_argument(fmt::format("config.{}: {}", v[0].field, v[0].reason));
  }
  return c;
}

Json solution_to_json(const Solution& s, const Instance& instance) {
  Json matrix = Json::array();
  for (std::size_t l = 0; l < s.assignment.num_tasks(); ++l) {
    Json row = Json::array();
    for (std::size_t k = 0; k < s.assignment.num_nodes(); ++k) row.push_back(s.assignment(l, k));
    matrix.push_back(row);
  }
  Json doc{{"scheme", to_string(s.scheme)},
           {"status", to_string(s.status)},
           {"feasible", s.feasible},
           {"message", s.message},
           {"objective", finite_or_null(s.objective)},
           {"assignment", matrix},
           {"t_off", s.allocation.t_off},
           {"t_dl", s.allocation.t_dl},
           {"i1", s.allocation.i1},
           {"node_energy", s.node_energy}};
  if (s.feasible && s.assignment.is_binary()) {
    const ScheduleReport r = simulate_schedule(s.assignment, s.allocation, instance);
    doc["schedule"] = Json{{"compute_time", r.compute_time},
                           {"waiting", r.waiting},
                           {"completion", r.completion},
                           {"total_latency", r.total_latency},
                           {"offload_energy", r.offload_energy},
                           {"local_energy", r.local_energy},
                           {"helper_compute_energy", r.helper_compute_energy},
                           {"helper_dl_energy", r.helper_dl_energy}};
  }
  return doc;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument(fmt::format("cannot open '{}'", path));
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace mec
