#include <algorithm>
#include <cmath>
#include <set>

#include "qsn/error.hpp"
#include "qsn/experiments.hpp"
#include "qsn/output.hpp"

namespace qsn {

using nlohmann::json;

namespace {

// Messages start with the dotted field path so load_config can find the line.
[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> known) {
  if (!obj.is_object()) fail(prefix.empty() ? "config" : prefix, "expected an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(prefix.empty() ? key : prefix + "." + key, "unknown key");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& prefix, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  const std::string path = prefix.empty() ? key : prefix + "." + key;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) fail(path, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) fail(path, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) fail(path, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) fail(path, "expected a string");
    }
    out = it->get<T>();
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

void read_list(const json& obj, const char* key, std::vector<double>& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_array()) fail(key, "expected an array of numbers");
  out.clear();
  for (const auto& v : *it) {
    if (!v.is_number()) fail(key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
}

int line_of(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + offset, '\n'));
}

}  // namespace

std::vector<double> default_field_grid() {
  std::vector<double> grid{0.0};
  for (int k = 0; k <= 12; ++k) grid.push_back(0.25 * std::exp2(0.5 * k));
  return grid;
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const InvalidArgument& e) {
    fail("model", e.what());
  }
  if (!(coupling > 0.0) || !std::isfinite(coupling)) fail("coupling", "J must be positive");
  for (double h : fields)
    if (!(h >= 0.0) || !std::isfinite(h)) fail("fields", "h values must be finite and >= 0");
  for (double l : lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) fail("lambdas", "lambda values must be finite and >= 0");
  if (!fields.empty() && !lambdas.empty()) fail("lambdas", "give either fields or lambdas");
  if (ensemble_size < 1) fail("ensemble_size", "must be at least 1");
  if (realizations < 1) fail("realizations", "must be at least 1");
  if (attack) {
    try {
      attack->validate();
    } catch (const InvalidArgument& e) {
      fail("attack", e.what());
    }
  }
  if (!(solver.tolerance > 0.0)) fail("solver.tolerance", "must be positive");
  if (solver.max_matvecs < 1) fail("solver.max_matvecs", "must be positive");
  if (solver.krylov_dim < 2) fail("solver.krylov_dim", "must be at least 2");
  if (!(mean_field.tolerance > 0.0)) fail("mean_field.tolerance", "must be positive");
  if (mean_field.max_iter < 1) fail("mean_field.max_iter", "must be positive");
  if (!(mean_field.mixing >= 0.0 && mean_field.mixing < 1.0))
    fail("mean_field.mixing", "must lie in [0, 1)");
  if (histogram_bins < 1) fail("histogram_bins", "must be positive");
  if (!(failure_quota >= 0.0 && failure_quota <= 1.0))
    fail("failure_quota", "must lie in [0, 1]");
  if (max_spins < 1 || max_spins > 30) fail("max_spins", "must lie in [1, 30]");
}

std::vector<double> ExperimentConfig::field_values() const {
  if (!fields.empty()) return fields;
  if (!lambdas.empty()) {
    const double z = model.nominal_coordination();
    std::vector<double> out;
    for (double l : lambdas) out.push_back(l * z * coupling);
    return out;
  }
  std::vector<double> out = default_field_grid();
  for (double& h : out) h *= coupling;
  return out;
}

double ExperimentConfig::lambda_of(double field) const {
  return field / (model.nominal_coordination() * coupling);
}

void ExperimentConfig::apply_paper_scale() {
  model.n = 20;
  ensemble_size = 100;
  realizations = 100;
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc, "",
                 {"model", "coupling", "fields", "lambdas", "ensemble_size", "realizations",
                  "attack", "master_seed", "solver", "mean_field", "histogram_bins",
                  "failure_quota", "max_spins", "output_dir"});
  ExperimentConfig c;
  if (auto it = doc.find("model"); it != doc.end()) {
    reject_unknown(*it, "model", {"name", "n", "p", "k", "m", "require_connected"});
    std::string name = to_string(c.model.model);
    read(*it, "name", "model", name);
    try {
      c.model.model = parse_graph_model(name);
    } catch (const InvalidArgument& e) {
      fail("model.name", e.what());
    }
    read(*it, "n", "model", c.model.n);
    read(*it, "p", "model", c.model.p);
    read(*it, "k", "model", c.model.k);
    read(*it, "m", "model", c.model.m);
    read(*it, "require_connected", "model", c.model.require_connected);
  }
  read(doc, "coupling", "", c.coupling);
  read_list(doc, "fields", c.fields);
  read_list(doc, "lambdas", c.lambdas);
  read(doc, "ensemble_size", "", c.ensemble_size);
  read(doc, "realizations", "", c.realizations);
  if (auto it = doc.find("attack"); it != doc.end() && !it->is_null()) {
    reject_unknown(*it, "attack", {"direction", "q", "fraction", "strategy"});
    AttackSpec a;
    std::string dir = to_string(a.direction);
    std::string strategy = to_string(a.strategy);
    read(*it, "direction", "attack", dir);
    read(*it, "strategy", "attack", strategy);
    read(*it, "q", "attack", a.strength);
    read(*it, "fraction", "attack", a.fraction);
    try {
      a.direction = parse_axis(dir);
    } catch (const InvalidArgument& e) {
      fail("attack.direction", e.what());
    }
    try {
      a.strategy = parse_strategy(strategy);
    } catch (const InvalidArgument& e) {
      fail("attack.strategy", e.what());
    }
    c.attack = a;
  }
  read(doc, "master_seed", "", c.master_seed);
  if (auto it = doc.find("solver"); it != doc.end()) {
    reject_unknown(*it, "solver", {"tolerance", "max_matvecs", "krylov_dim"});
    read(*it, "tolerance", "solver", c.solver.tolerance);
    read(*it, "max_matvecs", "solver", c.solver.max_matvecs);
    read(*it, "krylov_dim", "solver", c.solver.krylov_dim);
  }
  if (auto it = doc.find("mean_field"); it != doc.end()) {
    reject_unknown(*it, "mean_field", {"tolerance", "max_iter", "mixing"});
    read(*it, "tolerance", "mean_field", c.mean_field.tolerance);
    read(*it, "max_iter", "mean_field", c.mean_field.max_iter);
    read(*it, "mixing", "mean_field", c.mean_field.mixing);
  }
  read(doc, "histogram_bins", "", c.histogram_bins);
  read(doc, "failure_quota", "", c.failure_quota);
  read(doc, "max_spins", "", c.max_spins);
  read(doc, "output_dir", "", c.output_dir);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["model"] = {{"name", c.model.name()},
                  {"n", c.model.n},
                  {"p", c.model.p},
                  {"k", c.model.k},
                  {"m", c.model.m},
                  {"require_connected", c.model.require_connected}};
  doc["coupling"] = c.coupling;
  doc["fields"] = c.fields;
  doc["lambdas"] = c.lambdas;
  doc["ensemble_size"] = c.ensemble_size;
  doc["realizations"] = c.realizations;
  if (c.attack) {
    doc["attack"] = {{"direction", to_string(c.attack->direction)},
                     {"q", c.attack->strength},
                     {"fraction", c.attack->fraction},
                     {"strategy", to_string(c.attack->strategy)}};
  } else {
    doc["attack"] = nullptr;
  }
  doc["master_seed"] = c.master_seed;
  doc["solver"] = {{"tolerance", c.solver.tolerance},
                   {"max_matvecs", c.solver.max_matvecs},
                   {"krylov_dim", c.solver.krylov_dim}};
  doc["mean_field"] = {{"tolerance", c.mean_field.tolerance},
                       {"max_iter", c.mean_field.max_iter},
                       {"mixing", c.mean_field.mixing}};
  doc["histogram_bins"] = c.histogram_bins;
  doc["failure_quota"] = c.failure_quota;
  doc["max_spins"] = c.max_spins;
  doc["output_dir"] = c.output_dir;
  return doc;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": " + e.what(), line);
  }
  try {
    return config_from_json(doc);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(": "));
    const std::string key = field.substr(field.rfind('.') + 1);
    const std::size_t at = text.find("\"" + key + "\"");
    const int line = at == std::string::npos ? 0 : line_of(text, at);
    throw ConfigError(path.string() + ":" + (line ? std::to_string(line) + ": " : " ") + msg,
                      line);
  }
}

}  // namespace qsn
