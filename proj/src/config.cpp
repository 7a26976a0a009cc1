#include "catnh/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "catnh/dataset.hpp"
#include "catnh/errors.hpp"

namespace catnh {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

long to_long(const std::string& key, const std::string& v) {
  long x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

Setter real(double ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

Setter integer(int ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = int(to_long(k, v)); };
}

Setter boolean(bool ExperimentConfig::*field) {
  return [field](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*field = to_bool(k, v); };
}

struct KeySpec {
  Setter set;
  std::set<Experiment> experiments;  // empty = all
};

const std::set<Experiment> kFig2{Experiment::Fig2, Experiment::Fig2Dynamics, Experiment::Fig2DiscrepancyMap};

std::set<Experiment> fig2_and(std::initializer_list<Experiment> more) {
  std::set<Experiment> s = kFig2;
  s.insert(more.begin(), more.end());
  return s;
}

const std::map<std::string, KeySpec>& key_table() {
  using E = Experiment;
  static const std::map<std::string, KeySpec> table = {
      {"experiment", {[](ExperimentConfig&, const std::string&, const std::string&) {}, {}}},
      {"out", {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }, {}}},
      {"jobs", {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                  const long j = to_long(k, v);
                  if (j < 0) throw ConfigError("jobs must be >= 0");
                  c.jobs = unsigned(j);
                }, {}}},
      {"dim", {integer(&ExperimentConfig::dim), {}}},
      {"tol", {real(&ExperimentConfig::tol), {}}},
      {"abs_tol", {real(&ExperimentConfig::abs_tol), {}}},
      {"plot_script", {boolean(&ExperimentConfig::plot_script), {}}},
      {"alpha", {real(&ExperimentConfig::alpha), fig2_and({E::Fig4Entanglement, E::Validate})}},
      {"omega", {real(&ExperimentConfig::omega), fig2_and({E::Fig3PtTransition, E::CustomSweep})}},
      {"kappa", {real(&ExperimentConfig::kappa), fig2_and({E::Fig3PtTransition, E::CustomSweep, E::Validate})}},
      {"alpha_min", {real(&ExperimentConfig::alpha_min), fig2_and({E::Fig3PtTransition, E::CustomSweep, E::Validate})}},
      {"alpha_max", {real(&ExperimentConfig::alpha_max), fig2_and({E::Fig3PtTransition, E::CustomSweep, E::Validate})}},
      {"alpha_step", {real(&ExperimentConfig::alpha_step), fig2_and({E::Fig3PtTransition, E::CustomSweep, E::Validate})}},
      {"gain_site", {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                       if (v != "physical" && v != "plus" && v != "minus") {
                         throw ConfigError("key '" + k + "' must be physical, plus or minus");
                       }
                       c.gain_site = v;
                     }, fig2_and({E::CustomSweep})}},
      {"ep_lo", {real(&ExperimentConfig::ep_lo), {E::Fig3PtTransition, E::CustomSweep}}},
      {"ep_hi", {real(&ExperimentConfig::ep_hi), {E::Fig3PtTransition, E::CustomSweep}}},
      {"fidelity", {boolean(&ExperimentConfig::fidelity), {E::CustomSweep}}},
      {"t_final", {real(&ExperimentConfig::t_final), fig2_and({E::CustomSweep, E::Validate})}},
      {"samples", {integer(&ExperimentConfig::samples), fig2_and({E::CustomSweep, E::Validate})}},
      {"beta_min", {real(&ExperimentConfig::beta_min), {E::Fig4Entanglement}}},
      {"beta_max", {real(&ExperimentConfig::beta_max), {E::Fig4Entanglement}}},
      {"beta_step", {real(&ExperimentConfig::beta_step), {E::Fig4Entanglement}}},
      {"refine", {integer(&ExperimentConfig::refine), {E::Fig4Entanglement}}},
      {"refine_window", {real(&ExperimentConfig::refine_window), {E::Fig4Entanglement}}},
      {"coupling", {real(&ExperimentConfig::coupling), {E::Fig4Entanglement}}},
      {"kerr2_ratio", {real(&ExperimentConfig::kerr2_ratio), {E::Fig4Entanglement}}},
      {"kappa1", {real(&ExperimentConfig::kappa1), {E::Fig4Entanglement}}},
      {"kappa2", {real(&ExperimentConfig::kappa2), {E::Fig4Entanglement}}},
      {"draws", {integer(&ExperimentConfig::draws), {E::Validate}}},
      {"seed", {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
                  const long s = to_long(k, v);
                  if (s < 0) throw ConfigError("seed must be >= 0");
                  c.seed = (unsigned long)s;
                }, {E::Validate}}},
  };
  return table;
}

bool is_part_of(Experiment requested, Experiment command) {
  if (requested == command) return true;
  return command == Experiment::Fig2 &&
         (requested == Experiment::Fig2Dynamics || requested == Experiment::Fig2DiscrepancyMap);
}

}  // namespace

KeyValueFile KeyValueFile::parse(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.entries.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValueFile::merge(const KeyValueFile& other) {
  for (const auto& [k, v] : other.entries) entries[k] = v;
}

const char* to_string(Experiment e) {
  switch (e) {
    case Experiment::Fig2Dynamics: return "fig2_dynamics";
    case Experiment::Fig2DiscrepancyMap: return "fig2_discrepancy_map";
    case Experiment::Fig2: return "fig2";
    case Experiment::Fig3PtTransition: return "fig3_pt_transition";
    case Experiment::Fig4Entanglement: return "fig4_entanglement";
    case Experiment::Validate: return "validate";
    case Experiment::CustomSweep: return "custom_sweep";
  }
  return "?";
}

Experiment parse_experiment(const std::string& name) {
  for (Experiment e : {Experiment::Fig2Dynamics, Experiment::Fig2DiscrepancyMap, Experiment::Fig2,
                       Experiment::Fig3PtTransition, Experiment::Fig4Entanglement, Experiment::Validate,
                       Experiment::CustomSweep}) {
    if (name == to_string(e)) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::Fig2:
    case Experiment::Fig2Dynamics:
    case Experiment::Fig2DiscrepancyMap:
      c.alpha = 1.5;
      c.omega = 0.01;
      c.kappa = 0.001;
      c.alpha_min = 1.0;
      c.alpha_max = 2.5;
      c.alpha_step = 0.1;
      break;
    case Experiment::Fig3PtTransition:
      c.omega = 0.0023;
      c.kappa = 0.05;
      c.alpha_min = 1.0;
      c.alpha_max = 2.5;
      c.alpha_step = 0.005;
      break;
    case Experiment::Fig4Entanglement:
      c.alpha = 2.0;
      break;
    case Experiment::CustomSweep:
      c.omega = 0.0023;
      c.kappa = 0.05;
      c.alpha_step = 0.01;
      break;
    case Experiment::Validate:
      c.alpha = 2.0;
      c.kappa = 0.05;
      c.t_final = 10.0;
      c.samples = 101;
      break;
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_entries(Experiment e, const KeyValueFile& kv) {
  Experiment target = e;
  if (const auto it = kv.entries.find("experiment"); it != kv.entries.end()) {
    const Experiment requested = parse_experiment(it->second);
    if (!is_part_of(requested, e)) {
      throw ConfigError(std::string("config is for experiment '") + to_string(requested) +
                        "' but the command runs '" + to_string(e) + "'");
    }
    target = requested;
  }
  ExperimentConfig c = defaults(target);
  const auto& table = key_table();
  std::vector<std::string> unknown;
  for (const auto& [key, value] : kv.entries) {
    const auto it = table.find(key);
    if (it == table.end() || (!it->second.experiments.empty() && !it->second.experiments.count(target))) {
      unknown.push_back(key);
    }
  }
  if (!unknown.empty()) {
    std::string msg = std::string("unknown key(s) for ") + to_string(target) + ":";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ConfigError(msg);
  }
  for (const auto& [key, value] : kv.entries) table.at(key).set(c, key, value);
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  auto nonneg = [](double x, const char* name) {
    if (!(x >= 0.0)) throw ConfigError(std::string(name) + " must be >= 0");
  };
  nonneg(alpha, "alpha");
  nonneg(omega, "omega");
  nonneg(kappa, "kappa");
  nonneg(coupling, "coupling");
  nonneg(kappa1, "kappa1");
  nonneg(kappa2, "kappa2");
  if (!(kerr2_ratio > 0.0)) throw ConfigError("kerr2_ratio must be > 0");
  if (!(alpha_step > 0.0) || !(alpha_max >= alpha_min) || alpha_min < 0.0) {
    throw ConfigError("alpha grid must be non-empty and ascending");
  }
  if (!(beta_step > 0.0) || !(beta_max >= beta_min) || beta_min < 0.0) {
    throw ConfigError("beta grid must be non-empty and ascending");
  }
  if (!(ep_hi > ep_lo)) throw ConfigError("ep bracket must satisfy ep_lo < ep_hi");
  if (refine < 1) throw ConfigError("refine must be >= 1");
  if (!(refine_window >= 0.0)) throw ConfigError("refine_window must be >= 0");
  if (dim != 0 && dim < 2) throw ConfigError("dim must be 0 (automatic) or >= 2");
  if (!(tol > 0.0) || !(abs_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (!(t_final > 0.0)) throw ConfigError("t_final must be positive");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  if (draws < 1) throw ConfigError("draws must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["experiment"] = to_string(experiment);
  j["alpha"] = alpha;
  j["omega"] = omega;
  j["kappa"] = kappa;
  j["alpha_grid"] = {alpha_min, alpha_max, alpha_step};
  j["gain_site"] = gain_site;
  j["ep_bracket"] = {ep_lo, ep_hi};
  j["fidelity"] = fidelity;
  j["beta_grid"] = {beta_min, beta_max, beta_step, refine, refine_window};
  j["coupling"] = coupling;
  j["kerr2_ratio"] = kerr2_ratio;
  j["kappa1"] = kappa1;
  j["kappa2"] = kappa2;
  j["draws"] = draws;
  j["seed"] = seed;
  j["dim"] = dim;
  j["tol"] = tol;
  j["abs_tol"] = abs_tol;
  j["t_final"] = t_final;
  j["samples"] = samples;
  return j;
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(to_json().dump()); }

}  // namespace catnh
