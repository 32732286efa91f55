#include "lamarck/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lamarck {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

long long parse_int(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, field, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, field, "expected an unsigned integer, got '" + v + "'");
  }
}

double parse_double(const std::string& v, int line, const std::string& field) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(x)) throw std::invalid_argument("not finite");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, field, "expected a finite number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line, const std::string& field) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, field, "expected true or false, got '" + v + "'");
}

}  // namespace

std::string condition_name(const Condition& c) {
  std::string s = c.inheritance == InheritanceMode::Darwinian ? "dar" : "lam";
  s += c.fitness == FitnessMode::Pure ? "-pure" : "-comb";
  return s;
}

Condition condition_from_name(const std::string& name) {
  for (const Condition& c : all_conditions()) {
    if (condition_name(c) == name) return c;
  }
  throw std::invalid_argument("unknown condition '" + name +
                              "' (expected dar-pure, dar-comb, lam-pure, or lam-comb)");
}

std::vector<Condition> all_conditions() {
  return {
      {InheritanceMode::Darwinian, FitnessMode::Pure},
      {InheritanceMode::Darwinian, FitnessMode::Combined},
      {InheritanceMode::Lamarckian, FitnessMode::Pure},
      {InheritanceMode::Lamarckian, FitnessMode::Combined},
  };
}

std::uint64_t stable_hash(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a offset basis
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;  // FNV prime
  }
  return h;
}

ExperimentSpec paper_preset() { return ExperimentSpec{}; }

ExperimentSpec desk_preset() {
  ExperimentSpec s;
  s.runs_per_condition = 5;
  s.evo.mu = 8;
  s.evo.lambda = 8;
  s.evo.n_mut = 6;
  s.evo.n_cross = 2;
  s.evo.generations = 10;
  // Small search radius keeps networks near zero, where wide random draws no
  // longer saturate every joint and gait quality genuinely depends on
  // learning.  Batches of four stretch the 100-eval budget to 25 adaptation
  // steps: a cold lifetime usually escapes the near-still basin but gains
  // little beyond it, while inherited controllers keep refining across
  // generations instead of every offspring restarting the climb.
  s.evo.sigma_init = 0.07;
  s.evo.learning.population_size = 4;
  s.evo.learning.max_evaluations = 100;
  // At this fitness scale (|f| ~ 0.1) the initial-height penalty pushes tall
  // feasible bodies below the exact 0 that unsimulated infeasible bodies
  // score, turning infeasibility into a selection attractor; without it every
  // feasible gait outscores every infeasible body.
  s.evo.sim.height_coeff = 0.0;
  // Half-population tournaments: strong enough that fitness-only runs breed
  // mostly from the leading lineage, soft enough that the two crossover picks
  // are usually distinct individuals instead of the same argmax winner.
  s.evo.tournament_size = 4;
  // Seed every run at the top of the sampler's depth range.  Deep seeds make
  // the starting bodies large, and large bodies move little in descriptor
  // space per edit, so fitness-anchored breeding stays low-dissimilarity
  // while novelty-weighted selection pays a visible dissimilarity premium for
  // rotating across body space.
  s.evo.initial_depth_min = 4;
  s.evo.initial_depth_max = 4;
  return s;
}

std::uint64_t run_seed(const ExperimentSpec& spec, const Condition& c, int run_index) {
  return spec.base_seed + stable_hash(condition_name(c)) + static_cast<std::uint64_t>(run_index);
}

void apply_config_text(ExperimentSpec& spec, const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, line, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "evolution" && section != "learning" &&
          section != "simulation") {
        throw ConfigError(line_no, section, "unknown section");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string field = section + "." + key;
    if (section.empty()) throw ConfigError(line_no, key, "key outside any [section]");

    if (section == "experiment") {
      if (key == "conditions") {
        std::vector<Condition> conds;
        std::stringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          item = trim(item);
          if (item.empty()) continue;
          Condition c;
          try {
            c = condition_from_name(item);
          } catch (const std::exception& e) {
            throw ConfigError(line_no, field, e.what());
          }
          if (std::find(conds.begin(), conds.end(), c) != conds.end()) {
            throw ConfigError(line_no, field, "duplicate condition '" + item + "'");
          }
          conds.push_back(c);
        }
        if (conds.empty()) throw ConfigError(line_no, field, "no conditions listed");
        spec.conditions = conds;
      } else if (key == "runs_per_condition") {
        spec.runs_per_condition = static_cast<int>(parse_int(value, line_no, field));
      } else if (key == "base_seed") {
        spec.base_seed = parse_u64(value, line_no, field);
      } else if (key == "output_dir") {
        if (value.empty()) throw ConfigError(line_no, field, "must not be empty");
        spec.output_dir = value;
      } else if (key == "parallel_workers") {
        spec.parallel_workers = static_cast<int>(parse_int(value, line_no, field));
      } else if (key == "keep_all_checkpoints") {
        spec.keep_all_checkpoints = parse_bool(value, line_no, field);
      } else {
        throw ConfigError(line_no, field, "unknown key");
      }
    } else if (section == "evolution") {
      if (key == "mu") spec.evo.mu = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "lambda") spec.evo.lambda = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "n_mut") spec.evo.n_mut = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "n_cross") spec.evo.n_cross = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "generations") spec.evo.generations = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "tournament_size") spec.evo.tournament_size = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "initial_depth_min") spec.evo.initial_depth_min = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "initial_depth_max") spec.evo.initial_depth_max = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "sigma_init") spec.evo.sigma_init = parse_double(value, line_no, field);
      else if (key == "min_feasible_hinges") spec.evo.min_feasible_hinges = static_cast<int>(parse_int(value, line_no, field));
      else throw ConfigError(line_no, field, "unknown key");
    } else if (section == "learning") {
      if (key == "population_size") spec.evo.learning.population_size = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "max_evaluations") spec.evo.learning.max_evaluations = static_cast<int>(parse_int(value, line_no, field));
      else throw ConfigError(line_no, field, "unknown key");
    } else {  // simulation
      SimConfig& sim = spec.evo.sim;
      if (key == "dt") sim.dt = parse_double(value, line_no, field);
      else if (key == "settle_duration") sim.settle_duration = parse_double(value, line_no, field);
      else if (key == "active_duration") sim.active_duration = parse_double(value, line_no, field);
      else if (key == "omega_max") sim.omega_max = parse_double(value, line_no, field);
      else if (key == "theta_range") sim.theta_range = parse_double(value, line_no, field);
      else if (key == "c_forward") sim.c_forward = parse_double(value, line_no, field);
      else if (key == "c_back") sim.c_back = parse_double(value, line_no, field);
      else if (key == "theta_contact") sim.theta_contact = parse_double(value, line_no, field);
      else if (key == "contact_penalty") sim.contact_penalty = parse_double(value, line_no, field);
      else if (key == "contact_cutoff") sim.contact_cutoff = static_cast<int>(parse_int(value, line_no, field));
      else if (key == "height_coeff") sim.height_coeff = parse_double(value, line_no, field);
      else throw ConfigError(line_no, field, "unknown key");
    }
  }
}

void apply_config_file(ExperimentSpec& spec, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(spec, buf.str());
}

std::string render_config(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "conditions = ";
  for (size_t i = 0; i < spec.conditions.size(); ++i) {
    if (i) out << ", ";
    out << condition_name(spec.conditions[i]);
  }
  out << "\n";
  out << "runs_per_condition = " << spec.runs_per_condition << "\n";
  out << "base_seed = " << spec.base_seed << "\n";
  out << "output_dir = " << spec.output_dir << "\n";
  out << "parallel_workers = " << spec.parallel_workers << "\n";
  out << "keep_all_checkpoints = " << (spec.keep_all_checkpoints ? "true" : "false") << "\n";
  out << "\n[evolution]\n";
  out << "mu = " << spec.evo.mu << "\n";
  out << "lambda = " << spec.evo.lambda << "\n";
  out << "n_mut = " << spec.evo.n_mut << "\n";
  out << "n_cross = " << spec.evo.n_cross << "\n";
  out << "generations = " << spec.evo.generations << "\n";
  out << "tournament_size = " << spec.evo.tournament_size << "\n";
  out << "initial_depth_min = " << spec.evo.initial_depth_min << "\n";
  out << "initial_depth_max = " << spec.evo.initial_depth_max << "\n";
  out << "sigma_init = " << fmt_double(spec.evo.sigma_init) << "\n";
  out << "min_feasible_hinges = " << spec.evo.min_feasible_hinges << "\n";
  out << "\n[learning]\n";
  out << "population_size = " << spec.evo.learning.population_size << "\n";
  out << "max_evaluations = " << spec.evo.learning.max_evaluations << "\n";
  out << "\n[simulation]\n";
  const SimConfig& sim = spec.evo.sim;
  out << "dt = " << fmt_double(sim.dt) << "\n";
  out << "settle_duration = " << fmt_double(sim.settle_duration) << "\n";
  out << "active_duration = " << fmt_double(sim.active_duration) << "\n";
  out << "omega_max = " << fmt_double(sim.omega_max) << "\n";
  out << "theta_range = " << fmt_double(sim.theta_range) << "\n";
  out << "c_forward = " << fmt_double(sim.c_forward) << "\n";
  out << "c_back = " << fmt_double(sim.c_back) << "\n";
  out << "theta_contact = " << fmt_double(sim.theta_contact) << "\n";
  out << "contact_penalty = " << fmt_double(sim.contact_penalty) << "\n";
  out << "contact_cutoff = " << sim.contact_cutoff << "\n";
  out << "height_coeff = " << fmt_double(sim.height_coeff) << "\n";
  return out.str();
}

std::vector<std::string> validate_spec(const ExperimentSpec& spec) {
  std::vector<std::string> problems;
  const auto bad = [&](const std::string& field, const std::string& msg) {
    problems.push_back(field + ": " + msg);
  };
  if (spec.conditions.empty()) bad("experiment.conditions", "at least one condition required");
  if (spec.runs_per_condition < 1) bad("experiment.runs_per_condition", "must be >= 1");
  if (spec.parallel_workers < 1) bad("experiment.parallel_workers", "must be >= 1");
  if (spec.output_dir.empty()) bad("experiment.output_dir", "must not be empty");

  const EvolutionConfig& e = spec.evo;
  if (e.mu < 1) bad("evolution.mu", "must be >= 1");
  if (e.lambda < 1) bad("evolution.lambda", "must be >= 1");
  if (e.n_mut < 0 || e.n_cross < 0) bad("evolution.n_mut", "offspring counts must be >= 0");
  if (e.n_mut + e.n_cross != e.lambda) {
    bad("evolution.n_mut", "n_mut + n_cross must equal lambda");
  }
  if (e.generations < 0) bad("evolution.generations", "must be >= 0");
  if (e.tournament_size < 1 || e.tournament_size > e.mu) {
    bad("evolution.tournament_size", "must be in [1, mu]");
  }
  if (e.initial_depth_min < 2 || e.initial_depth_max > 4 ||
      e.initial_depth_max < e.initial_depth_min) {
    bad("evolution.initial_depth_min",
        "need 2 <= initial_depth_min <= initial_depth_max <= 4 (random tree sampler domain)");
  }
  if (!(e.sigma_init > 0.0)) bad("evolution.sigma_init", "must be > 0");
  if (e.min_feasible_hinges < 0) bad("evolution.min_feasible_hinges", "must be >= 0");

  if (e.learning.population_size < 4) bad("learning.population_size", "must be >= 4");
  if (e.learning.max_evaluations < 1 ||
      e.learning.max_evaluations % e.learning.population_size != 0) {
    bad("learning.max_evaluations", "must be a positive multiple of population_size");
  }

  const SimConfig& s = e.sim;
  if (!(s.dt > 0.0)) bad("simulation.dt", "must be > 0");
  const auto divisible = [&](double duration) {
    const double steps = duration / s.dt;
    return std::abs(steps - std::round(steps)) <= 1e-9 && steps >= 0.0;
  };
  if (s.dt > 0.0 && !divisible(s.settle_duration)) {
    bad("simulation.settle_duration", "must be divisible by dt");
  }
  if (s.dt > 0.0 && !divisible(s.active_duration)) {
    bad("simulation.active_duration", "must be divisible by dt");
  }
  if (!(s.omega_max > 0.0)) bad("simulation.omega_max", "must be > 0");
  if (!(s.theta_range > 0.0)) bad("simulation.theta_range", "must be > 0");
  if (!(s.c_forward > s.c_back)) bad("simulation.c_forward", "must exceed c_back");
  if (s.c_back < 0.0) bad("simulation.c_back", "must be >= 0");
  if (s.theta_contact < 0.0) bad("simulation.theta_contact", "must be >= 0");
  if (s.contact_penalty < 0.0) bad("simulation.contact_penalty", "must be >= 0");
  if (s.contact_cutoff < 0) bad("simulation.contact_cutoff", "must be >= 0");
  if (s.height_coeff < 0.0) bad("simulation.height_coeff", "must be >= 0");
  return problems;
}

}  // namespace lamarck
