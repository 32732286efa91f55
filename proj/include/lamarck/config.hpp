#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamarck/cma_es.hpp"
#include "lamarck/evaluator.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck {

enum class InheritanceMode { Darwinian, Lamarckian };
enum class FitnessMode { Pure, Combined };

struct Condition {
  InheritanceMode inheritance = InheritanceMode::Darwinian;
  FitnessMode fitness = FitnessMode::Pure;
  bool operator==(const Condition&) const = default;
};

// Canonical short names: dar-pure, dar-comb, lam-pure, lam-comb.
std::string condition_name(const Condition& c);
Condition condition_from_name(const std::string& name);
std::vector<Condition> all_conditions();

// 64-bit FNV-1a over the canonical condition name: keeps per-condition seed
// offsets stable across builds and platforms.
std::uint64_t stable_hash(const std::string& s);

struct EvolutionConfig {
  int mu = 30;
  int lambda = 30;
  int n_mut = 24;
  int n_cross = 6;
  int generations = 50;
  int tournament_size = 2;
  int initial_depth_min = 2;  // initial random trees span these depths evenly
  int initial_depth_max = 4;
  double sigma_init = 0.5;
  int min_feasible_hinges = kMinHingesFeasible;
  InheritanceMode inheritance_mode = InheritanceMode::Darwinian;
  FitnessMode fitness_mode = FitnessMode::Pure;
  std::uint64_t master_seed = 1;
  LearningBudget learning;
  SimConfig sim;
};

struct ExperimentSpec {
  std::vector<Condition> conditions = all_conditions();
  int runs_per_condition = 20;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int parallel_workers = 1;
  bool keep_all_checkpoints = false;
  EvolutionConfig evo;
};

ExperimentSpec paper_preset();
ExperimentSpec desk_preset();  // pop 8, lambda 8 (6 mut + 2 cross), 10 gens, budget 100, 5 runs

// Seed for run r of a condition: base_seed + stable_hash(name) + r (mod 2^64).
std::uint64_t run_seed(const ExperimentSpec& spec, const Condition& c, int run_index);

struct ConfigError : std::runtime_error {
  int line;
  std::string field;
  ConfigError(int line_, std::string field_, const std::string& message)
      : std::runtime_error("line " + std::to_string(line_) + ", " + field_ + ": " + message),
        line(line_),
        field(std::move(field_)) {}
};

// Applies "[section]\nkey = value" text onto an existing spec (so presets act
// as defaults).  '#' and ';' start comments.  Unknown sections/keys or
// malformed values raise ConfigError with line/field diagnostics.
void apply_config_text(ExperimentSpec& spec, const std::string& text);
void apply_config_file(ExperimentSpec& spec, const std::string& path);

// Canonical echo of every field; parsing it back reproduces the spec.  Used
// for the per-cell config snapshot and the replay drift guard.
std::string render_config(const ExperimentSpec& spec);

// Returns "[section].key: message" entries; empty means valid.
std::vector<std::string> validate_spec(const ExperimentSpec& spec);

}  // namespace lamarck
