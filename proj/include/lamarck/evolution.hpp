#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lamarck/cma_es.hpp"
#include "lamarck/config.hpp"
#include "lamarck/controller.hpp"
#include "lamarck/descriptors.hpp"
#include "lamarck/evaluator.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/rng.hpp"

namespace lamarck {

struct Individual {
  std::uint64_t id = 0;
  BodyGenotype genotype;
  BodyPhenotype phenotype;
  Descriptors descriptors = Descriptors::Zero();
  bool feasible = false;

  ParamVector controller;  // best learned parameters (empty when infeasible)
  CmaState cma_state;      // final learning state, kept for Lamarckian transfer
  bool has_cma_state = false;

  double f_locomotion = 0.0;
  double f_novelty = 0.0;
  double f_combined = 0.0;
  double initial_fitness = 0.0;
  double d = 0.0;
  double l = 0.0;
  int c_hinge = 0;
  long eval_count = 0;

  std::vector<std::uint64_t> parent_ids;
  std::optional<std::uint64_t> closest_parent_id;
  std::optional<int> closest_edit_distance;
  std::optional<double> parent_dissimilarity;
  int birth_generation = 0;
};

struct ArchiveEntry {
  std::uint64_t owner = 0;
  Descriptors descriptors = Descriptors::Zero();
};

// Complete resumable state: everything the next generation depends on.
// RNG streams are re-derived from (master_seed, purpose, generation, index),
// so no generator state needs to be stored.
struct RunState {
  int generation = -1;  // last completed generation; -1 = nothing run yet
  std::vector<Individual> population;
  std::vector<ArchiveEntry> archive;
  std::uint64_t next_id = 0;
  long total_evaluations = 0;
  bool interrupted = false;  // set when the stop hook fires; not serialized
};

// Output surface of a run.  The engine emits deterministic content; the sink
// owns files, byte offsets, and checkpoint retention.
class RunSink {
 public:
  virtual void runlog_line(const std::string& json) = 0;
  virtual void genotype_line(const std::string& json) = 0;
  virtual void transfer_line(const std::string& json) = 0;
  virtual void controller_blob(std::uint64_t id, int h, const ParamVector& params) = 0;
  virtual void checkpoint(const RunState& state) = 0;
  virtual ~RunSink() = default;
};

using Learner =
    std::function<LearningResult(const Objective&, CmaState, const LearningBudget&, Rng&)>;
using ObjectiveFactory = std::function<Objective(const BodyPhenotype&)>;
using DetailFactory = std::function<SimResult(const BodyPhenotype&, const ParamVector&)>;

struct EngineOptions {
  Learner learner;                      // default: run_learning
  ObjectiveFactory objective_factory;   // default: closed-loop simulation fitness
  DetailFactory detail_factory;         // default: simulate; fills d/l/c_hinge
  int workers = 1;
  bool write_checkpoints = true;
  std::function<bool(int)> stop_after_generation;  // true -> stop (state is checkpointed)
};

// Accounting-only learner: consumes exactly the evaluation budget with no
// distribution updates.  Pair with a constant objective factory to count
// objective calls without simulation cost.
LearningResult stub_learning(const Objective& objective, CmaState state,
                             const LearningBudget& budget, Rng& rng);

// k-way tournament (without replacement) on f_combined; ties -> lower id.
std::size_t tournament_select(const std::vector<Individual>& pop, int k, Rng& rng);

// Appends all of pop ∪ offspring to the archive, then recomputes f_novelty
// for every member against the archive minus its own entries, and sets
// f_combined per the fitness mode.
void update_novelty_and_fitness(std::vector<Individual>& pop, std::vector<Individual>& offspring,
                                std::vector<ArchiveEntry>& archive, FitnessMode mode);

// Top-mu of pop ∪ offspring by (f_combined, f_locomotion, lower id).
std::vector<Individual> survivor_selection(std::vector<Individual>&& pop,
                                           std::vector<Individual>&& offspring, int mu);

// Runs (or resumes) one evolutionary run.  Emits, via the sink: one runlog
// record per individual per generation plus a per-generation summary line,
// genotype/controller/transfer records, and a checkpoint after every
// completed generation.
RunState run_evolution(const EvolutionConfig& cfg, RunSink& sink, const EngineOptions& opts = {},
                       const RunState* resume = nullptr);

}  // namespace lamarck
