#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "lamarck/config.hpp"
#include "lamarck/evolution.hpp"
#include "lamarck/serialize.hpp"

namespace lamarck {

// Sink writing one run cell's outputs: runlog.jsonl, genotypes.jsonl,
// transfers.jsonl, controllers.bin, and checkpoint.bin.  The checkpoint
// records the byte length of every stream at the moment it was taken, so a
// resumed run truncates away anything written after the last completed
// generation and appends from there — the resulting files are byte-identical
// to an uninterrupted run.
class FileRunSink : public RunSink {
 public:
  explicit FileRunSink(std::filesystem::path dir, bool keep_all_checkpoints = false);

  bool has_checkpoint() const;
  // Loads the checkpointed state and re-opens all streams for appending at
  // the recorded offsets.  Call exactly one of load_checkpoint/open_fresh.
  RunState load_checkpoint();
  void open_fresh();

  void runlog_line(const std::string& json) override;
  void genotype_line(const std::string& json) override;
  void transfer_line(const std::string& json) override;
  void controller_blob(std::uint64_t id, int h, const ParamVector& params) override;
  void checkpoint(const RunState& state) override;

  void finish();  // flush and close streams

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void write_line(std::ofstream& out, std::uint64_t& bytes, const std::string& json);

  std::filesystem::path dir_;
  bool keep_all_ = false;
  std::ofstream runlog_, genotypes_, transfers_, controllers_;
  std::uint64_t runlog_bytes_ = 0, genotype_bytes_ = 0, transfer_bytes_ = 0,
                controller_bytes_ = 0;
};

// Directory layout: <output_dir>/<condition>/run_<NN>.
std::filesystem::path cell_dir(const ExperimentSpec& spec, const Condition& c, int run_index);

// Per-cell engine configuration: the shared EvolutionConfig plus the cell's
// condition and derived seed.
EvolutionConfig cell_config(const ExperimentSpec& spec, const Condition& c, int run_index);

struct CellResult {
  Condition condition;
  int run_index = 0;
  bool skipped = false;    // _complete marker already present
  bool completed = false;  // all generations done after this call
  int generation = -1;     // last completed generation
  long evaluations = 0;
};

// Runs (or resumes) one cell.  Completed cells are skipped; a differing
// config snapshot is refused unless allow_config_drift.
CellResult run_cell(const ExperimentSpec& spec, const Condition& c, int run_index,
                    const EngineOptions& opts, bool allow_config_drift = false);

struct GridResult {
  std::vector<CellResult> cells;
};

// All (condition, run) cells; cells run in a worker pool, remaining workers
// parallelize offspring evaluation inside each cell.  Writes
// <output_dir>/manifest.json (the only file containing timestamps).
GridResult run_experiment_grid(const ExperimentSpec& spec, const EngineOptions& opts = {},
                               bool allow_config_drift = false);

struct CellRef {
  Condition condition;
  int run_index = 0;
  std::filesystem::path dir;
};

// Cells under output_dir that have a runlog, in (condition, run) order.
std::vector<CellRef> find_cells(const std::filesystem::path& output_dir);

struct ReplayResult {
  std::uint64_t id = 0;
  int h = 0;
  double logged_f = 0.0;
  double replayed_f = 0.0;
  SimResult result;
  SimTrace trace;
};

// Re-simulates a logged individual from its stored genotype and controller.
// Throws when the id is unknown or has no stored controller.
ReplayResult replay_individual(const std::filesystem::path& cell, std::uint64_t id,
                               const SimConfig& sim);

// Trace CSV: step,x,v,contacts,theta_0..theta_{h-1} with round-trip-exact
// number formatting.
void write_trace_csv(std::ostream& out, const SimTrace& trace, int h);

}  // namespace lamarck
