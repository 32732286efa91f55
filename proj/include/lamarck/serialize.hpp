#pragma once

#include <array>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lamarck/evolution.hpp"

namespace lamarck {

// --- JSON lines (stable field order, compact, newline-free) ---------------

std::string genotype_json(const BodyNode& node);
BodyNode genotype_node_from_json(const std::string& json);

struct GenotypeRecord {
  std::uint64_t id = 0;
  int birth_generation = 0;
  std::vector<std::uint64_t> parents;
  BodyGenotype genotype;
};
std::string genotype_record_json(const Individual& ind);
GenotypeRecord genotype_record_from_json(const std::string& line);

std::string runlog_record_json(const Individual& ind, int gen);
std::string runlog_summary_json(int gen, double mean_f, double max_f,
                                std::optional<double> mean_parent_dissimilarity,
                                double mean_initial_fitness);

struct TransferRecord {
  int gen = 0;
  std::uint64_t id = 0;         // offspring
  std::uint64_t parent_id = 0;  // transfer source (closest parent)
  int d_p = 0;
  int d_o = 0;
  int shared = 0;
  double alpha = 0.0;
  double sigma_p = 0.0;
  double sigma_o = 0.0;
  int edit_distance = 0;
};
std::string transfer_record_json(const TransferRecord& t);

// Parsed runlog (for analysis and replay).
struct LogRecord {
  int gen = 0;
  std::uint64_t id = 0;
  std::vector<std::uint64_t> parents;
  std::optional<std::uint64_t> closest_parent;
  std::optional<int> edit_distance;
  std::optional<double> parent_dissimilarity;
  std::array<double, 8> descriptors{};
  double f_locomotion = 0.0;
  double f_novelty = 0.0;
  double f_combined = 0.0;
  double initial_fitness = 0.0;
  double d = 0.0;
  double l = 0.0;
  int c_hinge = 0;
  long eval_count = 0;
};

struct SummaryRecord {
  int gen = 0;
  double mean_f = 0.0;
  double max_f = 0.0;
  std::optional<double> mean_parent_dissimilarity;
  double mean_initial_fitness = 0.0;
};

struct RunLogData {
  std::vector<LogRecord> records;
  std::vector<SummaryRecord> summaries;
};
RunLogData parse_runlog(std::istream& in);

// --- controllers.bin: [u64 id][u64 h][u64 count][count f64] repeated -------

void append_controller(std::ostream& out, std::uint64_t id, int h, const ParamVector& params);

struct ControllerEntry {
  std::uint64_t id = 0;
  int h = 0;
  ParamVector params;
};
std::optional<ControllerEntry> read_controller_entry(std::istream& in);
std::optional<ControllerEntry> find_controller(std::istream& in, std::uint64_t id);

// --- checkpoint payload ----------------------------------------------------

// CMA states are stored as the lower triangle of the Cholesky factor, so a
// resumed run continues bit-exactly.  Phenotypes and descriptors are
// recomputed on load.
void write_run_state(std::ostream& out, const RunState& state, bool with_cma_states);
RunState read_run_state(std::istream& in);

}  // namespace lamarck
