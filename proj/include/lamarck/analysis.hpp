#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lamarck/config.hpp"
#include "lamarck/serialize.hpp"

namespace lamarck {

struct RunData {
  Condition condition;
  int run_index = 0;
  RunLogData log;
};

// Parses every cell runlog found under output_dir, in (condition, run) order.
std::vector<RunData> load_runs(const std::filesystem::path& output_dir);

// Per-condition aggregates over runs.  All per-generation arrays have length
// generations + 1 (index = generation).
struct ConditionSummary {
  Condition condition;
  int runs = 0;
  int generations = 0;
  std::vector<double> mean_f;              // mean over runs of population mean
  std::vector<double> max_f;               // mean over runs of population max
  std::vector<double> mean_dissimilarity;  // NaN at generation 0
  std::vector<double> run_final_mean_f;    // one entry per run
  double overall_mean_dissimilarity = 0;   // over runs and generations >= 1
};

ConditionSummary summarize_condition(const Condition& c, const std::vector<RunData>& runs);

// One row per distinct individual: its first runlog record (survivors are
// re-logged every generation; scores other than novelty never change).
struct IndividualPoint {
  std::uint64_t id = 0;
  int gen = 0;
  double f_locomotion = 0.0;
  double initial_fitness = 0.0;
  std::optional<double> parent_dissimilarity;
};

std::vector<IndividualPoint> unique_individuals(const RunLogData& log);

// Splits at the global median parent dissimilarity: <= median goes to
// .first (more similar), > median to .second.  Entries without a
// dissimilarity (the initial population) are ignored.
std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> similarity_split(
    const std::vector<IndividualPoint>& individuals);

// cap = max f_locomotion over `combined`; pure individuals above the cap are
// removed, not clipped.  Throws std::invalid_argument when `combined` is
// empty.
std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> capped_comparison(
    const std::vector<IndividualPoint>& pure, const std::vector<IndividualPoint>& combined);

struct ReportOptions {
  bool svg = false;  // also emit line/box charts rendered from the CSVs
};

// Writes report/*.csv and report/tests.json under output_dir.  Missing
// conditions produce a partial report with entries in the "warnings" array.
// Regeneration from the same logs is byte-identical.  Throws when no runs
// exist.
void build_report(const std::filesystem::path& output_dir, const ReportOptions& opts = {});

}  // namespace lamarck
