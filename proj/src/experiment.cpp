#include "lamarck/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "lamarck/parallel.hpp"

namespace lamarck {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kCheckpointMagic[4] = {'L', 'M', 'C', 'P'};

std::string num(double v) { return ordered_json(v).dump(); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

std::string iso_utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void open_append(std::ofstream& out, const std::filesystem::path& p) {
  out.open(p, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + p.string());
}

void open_trunc(std::ofstream& out, const std::filesystem::path& p) {
  out.open(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + p.string());
}

void truncate_to(const std::filesystem::path& p, std::uint64_t bytes) {
  if (!std::filesystem::exists(p)) {
    if (bytes == 0) {
      std::ofstream touch(p, std::ios::binary);
      return;
    }
    throw std::runtime_error("checkpoint references missing stream " + p.string());
  }
  const std::uint64_t size = std::filesystem::file_size(p);
  if (size < bytes) {
    throw std::runtime_error("stream " + p.string() + " shorter than its checkpointed length");
  }
  if (size > bytes) std::filesystem::resize_file(p, bytes);
}

}  // namespace

FileRunSink::FileRunSink(std::filesystem::path dir, bool keep_all_checkpoints)
    : dir_(std::move(dir)), keep_all_(keep_all_checkpoints) {
  std::filesystem::create_directories(dir_);
}

bool FileRunSink::has_checkpoint() const {
  return std::filesystem::exists(dir_ / "checkpoint.bin");
}

RunState FileRunSink::load_checkpoint() {
  std::ifstream in(dir_ / "checkpoint.bin", std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + (dir_ / "checkpoint.bin").string());
  char magic[4] = {};
  in.read(magic, 4);
  std::uint64_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (!in || std::memcmp(magic, kCheckpointMagic, 4) != 0 || version != 1) {
    throw std::runtime_error("unrecognized checkpoint file in " + dir_.string());
  }
  std::uint64_t sizes[4] = {};
  in.read(reinterpret_cast<char*>(sizes), sizeof sizes);
  if (!in) throw std::runtime_error("truncated checkpoint header in " + dir_.string());
  RunState state = read_run_state(in);

  runlog_bytes_ = sizes[0];
  genotype_bytes_ = sizes[1];
  transfer_bytes_ = sizes[2];
  controller_bytes_ = sizes[3];
  truncate_to(dir_ / "runlog.jsonl", runlog_bytes_);
  truncate_to(dir_ / "genotypes.jsonl", genotype_bytes_);
  truncate_to(dir_ / "transfers.jsonl", transfer_bytes_);
  truncate_to(dir_ / "controllers.bin", controller_bytes_);
  open_append(runlog_, dir_ / "runlog.jsonl");
  open_append(genotypes_, dir_ / "genotypes.jsonl");
  open_append(transfers_, dir_ / "transfers.jsonl");
  open_append(controllers_, dir_ / "controllers.bin");
  return state;
}

void FileRunSink::open_fresh() {
  runlog_bytes_ = genotype_bytes_ = transfer_bytes_ = controller_bytes_ = 0;
  open_trunc(runlog_, dir_ / "runlog.jsonl");
  open_trunc(genotypes_, dir_ / "genotypes.jsonl");
  open_trunc(transfers_, dir_ / "transfers.jsonl");
  open_trunc(controllers_, dir_ / "controllers.bin");
}

void FileRunSink::write_line(std::ofstream& out, std::uint64_t& bytes, const std::string& json) {
  out << json << '\n';
  bytes += json.size() + 1;
}

void FileRunSink::runlog_line(const std::string& json) { write_line(runlog_, runlog_bytes_, json); }
void FileRunSink::genotype_line(const std::string& json) {
  write_line(genotypes_, genotype_bytes_, json);
}
void FileRunSink::transfer_line(const std::string& json) {
  write_line(transfers_, transfer_bytes_, json);
}

void FileRunSink::controller_blob(std::uint64_t id, int h, const ParamVector& params) {
  append_controller(controllers_, id, h, params);
  controller_bytes_ += 3 * sizeof(std::uint64_t) + sizeof(double) * static_cast<std::uint64_t>(params.size());
}

void FileRunSink::checkpoint(const RunState& state) {
  runlog_.flush();
  genotypes_.flush();
  transfers_.flush();
  controllers_.flush();
  const std::filesystem::path tmp = dir_ / "checkpoint.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(kCheckpointMagic, 4);
    const std::uint64_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::uint64_t sizes[4] = {runlog_bytes_, genotype_bytes_, transfer_bytes_,
                                    controller_bytes_};
    out.write(reinterpret_cast<const char*>(sizes), sizeof sizes);
    write_run_state(out, state, true);
    if (!out) throw std::runtime_error("failed writing checkpoint in " + dir_.string());
  }
  std::filesystem::rename(tmp, dir_ / "checkpoint.bin");
  if (keep_all_) {
    char name[32];
    std::snprintf(name, sizeof name, "checkpoint_gen_%04d.bin", state.generation);
    std::filesystem::copy_file(dir_ / "checkpoint.bin", dir_ / name,
                               std::filesystem::copy_options::overwrite_existing);
  }
}

void FileRunSink::finish() {
  if (runlog_.is_open()) runlog_.close();
  if (genotypes_.is_open()) genotypes_.close();
  if (transfers_.is_open()) transfers_.close();
  if (controllers_.is_open()) controllers_.close();
}

std::filesystem::path cell_dir(const ExperimentSpec& spec, const Condition& c, int run_index) {
  char name[16];
  std::snprintf(name, sizeof name, "run_%02d", run_index);
  return std::filesystem::path(spec.output_dir) / condition_name(c) / name;
}

EvolutionConfig cell_config(const ExperimentSpec& spec, const Condition& c, int run_index) {
  EvolutionConfig cfg = spec.evo;
  cfg.inheritance_mode = c.inheritance;
  cfg.fitness_mode = c.fitness;
  cfg.master_seed = run_seed(spec, c, run_index);
  return cfg;
}

CellResult run_cell(const ExperimentSpec& spec, const Condition& c, int run_index,
                    const EngineOptions& opts, bool allow_config_drift) {
  CellResult res;
  res.condition = c;
  res.run_index = run_index;
  const std::filesystem::path dir = cell_dir(spec, c, run_index);
  std::filesystem::create_directories(dir);
  const EvolutionConfig cfg = cell_config(spec, c, run_index);

  if (std::filesystem::exists(dir / "_complete")) {
    res.skipped = true;
    res.completed = true;
    res.generation = cfg.generations;
    return res;
  }

  const std::string canonical = render_config(spec);
  const std::filesystem::path snapshot = dir / "config.ini";
  if (std::filesystem::exists(snapshot)) {
    if (slurp(snapshot) != canonical) {
      if (!allow_config_drift) {
        throw std::runtime_error("configuration drift in " + dir.string() +
                                 ": existing config.ini differs; pass --allow-config-drift to "
                                 "override the snapshot");
      }
      spill(snapshot, canonical);
    }
  } else {
    spill(snapshot, canonical);
  }

  FileRunSink sink(dir, spec.keep_all_checkpoints);
  RunState resume_state;
  const RunState* resume = nullptr;
  if (sink.has_checkpoint()) {
    resume_state = sink.load_checkpoint();
    resume = &resume_state;
  } else {
    sink.open_fresh();
  }
  const RunState final_state = run_evolution(cfg, sink, opts, resume);
  sink.finish();

  res.generation = final_state.generation;
  res.evaluations = final_state.total_evaluations;
  if (!final_state.interrupted && final_state.generation == cfg.generations) {
    ordered_json marker;
    marker["condition"] = condition_name(c);
    marker["run"] = run_index;
    marker["seed"] = cfg.master_seed;
    marker["generations"] = final_state.generation;
    marker["total_evaluations"] = final_state.total_evaluations;
    spill(dir / "_complete", marker.dump() + "\n");
    res.completed = true;
  }
  return res;
}

GridResult run_experiment_grid(const ExperimentSpec& spec, const EngineOptions& opts,
                               bool allow_config_drift) {
  const std::vector<std::string> problems = validate_spec(spec);
  if (!problems.empty()) {
    std::string msg = "invalid experiment configuration:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  const int runs = spec.runs_per_condition;
  const std::size_t ncells = spec.conditions.size() * static_cast<std::size_t>(runs);
  const int budget = std::max(1, spec.parallel_workers);
  const int outer = static_cast<int>(std::min<std::size_t>(budget, std::max<std::size_t>(ncells, 1)));
  const int inner = std::max(1, budget / std::max(outer, 1));
  EngineOptions cell_opts = opts;
  cell_opts.workers = inner;

  GridResult grid;
  grid.cells.resize(ncells);
  parallel_for(ncells, outer, [&](std::size_t i) {
    const Condition& c = spec.conditions[i / static_cast<std::size_t>(runs)];
    const int r = static_cast<int>(i % static_cast<std::size_t>(runs));
    grid.cells[i] = run_cell(spec, c, r, cell_opts, allow_config_drift);
  });

  ordered_json manifest;
  manifest["written_at"] = iso_utc_now();
  manifest["output_dir"] = spec.output_dir;
  manifest["runs_per_condition"] = runs;
  ordered_json cells = ordered_json::array();
  for (const CellResult& r : grid.cells) {
    ordered_json c;
    c["condition"] = condition_name(r.condition);
    c["run"] = r.run_index;
    c["seed"] = run_seed(spec, r.condition, r.run_index);
    c["skipped"] = r.skipped;
    c["completed"] = r.completed;
    c["generation"] = r.generation;
    c["evaluations"] = r.evaluations;
    cells.push_back(std::move(c));
  }
  manifest["cells"] = std::move(cells);
  std::filesystem::create_directories(spec.output_dir);
  spill(std::filesystem::path(spec.output_dir) / "manifest.json", manifest.dump(2) + "\n");
  return grid;
}

std::vector<CellRef> find_cells(const std::filesystem::path& output_dir) {
  std::vector<CellRef> cells;
  for (const Condition& c : all_conditions()) {
    const std::filesystem::path cond_dir = output_dir / condition_name(c);
    if (!std::filesystem::is_directory(cond_dir)) continue;
    std::vector<CellRef> found;
    for (const auto& entry : std::filesystem::directory_iterator(cond_dir)) {
      if (!entry.is_directory()) continue;
      const std::string name = entry.path().filename().string();
      if (name.rfind("run_", 0) != 0) continue;
      int idx = -1;
      try {
        idx = std::stoi(name.substr(4));
      } catch (const std::exception&) {
        continue;
      }
      if (!std::filesystem::exists(entry.path() / "runlog.jsonl")) continue;
      found.push_back({c, idx, entry.path()});
    }
    std::sort(found.begin(), found.end(),
              [](const CellRef& a, const CellRef& b) { return a.run_index < b.run_index; });
    cells.insert(cells.end(), found.begin(), found.end());
  }
  return cells;
}

ReplayResult replay_individual(const std::filesystem::path& cell, std::uint64_t id,
                               const SimConfig& sim) {
  ReplayResult res;
  res.id = id;

  {
    std::ifstream in(cell / "runlog.jsonl");
    if (!in) throw std::runtime_error("cannot open " + (cell / "runlog.jsonl").string());
    const RunLogData log = parse_runlog(in);
    bool found = false;
    for (const LogRecord& r : log.records) {
      if (r.id == id) {
        res.logged_f = r.f_locomotion;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("individual " + std::to_string(id) + " not found in " +
                               (cell / "runlog.jsonl").string());
    }
  }

  BodyGenotype genotype;
  {
    std::ifstream in(cell / "genotypes.jsonl");
    if (!in) throw std::runtime_error("cannot open " + (cell / "genotypes.jsonl").string());
    std::string line;
    bool found = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const GenotypeRecord rec = genotype_record_from_json(line);
      if (rec.id == id) {
        genotype = rec.genotype;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("individual " + std::to_string(id) + " has no genotype record");
    }
  }

  std::ifstream bin(cell / "controllers.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + (cell / "controllers.bin").string());
  const std::optional<ControllerEntry> entry = find_controller(bin, id);
  if (!entry) {
    throw std::runtime_error("individual " + std::to_string(id) +
                             " has no stored controller (infeasible bodies are never simulated)");
  }

  const BodyPhenotype phen = build_phenotype(genotype);
  res.h = entry->h;
  res.result = simulate(phen, entry->params, sim, &res.trace);
  res.replayed_f = res.result.f;
  return res;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace, int h) {
  out << "step,x,v,contacts";
  for (int k = 0; k < h; ++k) out << ",theta_" << k;
  out << '\n';
  for (const SimTrace::Row& row : trace.rows) {
    out << row.step << ',' << num(row.x) << ',' << num(row.v) << ',' << row.contacts;
    for (int k = 0; k < h; ++k) out << ',' << num(row.theta[static_cast<std::size_t>(k)]);
    out << '\n';
  }
}

}  // namespace lamarck
