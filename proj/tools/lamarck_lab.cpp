#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "lamarck/analysis.hpp"
#include "lamarck/config.hpp"
#include "lamarck/experiment.hpp"

namespace {

struct SpecArgs {
  std::string preset = "paper";
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 0;
};

void add_spec_options(CLI::App* cmd, SpecArgs& a) {
  cmd->add_option("--preset", a.preset, "base preset: paper (full protocol) or desk (small grid)")
      ->check(CLI::IsMember({"paper", "desk"}))
      ->capture_default_str();
  cmd->add_option("--config", a.config_path, "config file applied over the preset")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", a.seed, "override the base seed");
  cmd->add_option("--workers", a.workers, "worker thread budget");
}

lamarck::ExperimentSpec resolve_spec(const CLI::App* cmd, const SpecArgs& a) {
  lamarck::ExperimentSpec spec =
      a.preset == "desk" ? lamarck::desk_preset() : lamarck::paper_preset();
  if (cmd->count("--config") > 0) lamarck::apply_config_file(spec, a.config_path);
  if (cmd->count("--seed") > 0) spec.base_seed = a.seed;
  if (cmd->count("--workers") > 0) spec.parallel_workers = a.workers;
  if (const char* env = std::getenv("LAMARCK_LAB_OUT"); env != nullptr && *env != '\0') {
    spec.output_dir = env;
  }
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const CLI::App* cmd, const SpecArgs& args, bool allow_drift) {
  const lamarck::ExperimentSpec spec = resolve_spec(cmd, args);
  const std::vector<std::string> problems = lamarck::validate_spec(spec);
  if (!problems.empty()) {
    for (const std::string& p : problems) std::cerr << "config error: " << p << '\n';
    return 2;
  }
  const lamarck::GridResult grid = lamarck::run_experiment_grid(spec, {}, allow_drift);
  long evaluations = 0;
  for (const lamarck::CellResult& c : grid.cells) {
    std::cout << lamarck::condition_name(c.condition) << " run " << std::setw(2)
              << std::setfill('0') << c.run_index << std::setfill(' ') << ": "
              << (c.skipped ? "already complete"
                            : (c.completed ? "completed" : "stopped"))
              << " (generation " << c.generation << ", " << c.evaluations << " evaluations)\n";
    evaluations += c.evaluations;
  }
  std::cout << grid.cells.size() << " cells, " << evaluations
            << " new objective evaluations; outputs under " << spec.output_dir << '\n';
  return 0;
}

int cmd_report(const CLI::App* cmd, const SpecArgs& args, const std::string& dir_arg, bool svg) {
  const lamarck::ExperimentSpec spec = resolve_spec(cmd, args);
  const std::filesystem::path dir = dir_arg.empty() ? spec.output_dir : dir_arg;
  lamarck::build_report(dir, {svg});
  std::cout << "report written to " << (dir / "report").string() << '\n';
  return 0;
}

int cmd_replay(const CLI::App* cmd, const SpecArgs& args, const std::string& cell_arg,
               std::uint64_t id, const std::string& out_arg, bool allow_drift) {
  const std::filesystem::path cell = cell_arg;
  const lamarck::ExperimentSpec user_spec = resolve_spec(cmd, args);
  lamarck::SimConfig sim = user_spec.evo.sim;

  const std::filesystem::path snapshot = cell / "config.ini";
  if (std::filesystem::exists(snapshot)) {
    lamarck::ExperimentSpec cell_spec = lamarck::paper_preset();
    lamarck::apply_config_text(cell_spec, slurp(snapshot));
    const bool user_specified = cmd->count("--config") > 0 || cmd->count("--preset") > 0;
    if (user_specified &&
        lamarck::render_config(user_spec) != lamarck::render_config(cell_spec)) {
      if (!allow_drift) {
        std::cerr << "error: supplied configuration differs from the cell's config.ini; pass "
                     "--allow-config-drift to replay under a different configuration\n";
        return 1;
      }
    } else {
      sim = cell_spec.evo.sim;
    }
  }

  const lamarck::ReplayResult res = lamarck::replay_individual(cell, id, sim);
  const std::filesystem::path out_path =
      out_arg.empty() ? cell / ("replay_" + std::to_string(id) + ".csv")
                      : std::filesystem::path(out_arg);
  {
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + out_path.string());
    lamarck::write_trace_csv(out, res.trace, res.h);
  }
  std::cout << std::setprecision(17);
  if (res.replayed_f != res.logged_f) {
    std::cerr << std::setprecision(17) << "error: replayed fitness " << res.replayed_f
              << " does not match logged fitness " << res.logged_f
              << " (was the run produced under a different configuration?)\n";
    return 1;
  }
  std::cout << "individual " << id << ": fitness " << res.replayed_f
            << " matches the log; trace written to " << out_path.string() << '\n';
  return 0;
}

int cmd_validate(const CLI::App* cmd, const SpecArgs& args, bool echo) {
  const lamarck::ExperimentSpec spec = resolve_spec(cmd, args);
  const std::vector<std::string> problems = lamarck::validate_spec(spec);
  if (!problems.empty()) {
    for (const std::string& p : problems) std::cerr << "config error: " << p << '\n';
    return 2;
  }
  std::cout << "configuration valid\n";
  if (echo) std::cout << lamarck::render_config(spec);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evolve modular-robot bodies and controllers, report, and replay"};
  app.require_subcommand(1);

  SpecArgs run_args;
  bool run_drift = false;
  CLI::App* run = app.add_subcommand("run", "execute (or resume) every configured run cell");
  add_spec_options(run, run_args);
  run->add_flag("--allow-config-drift", run_drift,
                "overwrite per-cell config snapshots that differ from the current config");

  SpecArgs report_args;
  std::string report_dir;
  bool report_svg = false;
  CLI::App* report = app.add_subcommand("report", "build CSV/JSON report tables from run logs");
  add_spec_options(report, report_args);
  report->add_option("dir", report_dir, "experiment output directory (default: configured)");
  report->add_flag("--svg", report_svg, "also render SVG charts");

  SpecArgs replay_args;
  std::string replay_cell;
  std::string replay_out;
  std::uint64_t replay_id = 0;
  bool replay_drift = false;
  CLI::App* replay =
      app.add_subcommand("replay", "re-simulate a logged individual and write its trace");
  add_spec_options(replay, replay_args);
  replay->add_option("cell", replay_cell, "run cell directory (…/<condition>/run_NN)")->required();
  replay->add_option("id", replay_id, "individual id")->required();
  replay->add_option("--out", replay_out, "trace CSV path (default: <cell>/replay_<id>.csv)");
  replay->add_flag("--allow-config-drift", replay_drift,
                   "allow replaying under a configuration that differs from the cell snapshot");

  SpecArgs validate_args;
  bool validate_echo = false;
  CLI::App* validate = app.add_subcommand("validate-config", "parse and validate a configuration");
  add_spec_options(validate, validate_args);
  validate->add_flag("--echo", validate_echo, "print the canonical configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run, run_args, run_drift);
    if (report->parsed()) return cmd_report(report, report_args, report_dir, report_svg);
    if (replay->parsed())
      return cmd_replay(replay, replay_args, replay_cell, replay_id, replay_out, replay_drift);
    if (validate->parsed()) return cmd_validate(validate, validate_args, validate_echo);
  } catch (const lamarck::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
