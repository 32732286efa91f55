// Acceptance harness: ten self-contained checks, one PASS/FAIL line each.
// Exit status is the number of failed checks.  Optional arguments select a
// subset by index;  --scratch <dir> relocates the work area used by the
// long-running checks.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lamarck/analysis.hpp"
#include "lamarck/experiment.hpp"
#include "lamarck/inheritance.hpp"
#include "lamarck/stats.hpp"
#include "stats_fixtures.hpp"
#include "test_util.hpp"

using namespace lamarck;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Check {
  int index;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

fs::path g_scratch = fs::temp_directory_path() / "lamarck_acceptance";

fs::path scratch(const std::string& name) {
  const fs::path p = g_scratch / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int hardware_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(hc == 0 ? 4u : hc, 8u));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<missing " + p.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// Discards all engine output; used when only the accounting matters.
struct NullSink : RunSink {
  void runlog_line(const std::string&) override {}
  void genotype_line(const std::string&) override {}
  void transfer_line(const std::string&) override {}
  void controller_blob(std::uint64_t, int, const ParamVector&) override {}
  void checkpoint(const RunState&) override {}
};

// ---------------------------------------------------------------------------
// 1. Fitness function exactness.

Outcome check_fitness_exactness() {
  const SimConfig cfg;  // defaults: contact penalty 0.005, cutoff 200
  SimResult r;
  r.d = 2.5;
  r.l = 0.3;
  r.c_hinge = 0;
  const double f1 = fitness(r, cfg);
  r.d = 1.0;
  r.l = 0.0;
  r.c_hinge = 100;
  const double f2 = fitness(r, cfg);
  r.c_hinge = 201;
  const double f3 = fitness(r, cfg);
  const bool ok = f1 == 2.2 && f2 == 0.5 && f3 == -1.0;
  return {ok, "f(2.5,0.3,0)=" + fmt(f1) + " f(1,0,100)=" + fmt(f2) + " f(1,0,201)=" + fmt(f3)};
}

// ---------------------------------------------------------------------------
// 2. Constraint suite over random genotypes.

Outcome check_constraint_suite() {
  long violations = 0;
  long low_hinge_bodies = 0;
  long simulate_guard_failures = 0;
  int checked_throws = 0;
  IdSource ids(1);
  const SimConfig sim;

  for (int trial = 0; trial < 10000; ++trial) {
    Rng rng(static_cast<std::uint64_t>(trial) * 2654435761ULL + 17);
    const int depth = 2 + trial % 3;
    BodyGenotype g = random_genotype(depth, rng, ids);
    if (trial % 2 == 1) g = mutate(mutate(g, rng, ids), rng, ids);
    const BodyGenotype capped = enforce_caps(g);
    const BodyPhenotype p = build_phenotype(capped);

    if (p.m > 25 || p.h > 12 || p.m < 1) ++violations;
    std::set<std::array<int, 3>> cells;
    for (const Placement& pl : p.placements) cells.insert(pl.pose.cell);
    if (cells.size() != p.placements.size()) ++violations;

    const bool feasible = check_feasibility(p).feasible;
    if (feasible != (p.h >= 4)) ++violations;
    if (p.h < 4) {
      ++low_hinge_bodies;
      if (checked_throws < 50) {  // the guard itself, spot-checked
        ++checked_throws;
        bool threw = false;
        try {
          simulate(p, ParamVector::Zero(param_count(p.h)), sim);
        } catch (const std::exception&) {
          threw = true;
        }
        if (!threw) ++simulate_guard_failures;
      }
    }
  }

  // Engine-level: bodies below the hinge threshold keep an all-zero score.
  EvolutionConfig cfg;
  cfg.mu = 6;
  cfg.lambda = 6;
  cfg.n_mut = 5;
  cfg.n_cross = 1;
  cfg.generations = 1;
  cfg.learning.population_size = 4;
  cfg.learning.max_evaluations = 8;
  cfg.master_seed = 99;
  NullSink sink;
  EngineOptions opts;
  opts.learner = stub_learning;
  opts.objective_factory = [](const BodyPhenotype&) {
    return Objective([](const Eigen::VectorXd&) { return 1.0; });
  };
  opts.detail_factory = [](const BodyPhenotype&, const ParamVector&) { return SimResult{}; };
  opts.write_checkpoints = false;
  RunState end = run_evolution(cfg, sink, opts);
  long zero_score_failures = 0;
  for (const Individual& ind : end.population) {
    if (!ind.feasible && (ind.f_locomotion != 0.0 || ind.eval_count != 0)) ++zero_score_failures;
  }

  const bool ok = violations == 0 && simulate_guard_failures == 0 && zero_score_failures == 0 &&
                  low_hinge_bodies > 0;
  return {ok, "violations=" + std::to_string(violations) +
                  " low-hinge bodies seen=" + std::to_string(low_hinge_bodies) +
                  " guard failures=" + std::to_string(simulate_guard_failures) +
                  " zero-score failures=" + std::to_string(zero_score_failures)};
}

// ---------------------------------------------------------------------------
// 3. Tree edit distance vs a brute-force oracle.

// All ordered label trees with exactly n nodes over the given labels;
// children are slotted in positional order.  Ids are irrelevant to the
// distance and left at zero.
std::vector<BodyNode> enumerate_trees(int n,
                                      const std::vector<std::pair<ModuleKind, int>>& labels) {
  std::vector<BodyNode> out;
  if (n <= 0) return out;
  if (n == 1) {
    for (const auto& [kind, rot] : labels) {
      BodyNode node;
      node.kind = kind;
      node.rotation = rot;
      node.slot = -1;
      out.push_back(node);
    }
    return out;
  }
  // Split the n-1 non-root nodes into an ordered sequence of child subtrees.
  std::vector<std::vector<int>> compositions;
  std::vector<int> cur;
  std::function<void(int)> compose = [&](int rest) {
    if (rest == 0) {
      compositions.push_back(cur);
      return;
    }
    for (int part = 1; part <= rest; ++part) {
      cur.push_back(part);
      compose(rest - part);
      cur.pop_back();
    }
  };
  compose(n - 1);

  for (const auto& [kind, rot] : labels) {
    for (const std::vector<int>& parts : compositions) {
      std::vector<std::vector<BodyNode>> choices;
      for (int part : parts) choices.push_back(enumerate_trees(part, labels));
      std::vector<std::size_t> pick(parts.size(), 0);
      while (true) {
        BodyNode node;
        node.kind = kind;
        node.rotation = rot;
        node.slot = -1;
        for (std::size_t c = 0; c < parts.size(); ++c) {
          BodyNode child = choices[c][pick[c]];
          child.slot = static_cast<int>(c);
          node.children.push_back(std::move(child));
        }
        out.push_back(std::move(node));
        std::size_t c = 0;
        for (; c < pick.size(); ++c) {
          if (++pick[c] < choices[c].size()) break;
          pick[c] = 0;
        }
        if (c == pick.size()) break;
      }
    }
  }
  return out;
}

Outcome check_ted_oracle() {
  const std::vector<std::pair<ModuleKind, int>> labels = {{ModuleKind::Brick, 0},
                                                          {ModuleKind::ActiveHinge, 0}};
  std::vector<BodyGenotype> trees;
  for (int n = 1; n <= 5; ++n) {
    for (BodyNode& node : enumerate_trees(n, labels)) {
      BodyGenotype g;
      g.root = std::move(node);
      trees.push_back(std::move(g));
    }
  }
  if (trees.size() != 550) {
    return {false, "expected 550 two-label trees, enumerated " + std::to_string(trees.size())};
  }

  long mismatches = 0;
  long pairs = 0;
  for (const BodyGenotype& a : trees) {
    for (const BodyGenotype& b : trees) {
      ++pairs;
      const int got = tree_edit_distance(a, b);
      const int want = testutil::oracle_tree_edit_distance(a, b);
      if (got != want && ++mismatches <= 3) {
        std::cerr << "  ted mismatch: " << testutil::tree_to_string(a.root) << " vs "
                  << testutil::tree_to_string(b.root) << " got " << got << " want " << want
                  << "\n";
      }
    }
  }

  // Reinforcement over the full (kind, rotation) label space.
  IdSource ids(1);
  long random_mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    Rng rng(7000 + static_cast<std::uint64_t>(trial));
    BodyGenotype a = random_genotype(2 + trial % 2, rng, ids);
    BodyGenotype b = random_genotype(2 + (trial + 1) % 2, rng, ids);
    if (tree_edit_distance(a, b) != testutil::oracle_tree_edit_distance(a, b)) {
      ++random_mismatches;
    }
  }

  const bool ok = mismatches == 0 && random_mismatches == 0;
  return {ok, std::to_string(pairs) + " exhaustive pairs, mismatches=" +
                  std::to_string(mismatches) + ", random mismatches=" +
                  std::to_string(random_mismatches)};
}

// ---------------------------------------------------------------------------
// 4. Inheritance math.

Eigen::MatrixXd random_spd(int dim, double min_eig, double max_eig, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = u(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  Eigen::MatrixXd q = qr.householderQ();
  std::uniform_real_distribution<double> ev(min_eig, max_eig);
  Eigen::VectorXd eigs(dim);
  for (int i = 0; i < dim; ++i) eigs(i) = ev(rng);
  const Eigen::MatrixXd c = q * eigs.asDiagonal() * q.transpose();
  return ((c + c.transpose()) / 2.0).eval();
}

Outcome check_inheritance_math() {
  long failures = 0;
  long repairs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng(40000 + static_cast<std::uint64_t>(trial));
    std::uniform_int_distribution<int> dims(5, 50);
    const int d_p = dims(rng);
    const int d_o = dims(rng);
    const Eigen::MatrixXd c_p = random_spd(d_p, 1e-4, 2.0, rng);

    CorrespondenceMap map;
    map.d_p = d_p;
    map.d_o = d_o;
    std::vector<int> pidx(static_cast<std::size_t>(d_p));
    std::vector<int> oidx(static_cast<std::size_t>(d_o));
    std::iota(pidx.begin(), pidx.end(), 0);
    std::iota(oidx.begin(), oidx.end(), 0);
    std::shuffle(pidx.begin(), pidx.end(), rng);
    std::shuffle(oidx.begin(), oidx.end(), rng);
    std::uniform_int_distribution<int> nshared(0, std::min(d_p, d_o));
    const int s = nshared(rng);
    for (int k = 0; k < s; ++k) map.shared.push_back({pidx[k], oidx[k]});

    bool repaired = false;
    const Eigen::MatrixXd c_o = inherit_covariance(c_p, map, &repaired);
    if (repaired) ++repairs;

    bool bad = false;
    for (int i = 0; i < d_o && !bad; ++i)
      for (int j = 0; j < d_o; ++j)
        if (c_o(i, j) != c_o(j, i)) {
          bad = true;
          break;
        }
    for (const auto& [ip, io] : map.shared) {
      for (const auto& [jp, jo] : map.shared) {
        if (c_o(io, jo) != c_p(ip, jp)) bad = true;
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_o);
    if (eig.eigenvalues().minCoeff() < 1e-12) bad = true;
    if (bad) ++failures;
  }

  // Step-size blend: identity at alpha = 0, and the 4->6 hinge growth value.
  const double keep = inherit_sigma(0.3, param_count(4), param_count(4), 0.5);
  const double blend = inherit_sigma(0.2, param_count(4), param_count(6), 0.5);
  const bool sigma_ok = keep == 0.3 && std::abs(blend - 0.2218855218855219) <= 1e-9;

  // Mean transfer index-trace fixture.
  Eigen::VectorXd mu_p(4);
  mu_p << 1, 2, 3, 4;
  CorrespondenceMap m;
  m.d_p = 4;
  m.d_o = 3;
  m.shared = {{0, 2}, {3, 0}};
  const Eigen::VectorXd mu_o = inherit_mean(mu_p, m, 3);
  const bool mean_ok = mu_o.size() == 3 && mu_o(0) == 4.0 && mu_o(1) == 0.0 && mu_o(2) == 1.0;

  const bool ok = failures == 0 && repairs == 0 && sigma_ok && mean_ok;
  return {ok, "sweep failures=" + std::to_string(failures) + " repairs=" +
                  std::to_string(repairs) + " sigma(4->6)=" + fmt(blend) +
                  (mean_ok ? " mean fixture ok" : " mean fixture WRONG")};
}

// ---------------------------------------------------------------------------
// 5. CMA-ES convergence on the sphere.

Outcome check_cma_convergence() {
  int successes = 0;
  double worst = 0.0;
  for (int seed = 1; seed <= 20; ++seed) {
    const Objective sphere = [](const Eigen::VectorXd& x) { return -x.squaredNorm(); };
    CmaState state = cma_init(20, Eigen::VectorXd::Constant(20, 0.08), 0.05, 20);
    Rng rng(static_cast<std::uint64_t>(seed));
    const LearningResult res = run_learning(sphere, std::move(state), {20, 1000}, rng);
    if (res.best_fitness >= -1e-3) ++successes;
    worst = std::min(worst, res.best_fitness);
  }
  const bool ok = successes >= 19;
  return {ok, std::to_string(successes) + "/20 seeds reached -1e-3; worst best=" + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 6. Warm-start benefit on a grown shifted sphere.

Outcome check_warm_start_benefit() {
  const int d_p = 15;
  const int d_o = 20;
  std::vector<double> warm_best, cold_best;
  int wins = 0, losses = 0;

  for (int seed = 1; seed <= 20; ++seed) {
    Rng target_rng(1000 + static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd t_p(d_p);
    for (int i = 0; i < d_p; ++i) t_p(i) = u(target_rng);
    Eigen::VectorXd t_o(d_o);
    t_o.head(d_p) = t_p;
    t_o.tail(d_o - d_p).setConstant(0.3);

    const Objective parent_task = [&t_p](const Eigen::VectorXd& x) {
      return -(x - t_p).squaredNorm();
    };
    const Objective child_task = [&t_o](const Eigen::VectorXd& x) {
      return -(x - t_o).squaredNorm();
    };

    Rng parent_rng(2000 + static_cast<std::uint64_t>(seed));
    LearningResult parent = run_learning(
        parent_task, cma_init(d_p, Eigen::VectorXd::Zero(d_p), 0.5, 20), {20, 600}, parent_rng);

    CorrespondenceMap map;
    map.d_p = d_p;
    map.d_o = d_o;
    for (int i = 0; i < d_p; ++i) map.shared.push_back({i, i});
    const double sigma_o = inherit_sigma(parent.state.sigma, d_p, d_o, 0.5);
    CmaState warm = cma_init(d_o, inherit_mean(parent.state.mean, map, d_o), sigma_o, 20);
    cma_set_covariance(warm, inherit_covariance(cma_covariance(parent.state), map));
    CmaState cold = cma_init(d_o, Eigen::VectorXd::Zero(d_o), 0.5, 20);

    // Paired sampling noise: both arms consume identical draw sequences.
    Rng warm_rng(3000 + static_cast<std::uint64_t>(seed));
    Rng cold_rng(3000 + static_cast<std::uint64_t>(seed));
    const double w =
        run_learning(child_task, std::move(warm), {20, 200}, warm_rng).best_fitness;
    const double c =
        run_learning(child_task, std::move(cold), {20, 200}, cold_rng).best_fitness;
    warm_best.push_back(w);
    cold_best.push_back(c);
    if (w > c) ++wins;
    if (c > w) ++losses;
  }

  const double med_warm = median(warm_best);
  const double med_cold = median(cold_best);
  const double p = sign_test_one_sided(wins, wins + losses);
  const bool ok = med_warm > med_cold && p < 0.05;
  return {ok, "median warm=" + fmt(med_warm) + " cold=" + fmt(med_cold) + " wins=" +
                  std::to_string(wins) + "/20 sign-test p=" + fmt(p)};
}

// ---------------------------------------------------------------------------
// 7. Desk-scale 2x2 directional reproduction.

Outcome check_desk_grid() {
  const fs::path out = scratch("desk_grid");
  ExperimentSpec spec = desk_preset();
  spec.runs_per_condition = 10;
  spec.output_dir = out.string();
  spec.parallel_workers = hardware_workers();
  run_experiment_grid(spec);

  const std::vector<RunData> runs = load_runs(out);
  auto final_medians = [&](const Condition& c) {
    const ConditionSummary s = summarize_condition(c, runs);
    std::vector<double> finals = s.run_final_mean_f;
    return median(finals);
  };
  const Condition dar_pure{InheritanceMode::Darwinian, FitnessMode::Pure};
  const Condition dar_comb{InheritanceMode::Darwinian, FitnessMode::Combined};
  const Condition lam_pure{InheritanceMode::Lamarckian, FitnessMode::Pure};
  const Condition lam_comb{InheritanceMode::Lamarckian, FitnessMode::Combined};

  const double m_dp = final_medians(dar_pure);
  const double m_dc = final_medians(dar_comb);
  const double m_lp = final_medians(lam_pure);
  const double m_lc = final_medians(lam_comb);

  const bool a = m_lp > m_dp;
  const bool b = (m_lp - m_lc) > (m_dp - m_dc);

  const double dis_dp = summarize_condition(dar_pure, runs).overall_mean_dissimilarity;
  const double dis_dc = summarize_condition(dar_comb, runs).overall_mean_dissimilarity;
  const double dis_lp = summarize_condition(lam_pure, runs).overall_mean_dissimilarity;
  const double dis_lc = summarize_condition(lam_comb, runs).overall_mean_dissimilarity;
  const bool c = dis_dc > dis_dp && dis_lc > dis_lp;

  std::vector<IndividualPoint> lam_pure_points;
  for (const RunData& r : runs) {
    if (!(r.condition == lam_pure)) continue;
    for (const IndividualPoint& pt : unique_individuals(r.log)) {
      if (pt.parent_dissimilarity.has_value()) lam_pure_points.push_back(pt);
    }
  }
  auto [more_similar, less_similar] = similarity_split(lam_pure_points);
  auto mean_initial = [](const std::vector<IndividualPoint>& pts) {
    double s = 0;
    for (const IndividualPoint& p : pts) s += p.initial_fitness;
    return pts.empty() ? 0.0 : s / static_cast<double>(pts.size());
  };
  const bool d = !more_similar.empty() && !less_similar.empty() &&
                 mean_initial(more_similar) >= mean_initial(less_similar);

  const bool ok = a && b && c && d;
  return {ok, std::string("(a) lam-pure ") + fmt(m_lp) + (a ? " > " : " !> ") + fmt(m_dp) +
                  " dar-pure; (b) drop lam " + fmt(m_lp - m_lc) + (b ? " > " : " !> ") +
                  fmt(m_dp - m_dc) + " dar; (c) dissim comb>pure " + (c ? "both" : "VIOLATED") +
                  " [dar " + fmt(dis_dc) + " vs " + fmt(dis_dp) + ", lam " + fmt(dis_lc) +
                  " vs " + fmt(dis_lp) + "]; (d) initial-f similar " +
                  fmt(mean_initial(more_similar)) + (d ? " >= " : " !>= ") +
                  fmt(mean_initial(less_similar))};
}

// ---------------------------------------------------------------------------
// 8. Statistics oracle fixtures.

Outcome check_stats_oracle() {
  double worst = 0.0;
  long failures = 0;
  for (const stats_fixtures::WelchCase& c : stats_fixtures::welch_cases) {
    const TestResult r = welch_t_test(c.a, c.b);
    const double err = std::max({std::abs(r.statistic - c.t), std::abs(r.df - c.df),
                                 std::abs(r.p_value - c.p)});
    worst = std::max(worst, err);
    if (err > 1e-9) ++failures;
  }
  for (const stats_fixtures::MannWhitneyCase& c : stats_fixtures::mann_whitney_cases) {
    const TestResult r = mann_whitney_u(c.a, c.b);
    const double err = std::max(std::abs(r.statistic - c.u), std::abs(r.p_value - c.p));
    worst = std::max(worst, err);
    if (err > 1e-9) ++failures;
  }
  const bool ok = failures == 0 && stats_fixtures::welch_cases.size() == 20 &&
                  stats_fixtures::mann_whitney_cases.size() == 20;
  return {ok, "40 fixtures, failures=" + std::to_string(failures) +
                  ", worst abs error=" + fmt(worst)};
}

// ---------------------------------------------------------------------------
// 9. Evaluation accounting at the full default scale.

Outcome check_accounting() {
  EvolutionConfig cfg;  // defaults: mu 30, lambda 30, 50 generations, budget 1000
  cfg.min_feasible_hinges = 0;  // accounting counts every individual
  cfg.master_seed = 1;
  std::atomic<long> objective_calls{0};
  NullSink sink;
  EngineOptions opts;
  opts.learner = stub_learning;
  opts.objective_factory = [&objective_calls](const BodyPhenotype&) {
    return Objective([&objective_calls](const Eigen::VectorXd&) {
      objective_calls.fetch_add(1, std::memory_order_relaxed);
      return 0.0;
    });
  };
  opts.detail_factory = [](const BodyPhenotype&, const ParamVector&) { return SimResult{}; };
  opts.workers = hardware_workers();
  opts.write_checkpoints = false;
  const RunState end = run_evolution(cfg, sink, opts);
  const bool ok = end.total_evaluations == 1530000 && objective_calls.load() == 1530000;
  return {ok, "engine count=" + std::to_string(end.total_evaluations) +
                  " objective calls=" + std::to_string(objective_calls.load()) +
                  " expected=1530000"};
}

// ---------------------------------------------------------------------------
// 10. Determinism, resume, and replay at desk scale.

Outcome check_determinism_resume() {
  ExperimentSpec base = desk_preset();
  base.conditions = {Condition{InheritanceMode::Lamarckian, FitnessMode::Combined}};
  base.runs_per_condition = 1;

  auto run_variant = [&](const std::string& name, int workers,
                         std::function<bool(int)> stop) -> fs::path {
    ExperimentSpec spec = base;
    spec.output_dir = (g_scratch / name).string();
    EngineOptions opts;
    opts.workers = workers;
    opts.stop_after_generation = std::move(stop);
    run_cell(spec, spec.conditions[0], 0, opts);
    return cell_dir(spec, spec.conditions[0], 0);
  };

  fs::remove_all(g_scratch / "det_w1");
  fs::remove_all(g_scratch / "det_w8");
  fs::remove_all(g_scratch / "det_resume");
  const fs::path w1 = run_variant("det_w1", 1, nullptr);
  const fs::path w8 = run_variant("det_w8", hardware_workers(), nullptr);
  run_variant("det_resume", 1, [](int g) { return g == 4; });  // interrupt mid-run
  const fs::path re = run_variant("det_resume", 1, nullptr);   // resume to completion

  const std::vector<std::string> files = {"runlog.jsonl", "genotypes.jsonl", "transfers.jsonl",
                                          "controllers.bin"};
  std::string mismatch;
  for (const std::string& f : files) {
    const std::string ref = read_file(w1 / f);
    if (read_file(w8 / f) != ref) mismatch += " workers:" + f;
    if (read_file(re / f) != ref) mismatch += " resume:" + f;
  }

  // Replay every individual that was actually simulated.
  long replayed = 0, replay_failures = 0;
  {
    std::ifstream log(w1 / "runlog.jsonl");
    const RunLogData data = parse_runlog(log);
    std::set<std::uint64_t> done;
    for (const LogRecord& r : data.records) {
      if (r.eval_count == 0 || !done.insert(r.id).second) continue;
      const ReplayResult rep = replay_individual(w1, r.id, base.evo.sim);
      ++replayed;
      if (rep.replayed_f != r.f_locomotion) ++replay_failures;
    }
  }

  const bool ok = mismatch.empty() && replay_failures == 0 && replayed > 0;
  return {ok, (mismatch.empty() ? std::string("streams byte-identical")
                                : "MISMATCH:" + mismatch) +
                  "; replayed " + std::to_string(replayed) + " individuals, failures=" +
                  std::to_string(replay_failures)};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Check> checks = {
      {1, "fitness-exactness", 1.0, check_fitness_exactness},
      {2, "constraint-suite", 30.0, check_constraint_suite},
      {3, "tree-edit-distance-oracle", 300.0, check_ted_oracle},
      {4, "inheritance-math", 60.0, check_inheritance_math},
      {5, "cma-convergence", 60.0, check_cma_convergence},
      {6, "warm-start-benefit", 120.0, check_warm_start_benefit},
      {7, "desk-grid-directions", 2700.0, check_desk_grid},
      {8, "stats-oracle", 1.0, check_stats_oracle},
      {9, "evaluation-accounting", 60.0, check_accounting},
      {10, "determinism-resume", 600.0, check_determinism_resume},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--scratch" && i + 1 < argc) {
      g_scratch = argv[++i];
    } else {
      try {
        wanted.push_back(std::stoi(arg));
      } catch (const std::exception&) {
        std::cerr << "usage: acceptance [--scratch DIR] [criterion indices...]\n";
        return 2;
      }
    }
  }

  fs::create_directories(g_scratch);
  int failures = 0;
  for (const Check& c : checks) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), c.index) == wanted.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_seconds;
    const bool ok = out.ok && in_budget;
    if (!ok) ++failures;
    std::ostringstream line;
    line << "[" << (c.index < 10 ? " " : "") << c.index << "] " << (ok ? "PASS" : "FAIL") << " "
         << c.name << " (" << fmt(secs) << " s of " << fmt(c.budget_seconds) << " s budget): "
         << out.detail;
    if (out.ok && !in_budget) line << " [over time budget]";
    std::cout << line.str() << std::endl;
  }
  return failures;
}
