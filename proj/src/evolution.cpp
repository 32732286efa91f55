#include "lamarck/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "lamarck/inheritance.hpp"
#include "lamarck/parallel.hpp"
#include "lamarck/serialize.hpp"

namespace lamarck {
namespace {

void validate_engine_config(const EvolutionConfig& cfg) {
  if (cfg.mu < 1) throw std::invalid_argument("mu must be >= 1");
  if (cfg.lambda < 1) throw std::invalid_argument("lambda must be >= 1");
  if (cfg.n_mut < 0 || cfg.n_cross < 0 || cfg.n_mut + cfg.n_cross != cfg.lambda) {
    throw std::invalid_argument("n_mut + n_cross must equal lambda");
  }
  if (cfg.tournament_size < 1) throw std::invalid_argument("tournament_size must be >= 1");
  if (cfg.initial_depth_min < 2 || cfg.initial_depth_max > 4 ||
      cfg.initial_depth_max < cfg.initial_depth_min) {
    throw std::invalid_argument(
        "need 2 <= initial_depth_min <= initial_depth_max <= 4 (random tree sampler domain)");
  }
  if (cfg.generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (!(cfg.sigma_init > 0)) throw std::invalid_argument("sigma_init must be positive");
  if (cfg.min_feasible_hinges < 0) {
    throw std::invalid_argument("min_feasible_hinges must be >= 0");
  }
}

bool survivor_order(const Individual& a, const Individual& b) {
  if (a.f_combined != b.f_combined) return a.f_combined > b.f_combined;
  if (a.f_locomotion != b.f_locomotion) return a.f_locomotion > b.f_locomotion;
  return a.id < b.id;
}

Individual make_unevaluated(std::uint64_t id, BodyGenotype genotype, int birth_generation,
                            int min_hinges) {
  Individual ind;
  ind.id = id;
  ind.genotype = std::move(genotype);
  ind.phenotype = build_phenotype(ind.genotype);
  ind.descriptors = compute_descriptors(ind.phenotype);
  ind.feasible = check_feasibility(ind.phenotype, min_hinges).feasible;
  ind.birth_generation = birth_generation;
  return ind;
}

// Side data produced inside the parallel evaluation phase and emitted
// serially afterwards.
struct EvalAux {
  bool has_transfer = false;
  std::uint64_t parent_id = 0;
  TransferAudit audit;
};

// Lifetime learning for one individual.  Infeasible bodies keep their
// all-zero score record and consume no evaluations.  `transfer_parent`
// selects the Lamarckian warm start; null means a cold start.
void evaluate_individual(Individual& ind, const EvolutionConfig& cfg, const Learner& learner,
                         const ObjectiveFactory& objective_factory,
                         const DetailFactory& detail_factory, int gen, std::size_t index,
                         const Individual* transfer_parent, EvalAux* aux) {
  if (!ind.feasible) return;
  const int dim = param_count(ind.phenotype.h);
  CmaState start;
  if (transfer_parent != nullptr) {
    TransferAudit audit;
    start = warm_start(transfer_parent->cma_state, transfer_parent->phenotype, ind.phenotype,
                       cfg.sigma_init, &audit);
    if (aux != nullptr) {
      aux->has_transfer = true;
      aux->parent_id = transfer_parent->id;
      aux->audit = audit;
    }
  } else {
    start = cma_init(dim, Eigen::VectorXd::Zero(dim), cfg.sigma_init,
                     cfg.learning.population_size);
  }
  Rng rng = make_rng(cfg.master_seed, StreamPurpose::learning, static_cast<std::uint64_t>(gen),
                     index);
  const Objective base = objective_factory(ind.phenotype);
  long count = 0;
  const Objective counted = [&base, &count](const Eigen::VectorXd& x) {
    ++count;
    return base(x);
  };
  LearningResult res = learner(counted, std::move(start), cfg.learning, rng);
  ind.controller = std::move(res.best);
  ind.f_locomotion = res.best_fitness;
  ind.initial_fitness = res.first_fitness;
  ind.eval_count = count;
  if (cfg.inheritance_mode == InheritanceMode::Lamarckian) {
    ind.cma_state = std::move(res.state);
    ind.has_cma_state = true;
  }
  const SimResult detail = detail_factory(ind.phenotype, ind.controller);
  ind.d = detail.d;
  ind.l = detail.l;
  ind.c_hinge = detail.c_hinge;
}

double mean_locomotion(const std::vector<Individual>& pop) {
  double s = 0;
  for (const Individual& i : pop) s += i.f_locomotion;
  return s / static_cast<double>(pop.size());
}

double max_locomotion(const std::vector<Individual>& pop) {
  double m = -std::numeric_limits<double>::infinity();
  for (const Individual& i : pop) m = std::max(m, i.f_locomotion);
  return m;
}

double mean_initial(const std::vector<Individual>& pop) {
  double s = 0;
  for (const Individual& i : pop) s += i.initial_fitness;
  return s / static_cast<double>(pop.size());
}

}  // namespace

LearningResult stub_learning(const Objective& objective, CmaState state,
                             const LearningBudget& budget, Rng& /*rng*/) {
  if (budget.max_evaluations < 1) {
    throw std::invalid_argument("max_evaluations must be >= 1");
  }
  LearningResult result;
  result.best_fitness = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < budget.max_evaluations; ++i) {
    const double f = objective(state.mean);
    if (i == 0) result.first_fitness = f;
    if (f > result.best_fitness) result.best_fitness = f;
  }
  result.best = state.mean;
  result.evaluations = budget.max_evaluations;
  result.state = std::move(state);
  return result;
}

std::size_t tournament_select(const std::vector<Individual>& pop, int k, Rng& rng) {
  if (pop.empty()) throw std::invalid_argument("tournament over empty population");
  const std::size_t n = pop.size();
  const std::size_t kk = std::min<std::size_t>(std::max(k, 1), n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::size_t best = n;  // sentinel
  for (std::size_t t = 0; t < kk; ++t) {
    std::uniform_int_distribution<std::size_t> pick(t, n - 1);
    std::swap(idx[t], idx[pick(rng)]);
    const std::size_t c = idx[t];
    if (best == n || pop[c].f_combined > pop[best].f_combined ||
        (pop[c].f_combined == pop[best].f_combined && pop[c].id < pop[best].id)) {
      best = c;
    }
  }
  return best;
}

void update_novelty_and_fitness(std::vector<Individual>& pop, std::vector<Individual>& offspring,
                                std::vector<ArchiveEntry>& archive, FitnessMode mode) {
  for (const Individual& i : pop) archive.push_back({i.id, i.descriptors});
  for (const Individual& i : offspring) archive.push_back({i.id, i.descriptors});
  const auto score = [&](Individual& ind) {
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (const ArchiveEntry& e : archive) {
      if (e.owner == ind.id) continue;
      found = true;
      best = std::min(best, (e.descriptors - ind.descriptors).norm());
    }
    ind.f_novelty = found ? best : kMaxNovelty;
    ind.f_combined =
        mode == FitnessMode::Combined ? ind.f_locomotion * ind.f_novelty : ind.f_locomotion;
  };
  for (Individual& i : pop) score(i);
  for (Individual& i : offspring) score(i);
}

std::vector<Individual> survivor_selection(std::vector<Individual>&& pop,
                                           std::vector<Individual>&& offspring, int mu) {
  std::vector<Individual> all = std::move(pop);
  all.reserve(all.size() + offspring.size());
  for (Individual& o : offspring) all.push_back(std::move(o));
  if (static_cast<int>(all.size()) < mu) {
    throw std::invalid_argument("fewer candidates than mu in survivor selection");
  }
  std::sort(all.begin(), all.end(), survivor_order);
  all.erase(all.begin() + mu, all.end());
  return all;
}

RunState run_evolution(const EvolutionConfig& cfg, RunSink& sink, const EngineOptions& opts,
                       const RunState* resume) {
  validate_engine_config(cfg);

  const Learner learner =
      opts.learner ? opts.learner
                   : Learner([](const Objective& o, CmaState s, const LearningBudget& b, Rng& r) {
                       return run_learning(o, std::move(s), b, r);
                     });
  const ObjectiveFactory objective_factory =
      opts.objective_factory
          ? opts.objective_factory
          : ObjectiveFactory([sim = cfg.sim](const BodyPhenotype& p) {
              return Objective(
                  [&p, sim](const Eigen::VectorXd& x) { return simulate(p, x, sim).f; });
            });
  const DetailFactory detail_factory =
      opts.detail_factory ? opts.detail_factory
                          : DetailFactory([sim = cfg.sim](const BodyPhenotype& p,
                                                          const ParamVector& v) {
                              return simulate(p, v, sim);
                            });

  RunState state;
  if (resume != nullptr) state = *resume;
  IdSource ids(state.next_id);

  if (state.generation < 0) {
    state.population.clear();
    state.archive.clear();
    state.total_evaluations = 0;
    std::vector<Individual> pop;
    pop.reserve(static_cast<std::size_t>(cfg.mu));
    for (int i = 0; i < cfg.mu; ++i) {
      const int span = cfg.initial_depth_max - cfg.initial_depth_min + 1;
      const int depth = cfg.initial_depth_min + (span * i) / cfg.mu;  // even split over the span
      const std::uint64_t id = ids.next();
      Rng rng = make_rng(cfg.master_seed, StreamPurpose::init_genotype, 0,
                         static_cast<std::uint64_t>(i));
      pop.push_back(make_unevaluated(id, random_genotype(depth, rng, ids), 0,
                                     cfg.min_feasible_hinges));
    }
    parallel_for(pop.size(), opts.workers, [&](std::size_t i) {
      evaluate_individual(pop[i], cfg, learner, objective_factory, detail_factory, 0, i, nullptr,
                          nullptr);
    });
    for (const Individual& ind : pop) state.total_evaluations += ind.eval_count;
    for (const Individual& ind : pop) {
      sink.genotype_line(genotype_record_json(ind));
      if (ind.feasible) sink.controller_blob(ind.id, ind.phenotype.h, ind.controller);
    }
    std::vector<Individual> none;
    update_novelty_and_fitness(pop, none, state.archive, cfg.fitness_mode);
    state.population = survivor_selection(std::move(pop), std::move(none), cfg.mu);
    for (const Individual& ind : state.population) sink.runlog_line(runlog_record_json(ind, 0));
    sink.runlog_line(runlog_summary_json(0, mean_locomotion(state.population),
                                         max_locomotion(state.population), std::nullopt,
                                         mean_initial(state.population)));
    state.generation = 0;
    state.next_id = ids.peek();
    if (opts.write_checkpoints) sink.checkpoint(state);
    if (opts.stop_after_generation && opts.stop_after_generation(0)) {
      state.interrupted = true;
      return state;
    }
  }

  for (int g = state.generation + 1; g <= cfg.generations; ++g) {
    std::vector<Individual>& pop = state.population;
    Rng rep_rng = make_rng(cfg.master_seed, StreamPurpose::reproduce,
                           static_cast<std::uint64_t>(g), 0);

    std::vector<Individual> offspring;
    offspring.reserve(static_cast<std::size_t>(cfg.lambda));
    std::vector<const Individual*> transfer_parent(static_cast<std::size_t>(cfg.lambda), nullptr);
    for (int i = 0; i < cfg.lambda; ++i) {
      std::vector<std::size_t> pidx;
      if (i < cfg.n_mut) {
        pidx.push_back(tournament_select(pop, cfg.tournament_size, rep_rng));
      } else {
        pidx.push_back(tournament_select(pop, cfg.tournament_size, rep_rng));
        pidx.push_back(tournament_select(pop, cfg.tournament_size, rep_rng));
      }
      const std::uint64_t id = ids.next();
      BodyGenotype child;
      if (pidx.size() == 1) {
        child = mutate(pop[pidx[0]].genotype, rep_rng, ids);
      } else {
        child = mutate(crossover(pop[pidx[0]].genotype, pop[pidx[1]].genotype, rep_rng, ids),
                       rep_rng, ids);
      }
      Individual ind = make_unevaluated(id, std::move(child), g, cfg.min_feasible_hinges);
      std::vector<ParentRef> refs;
      for (std::size_t p : pidx) {
        ind.parent_ids.push_back(pop[p].id);
        refs.push_back({&pop[p].genotype, pop[p].f_locomotion, pop[p].id});
      }
      int edit_distance = 0;
      const std::size_t cp = closest_parent_index(ind.genotype, refs, &edit_distance);
      const Individual& closest = pop[pidx[cp]];
      ind.closest_parent_id = closest.id;
      ind.closest_edit_distance = edit_distance;
      ind.parent_dissimilarity = dissimilarity(ind.descriptors, closest.descriptors);
      if (cfg.inheritance_mode == InheritanceMode::Lamarckian && ind.feasible &&
          closest.has_cma_state) {
        transfer_parent[static_cast<std::size_t>(i)] = &closest;
      }
      offspring.push_back(std::move(ind));
    }

    std::vector<EvalAux> aux(offspring.size());
    parallel_for(offspring.size(), opts.workers, [&](std::size_t i) {
      evaluate_individual(offspring[i], cfg, learner, objective_factory, detail_factory, g, i,
                          transfer_parent[i], &aux[i]);
    });
    for (const Individual& o : offspring) state.total_evaluations += o.eval_count;

    for (std::size_t i = 0; i < offspring.size(); ++i) {
      const Individual& o = offspring[i];
      sink.genotype_line(genotype_record_json(o));
      if (aux[i].has_transfer) {
        TransferRecord t;
        t.gen = g;
        t.id = o.id;
        t.parent_id = aux[i].parent_id;
        t.d_p = aux[i].audit.d_p;
        t.d_o = aux[i].audit.d_o;
        t.shared = aux[i].audit.shared_count;
        t.alpha = aux[i].audit.alpha;
        t.sigma_p = aux[i].audit.sigma_p;
        t.sigma_o = aux[i].audit.sigma_o;
        t.edit_distance = o.closest_edit_distance.value_or(0);
        sink.transfer_line(transfer_record_json(t));
      }
      if (o.feasible) sink.controller_blob(o.id, o.phenotype.h, o.controller);
    }

    update_novelty_and_fitness(pop, offspring, state.archive, cfg.fitness_mode);
    for (const Individual& p : pop) sink.runlog_line(runlog_record_json(p, g));
    for (const Individual& o : offspring) sink.runlog_line(runlog_record_json(o, g));

    double mean_dissim = 0;
    for (const Individual& o : offspring) mean_dissim += o.parent_dissimilarity.value_or(0.0);
    mean_dissim /= static_cast<double>(offspring.size());
    const double mean_init = mean_initial(offspring);

    state.population = survivor_selection(std::move(pop), std::move(offspring), cfg.mu);
    sink.runlog_line(runlog_summary_json(g, mean_locomotion(state.population),
                                         max_locomotion(state.population), mean_dissim,
                                         mean_init));
    state.generation = g;
    state.next_id = ids.peek();
    if (opts.write_checkpoints) sink.checkpoint(state);
    if (opts.stop_after_generation && opts.stop_after_generation(g)) {
      state.interrupted = true;
      break;
    }
  }

  state.next_id = ids.peek();
  return state;
}

}  // namespace lamarck
