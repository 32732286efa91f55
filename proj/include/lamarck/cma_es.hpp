#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

// CMA-ES in Cholesky-factor form: the search covariance C is carried as a
// lower-triangular factor A with C = A·Aᵀ.  Sampling, whitening, and the
// rank-1/rank-μ updates all work on the factor in O(n²), which is what makes
// per-individual learning at dim ≈ 1400–2200 affordable.  Strategy constants
// follow the standard tutorial defaults (positive recombination weights,
// cumulative step-size adaptation, no active update).
struct CmaState {
  int dim = 0;
  int lambda = 20;                 // candidates per ask
  Eigen::VectorXd mean;
  double sigma = 0.5;
  Eigen::MatrixXd chol;            // lower-triangular A; C = A·Aᵀ
  Eigen::VectorXd path_sigma;
  Eigen::VectorXd path_c;
  long iteration = 0;

  // derived constants
  int mu = 0;
  Eigen::VectorXd weights;         // mu positive recombination weights, sum 1
  double mu_eff = 0, c_sigma = 0, d_sigma = 0, c_c = 0, c1 = 0, c_mu = 0, chi_n = 0;

  // Conservative running lower bound on the min eigenvalue of C.  When it
  // dips under the clamp threshold the state is verified (and repaired)
  // through an exact eigen-decomposition.
  double min_eig_lb = 1.0;
  long repair_count = 0;
};

inline constexpr double kEigClamp = 1e-12;

struct LearningBudget {
  int population_size = 20;
  int max_evaluations = 1000;  // => 50 ask/tell iterations
};

CmaState cma_init(int dim, const Eigen::VectorXd& mean, double sigma, int lambda = 20);

// 20 i.i.d. samples from N(mean, sigma²·C).
std::vector<Eigen::VectorXd> cma_ask(CmaState& state, Rng& rng);

// Rank-μ + rank-1 maximization update.  Ties in fitness are broken by
// candidate index (stable sort).
void cma_tell(CmaState& state, const std::vector<Eigen::VectorXd>& candidates,
              const std::vector<double>& fitnesses);

// Full covariance C = A·Aᵀ (exactly symmetric by construction).
Eigen::MatrixXd cma_covariance(const CmaState& state);

// Rebuild the factor from an explicit covariance: used by warm starts.
// Clamps eigenvalues at kEigClamp when the factorization fails and reports
// whether a repair happened.
bool cma_set_covariance(CmaState& state, const Eigen::MatrixXd& C);

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct LearningResult {
  Eigen::VectorXd best;
  double best_fitness = 0;
  double first_fitness = 0;  // objective of the start mean, evaluated verbatim
  CmaState state;
  long evaluations = 0;
};

// budget.max_evaluations / population_size ask/tell iterations; the first
// candidate of the first batch is the (warm-start) mean itself so that
// first_fitness measures the inherited controller before any perturbation.
LearningResult run_learning(const Objective& objective, CmaState state,
                            const LearningBudget& budget, Rng& rng);

}  // namespace lamarck
