#include "lamarck/cma_es.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace lamarck {
namespace {

constexpr double kSigmaMin = 1e-128;
constexpr double kSigmaMax = 1e32;

// In-place rank-one Cholesky update: A <- chol(A·Aᵀ + beta·w·wᵀ), beta > 0.
// Standard forward recurrence; two vectorized passes per column, O(n²) total.
void cholesky_rank1_update(Eigen::MatrixXd& a, Eigen::VectorXd w, double beta) {
  const int n = static_cast<int>(a.rows());
  double b = 1.0;
  for (int j = 0; j < n; ++j) {
    const double ajj = a(j, j);
    const double wj = w(j);
    const double gamma = ajj * ajj * b + beta * wj * wj;
    const double new_jj = std::sqrt(ajj * ajj + (beta / b) * wj * wj);
    const int tail = n - j - 1;
    if (tail > 0) {
      auto col = a.col(j).tail(tail);
      w.tail(tail) -= (wj / ajj) * col;
      col = (new_jj / ajj) * col + (new_jj * beta * wj / gamma) * w.tail(tail);
    }
    a(j, j) = new_jj;
    b += beta * wj * wj / (ajj * ajj);
  }
}

// Exact eigen check, run only when the cheap running bound dips below the
// clamp threshold.  Clamps eigenvalues and refactors if truly degenerate.
void verify_and_repair(CmaState& s) {
  Eigen::MatrixXd c = cma_covariance(s);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("covariance eigen-decomposition failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  if (lo >= kEigClamp) {
    s.min_eig_lb = lo * 0.999;  // slack against rounding in later updates
    return;
  }
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kEigClamp);
  c = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  c = ((c + c.transpose()) * 0.5).eval();
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) {
      s.chol = llt.matrixL();
      s.min_eig_lb = kEigClamp;
      ++s.repair_count;
      return;
    }
    ridge = (ridge == 0.0) ? kEigClamp : ridge * 2.0;
    c.diagonal().array() += ridge;
  }
  throw std::runtime_error("covariance repair failed to refactor");
}

}  // namespace

CmaState cma_init(int dim, const Eigen::VectorXd& mean, double sigma, int lambda) {
  if (dim < 1) throw std::invalid_argument("cma_init: dim must be >= 1");
  if (mean.size() != dim) throw std::invalid_argument("cma_init: mean size != dim");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("cma_init: sigma must be positive and finite");
  }
  if (lambda < 4) throw std::invalid_argument("cma_init: lambda must be >= 4");

  CmaState s;
  s.dim = dim;
  s.lambda = lambda;
  s.mean = mean;
  s.sigma = sigma;
  s.chol = Eigen::MatrixXd::Identity(dim, dim);
  s.path_sigma = Eigen::VectorXd::Zero(dim);
  s.path_c = Eigen::VectorXd::Zero(dim);
  s.iteration = 0;
  s.min_eig_lb = 1.0;

  const double n = static_cast<double>(dim);
  s.mu = lambda / 2;
  s.weights.resize(s.mu);
  for (int i = 0; i < s.mu; ++i) {
    s.weights(i) = std::log((lambda + 1.0) / 2.0) - std::log(i + 1.0);
  }
  s.weights /= s.weights.sum();
  s.mu_eff = 1.0 / s.weights.squaredNorm();
  s.c_sigma = (s.mu_eff + 2.0) / (n + s.mu_eff + 5.0);
  s.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((s.mu_eff - 1.0) / (n + 1.0)) - 1.0) + s.c_sigma;
  s.c_c = (4.0 + s.mu_eff / n) / (n + 4.0 + 2.0 * s.mu_eff / n);
  s.c1 = 2.0 / ((n + 1.3) * (n + 1.3) + s.mu_eff);
  s.c_mu = std::min(1.0 - s.c1, 2.0 * (s.mu_eff - 2.0 + 1.0 / s.mu_eff) /
                                     ((n + 2.0) * (n + 2.0) + s.mu_eff));
  s.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  return s;
}

std::vector<Eigen::VectorXd> cma_ask(CmaState& state, Rng& rng) {
  const int n = state.dim;
  Eigen::MatrixXd z(n, state.lambda);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < state.lambda; ++k) {
    for (int i = 0; i < n; ++i) z(i, k) = gauss(rng);
  }
  const Eigen::MatrixXd x = state.chol.triangularView<Eigen::Lower>() * z;
  std::vector<Eigen::VectorXd> out(static_cast<size_t>(state.lambda));
  for (int k = 0; k < state.lambda; ++k) {
    out[static_cast<size_t>(k)] = state.mean + state.sigma * x.col(k);
  }
  return out;
}

void cma_tell(CmaState& state, const std::vector<Eigen::VectorXd>& candidates,
              const std::vector<double>& fitnesses) {
  const int lam = state.lambda;
  const int n = state.dim;
  if (static_cast<int>(candidates.size()) != lam || static_cast<int>(fitnesses.size()) != lam) {
    throw std::invalid_argument("cma_tell: expected exactly lambda candidates and fitnesses");
  }
  for (int i = 0; i < lam; ++i) {
    if (candidates[static_cast<size_t>(i)].size() != n) {
      throw std::invalid_argument("cma_tell: candidate dimension mismatch");
    }
    if (!std::isfinite(fitnesses[static_cast<size_t>(i)])) {
      throw std::invalid_argument("cma_tell: non-finite fitness");
    }
  }

  // Maximization: rank best-first, ties broken by candidate index.
  std::vector<int> order(static_cast<size_t>(lam));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fitnesses[static_cast<size_t>(a)] > fitnesses[static_cast<size_t>(b)];
  });

  Eigen::MatrixXd y(n, state.mu);
  for (int r = 0; r < state.mu; ++r) {
    y.col(r) = (candidates[static_cast<size_t>(order[static_cast<size_t>(r)])] - state.mean) / state.sigma;
  }
  // Whitened steps via the sampling factor: z solves A·z = y.
  Eigen::MatrixXd z = y;
  state.chol.triangularView<Eigen::Lower>().solveInPlace(z);

  const Eigen::VectorXd yw = y * state.weights;
  const Eigen::VectorXd zw = z * state.weights;

  state.mean += state.sigma * yw;
  state.path_sigma = (1.0 - state.c_sigma) * state.path_sigma +
                     std::sqrt(state.c_sigma * (2.0 - state.c_sigma) * state.mu_eff) * zw;
  state.iteration += 1;

  const double ps_norm = state.path_sigma.norm();
  const double decay = 1.0 - std::pow(1.0 - state.c_sigma, 2.0 * static_cast<double>(state.iteration));
  const bool hsig =
      ps_norm / std::sqrt(decay) < (1.4 + 2.0 / (n + 1.0)) * state.chi_n;

  state.path_c = (1.0 - state.c_c) * state.path_c +
                 (hsig ? std::sqrt(state.c_c * (2.0 - state.c_c) * state.mu_eff) : 0.0) * yw;

  const double delta = hsig ? 0.0 : state.c_c * (2.0 - state.c_c);
  const double scale = std::max(1.0 - state.c1 - state.c_mu + state.c1 * delta, 1e-12);
  state.chol *= std::sqrt(scale);
  cholesky_rank1_update(state.chol, state.path_c, state.c1);
  for (int r = 0; r < state.mu; ++r) {
    cholesky_rank1_update(state.chol, y.col(r), state.c_mu * state.weights(r));
  }
  state.min_eig_lb *= scale;

  const double g = (state.c_sigma / state.d_sigma) * (ps_norm / state.chi_n - 1.0);
  state.sigma = std::clamp(state.sigma * std::exp(g), kSigmaMin, kSigmaMax);

  if (state.min_eig_lb < kEigClamp) verify_and_repair(state);
}

Eigen::MatrixXd cma_covariance(const CmaState& state) {
  const Eigen::MatrixXd l = state.chol.triangularView<Eigen::Lower>();
  Eigen::MatrixXd c = l * l.transpose();
  return ((c + c.transpose()) * 0.5).eval();
}

bool cma_set_covariance(CmaState& state, const Eigen::MatrixXd& c) {
  if (c.rows() != state.dim || c.cols() != state.dim) {
    throw std::invalid_argument("cma_set_covariance: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(((c + c.transpose()) * 0.5).eval());
  if (llt.info() == Eigen::Success) {
    state.chol = llt.matrixL();
    state.min_eig_lb = kEigClamp;  // exact bound unknown; first tell verifies
    return false;
  }
  // Degenerate input: clamp the spectrum and refactor.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(((c + c.transpose()) * 0.5).eval());
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("cma_set_covariance: eigen-decomposition failed");
  }
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kEigClamp);
  Eigen::MatrixXd fixed =
      eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> retry(((fixed + fixed.transpose()) * 0.5).eval());
    if (retry.info() == Eigen::Success) {
      state.chol = retry.matrixL();
      state.min_eig_lb = kEigClamp;
      ++state.repair_count;
      return true;
    }
    ridge = (ridge == 0.0) ? kEigClamp : ridge * 2.0;
    fixed.diagonal().array() += ridge;
  }
  throw std::runtime_error("cma_set_covariance: repair failed to refactor");
}

LearningResult run_learning(const Objective& objective, CmaState state,
                            const LearningBudget& budget, Rng& rng) {
  if (budget.population_size != state.lambda) {
    throw std::invalid_argument("run_learning: budget population size != state lambda");
  }
  if (budget.max_evaluations <= 0 ||
      budget.max_evaluations % budget.population_size != 0) {
    throw std::invalid_argument(
        "run_learning: max_evaluations must be a positive multiple of population_size");
  }
  const int iterations = budget.max_evaluations / budget.population_size;

  LearningResult res;
  res.best_fitness = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    auto candidates = cma_ask(state, rng);
    if (it == 0) candidates[0] = state.mean;  // measure the start point verbatim
    std::vector<double> fits(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
      fits[i] = objective(candidates[i]);
    }
    if (it == 0) res.first_fitness = fits[0];
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (fits[i] > res.best_fitness) {
        res.best_fitness = fits[i];
        res.best = candidates[i];
      }
    }
    cma_tell(state, candidates, fits);
    res.evaluations += static_cast<long>(candidates.size());
  }
  res.state = std::move(state);
  return res;
}

}  // namespace lamarck
