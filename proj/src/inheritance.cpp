#include "lamarck/inheritance.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace lamarck {
namespace {

// Flat layout of the controller parameter vector for h hinges:
//   [W1 rows: 9 core + h hinge inputs, 32 wide] [b1 .. b3 + hidden interiors,
//   1104 entries, morphology-independent] [W4 row-major 32×h] [b4].
struct Layout {
  int h;
  int w1_row(int r) const { return r * 32; }
  int mid() const { return (9 + h) * 32; }
  int w4() const { return mid() + 1104; }
  int b4() const { return w4() + 32 * h; }
  int total() const { return b4() + h; }
};

constexpr int kMidLen = 1104;  // b1(32) + W2(512) + b2(16) + W3(512) + b3(32)

void validate_map(const CorrespondenceMap& m) {
  std::vector<char> seen_p(static_cast<size_t>(m.d_p), 0);
  std::vector<char> seen_o(static_cast<size_t>(m.d_o), 0);
  for (const auto& [ip, ic] : m.shared) {
    if (ip < 0 || ip >= m.d_p || ic < 0 || ic >= m.d_o) {
      throw std::out_of_range("correspondence map index out of range");
    }
    if (seen_p[static_cast<size_t>(ip)]++ || seen_o[static_cast<size_t>(ic)]++) {
      throw std::invalid_argument("correspondence map is not injective");
    }
  }
}

// Orthogonal column rotations restoring a lower-triangular profile after rows
// were deleted from a triangular factor: input rows satisfy r(i,j) = 0 for
// j > last(i) with last(i) >= i non-decreasing; output leftCols(s) is lower
// triangular with the same R·Rᵀ.
void givens_row_compress(Eigen::MatrixXd& r, const std::vector<int>& last) {
  const int s = static_cast<int>(r.rows());
  for (int i = 0; i < s; ++i) {
    for (int j = last[static_cast<size_t>(i)]; j > i; --j) {
      const double a = r(i, j - 1);
      const double b = r(i, j);
      if (b == 0.0) continue;
      const double rad = std::hypot(a, b);
      const double c = a / rad;
      const double sn = b / rad;
      const int rows = s - i;
      Eigen::VectorXd t = c * r.col(j - 1).tail(rows) + sn * r.col(j).tail(rows);
      r.col(j).tail(rows) = -sn * r.col(j - 1).tail(rows) + c * r.col(j).tail(rows);
      r.col(j - 1).tail(rows) = t;
      r(i, j - 1) = rad;
      r(i, j) = 0.0;
    }
  }
}

Eigen::MatrixXd clamped_factor(const Eigen::MatrixXd& c, long* repair_count) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(((c + c.transpose()) * 0.5).eval());
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("inherited covariance eigen-decomposition failed");
  }
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kEigClamp);
  Eigen::MatrixXd fixed = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  double ridge = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(((fixed + fixed.transpose()) * 0.5).eval());
    if (llt.info() == Eigen::Success) {
      if (repair_count) ++*repair_count;
      return llt.matrixL();
    }
    ridge = (ridge == 0.0) ? kEigClamp : ridge * 2.0;
    fixed.diagonal().array() += ridge;
  }
  throw std::runtime_error("inherited covariance repair failed to refactor");
}

}  // namespace

CorrespondenceMap correspondence_map(const BodyPhenotype& parent, const BodyPhenotype& child) {
  const Layout lp{parent.h};
  const Layout lc{child.h};
  CorrespondenceMap m;
  m.d_p = param_count(parent.h);
  m.d_o = param_count(child.h);

  std::unordered_map<std::uint64_t, int> parent_rank;
  for (int k = 0; k < parent.h; ++k) {
    parent_rank.emplace(parent.hinge_ids[static_cast<size_t>(k)], k);
  }
  std::vector<std::pair<int, int>> hinges;  // (parent rank, child rank)
  for (int k = 0; k < child.h; ++k) {
    auto it = parent_rank.find(child.hinge_ids[static_cast<size_t>(k)]);
    if (it != parent_rank.end()) hinges.emplace_back(it->second, k);
  }

  m.shared.reserve(static_cast<size_t>(9 * 32 + kMidLen) + hinges.size() * 65);
  for (int idx = 0; idx < 9 * 32; ++idx) m.shared.emplace_back(idx, idx);
  for (const auto& [kp, kc] : hinges) {
    for (int c = 0; c < 32; ++c) {
      m.shared.emplace_back(lp.w1_row(9 + kp) + c, lc.w1_row(9 + kc) + c);
    }
  }
  for (int t = 0; t < kMidLen; ++t) m.shared.emplace_back(lp.mid() + t, lc.mid() + t);
  for (int i = 0; i < 32; ++i) {
    for (const auto& [kp, kc] : hinges) {
      m.shared.emplace_back(lp.w4() + i * parent.h + kp, lc.w4() + i * child.h + kc);
    }
  }
  for (const auto& [kp, kc] : hinges) {
    m.shared.emplace_back(lp.b4() + kp, lc.b4() + kc);
  }
  return m;
}

double inherit_sigma(double sigma_p, int d_p, int d_o, double sigma_init) {
  if (d_o <= 0) throw std::invalid_argument("inherit_sigma: child dimension must be positive");
  if (!(sigma_p > 0.0) || !(sigma_init > 0.0)) {
    throw std::invalid_argument("inherit_sigma: step sizes must be positive");
  }
  const double alpha = std::min(1.0, std::abs(static_cast<double>(d_o) - d_p) / d_o);
  return (1.0 - alpha) * sigma_p + alpha * sigma_init;
}

Eigen::VectorXd inherit_mean(const Eigen::VectorXd& mu_p, const CorrespondenceMap& map, int d_o) {
  if (map.d_p != mu_p.size() || map.d_o != d_o) {
    throw std::invalid_argument("inherit_mean: dimension mismatch");
  }
  validate_map(map);
  Eigen::VectorXd mu_o = Eigen::VectorXd::Zero(d_o);
  for (const auto& [ip, ic] : map.shared) mu_o(ic) = mu_p(ip);
  return mu_o;
}

Eigen::MatrixXd inherit_covariance(const Eigen::MatrixXd& c_p, const CorrespondenceMap& map,
                                   bool* repaired) {
  if (c_p.rows() != map.d_p || c_p.cols() != map.d_p) {
    throw std::invalid_argument("inherit_covariance: parent dimension mismatch");
  }
  validate_map(map);
  if (repaired) *repaired = false;
  Eigen::MatrixXd c_o = Eigen::MatrixXd::Identity(map.d_o, map.d_o);
  for (const auto& [ip, ic] : map.shared) {
    for (const auto& [jp, jc] : map.shared) {
      c_o(ic, jc) = c_p(ip, jp);
    }
  }
  c_o = ((c_o + c_o.transpose()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c_o);
  if (eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= kEigClamp) {
    return c_o;
  }
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kEigClamp);
  if (repaired) *repaired = true;
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

std::size_t closest_parent_index(const BodyGenotype& child, const std::vector<ParentRef>& parents,
                                 int* edit_distance) {
  if (parents.empty()) throw std::invalid_argument("closest_parent_index: no parents");
  std::size_t best = 0;
  int best_d = 0;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    const int d = tree_edit_distance(*parents[i].genotype, child);
    if (i == 0) {
      best_d = d;
      continue;
    }
    const ParentRef& cand = parents[i];
    const ParentRef& cur = parents[best];
    const bool better = d < best_d ||
                        (d == best_d && (cand.f_locomotion > cur.f_locomotion ||
                                         (cand.f_locomotion == cur.f_locomotion && cand.id < cur.id)));
    if (better) {
      best = i;
      best_d = d;
    }
  }
  if (edit_distance) *edit_distance = best_d;
  return best;
}

CmaState warm_start(const CmaState& parent_state, const BodyPhenotype& parent,
                    const BodyPhenotype& child, double sigma_init, TransferAudit* audit) {
  CorrespondenceMap map = correspondence_map(parent, child);
  if (parent_state.dim != map.d_p) {
    throw std::invalid_argument("warm_start: parent state dimension mismatch");
  }

  const double sigma_o = inherit_sigma(parent_state.sigma, map.d_p, map.d_o, sigma_init);
  CmaState out = cma_init(map.d_o, inherit_mean(parent_state.mean, map, map.d_o), sigma_o,
                          parent_state.lambda);

  if (!map.shared.empty()) {
    // Gather the shared parent rows of the factor in child-index order.
    std::vector<std::pair<int, int>> pairs = map.shared;  // (parent, child)
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    const int s = static_cast<int>(pairs.size());

    bool monotone = true;
    for (int i = 1; i < s; ++i) {
      if (pairs[static_cast<size_t>(i)].first <= pairs[static_cast<size_t>(i - 1)].first) {
        monotone = false;
        break;
      }
    }

    Eigen::MatrixXd rows(s, map.d_p);
    for (int i = 0; i < s; ++i) {
      rows.row(i) = parent_state.chol.row(pairs[static_cast<size_t>(i)].first);
    }

    Eigen::MatrixXd l_sub;
    bool use_givens = monotone;
    if (monotone) {
      // Compare the staircase-compression cost against an explicit refactor.
      double givens_flops = 0.0;
      double sd = static_cast<double>(s);
      for (int i = 0; i < s; ++i) {
        givens_flops += 6.0 * (sd - i) * (pairs[static_cast<size_t>(i)].first - i);
      }
      const double refactor_flops = sd * sd * map.d_p + sd * sd * sd / 3.0;
      use_givens = givens_flops <= refactor_flops;
    }
    if (use_givens) {
      std::vector<int> last(static_cast<size_t>(s));
      for (int i = 0; i < s; ++i) last[static_cast<size_t>(i)] = pairs[static_cast<size_t>(i)].first;
      givens_row_compress(rows, last);
      l_sub = rows.leftCols(s).triangularView<Eigen::Lower>();
    } else {
      Eigen::MatrixXd c_sub = Eigen::MatrixXd::Zero(s, s);
      c_sub.selfadjointView<Eigen::Lower>().rankUpdate(rows);
      c_sub = c_sub.selfadjointView<Eigen::Lower>();
      Eigen::LLT<Eigen::MatrixXd> llt(c_sub);
      if (llt.info() == Eigen::Success) {
        l_sub = llt.matrixL();
      } else {
        l_sub = clamped_factor(c_sub, &out.repair_count);
      }
    }

    // Scatter into the child factor: child-ordered shared indices are
    // increasing, so the result stays lower triangular; unmapped parameters
    // keep their identity row/column.
    for (int i = 0; i < s; ++i) {
      const int ci = pairs[static_cast<size_t>(i)].second;
      out.chol(ci, ci) = l_sub(i, i);
      for (int j = 0; j < i; ++j) {
        out.chol(ci, pairs[static_cast<size_t>(j)].second) = l_sub(i, j);
      }
    }
  }

  // Interlacing: every eigenvalue of the shared block is >= the parent's
  // minimum, and the identity block contributes 1.
  out.min_eig_lb = std::min(parent_state.min_eig_lb, 1.0) * 0.999;
  if (out.min_eig_lb < kEigClamp) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cma_covariance(out));
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < kEigClamp) {
      Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(kEigClamp);
      Eigen::MatrixXd fixed =
          eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
      cma_set_covariance(out, fixed);
      out.min_eig_lb = kEigClamp;
      ++out.repair_count;
    } else {
      out.min_eig_lb = lo * 0.999;
    }
  }

  if (audit) {
    audit->d_p = map.d_p;
    audit->d_o = map.d_o;
    audit->shared_count = static_cast<int>(map.shared.size());
    audit->alpha = std::min(1.0, std::abs(static_cast<double>(map.d_o) - map.d_p) / map.d_o);
    audit->sigma_p = parent_state.sigma;
    audit->sigma_o = sigma_o;
  }
  return out;
}

}  // namespace lamarck
