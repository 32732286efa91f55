#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "lamarck/cma_es.hpp"
#include "lamarck/controller.hpp"
#include "lamarck/morphology.hpp"

namespace lamarck {

// Alignment of flat controller-parameter indices between a parent and a
// morphologically different child.  A parameter corresponds when every
// morphology-dependent index it touches belongs to a hinge whose lineage id
// exists in both bodies; all hidden-layer interiors, all biases of hidden
// layers, and the 9 core-sensor input rows always correspond.
struct CorrespondenceMap {
  std::vector<std::pair<int, int>> shared;  // (parent_index, child_index)
  int d_p = 0;
  int d_o = 0;
};

CorrespondenceMap correspondence_map(const BodyPhenotype& parent, const BodyPhenotype& child);

// sigma_o = (1 - alpha) * sigma_p + alpha * sigma_init with
// alpha = min(1, |d_o - d_p| / d_o).  The clamp keeps the blend convex when
// the body shrinks by more than half.
double inherit_sigma(double sigma_p, int d_p, int d_o, double sigma_init);

// mu_o[i] = mu_p[i_p] for mapped i, 0 otherwise.
Eigen::VectorXd inherit_mean(const Eigen::VectorXd& mu_p, const CorrespondenceMap& map, int d_o);

// C_o[i,j] = C_p[i_p,j_p] when both indices are mapped, identity otherwise.
// Symmetrized; eigenvalues clamped at 1e-12 only if the assembled matrix is
// degenerate (reported through *repaired).  Reference implementation over
// explicit matrices; warm_start uses an equivalent factor-space route.
Eigen::MatrixXd inherit_covariance(const Eigen::MatrixXd& c_p, const CorrespondenceMap& map,
                                   bool* repaired = nullptr);

struct ParentRef {
  const BodyGenotype* genotype = nullptr;
  double f_locomotion = 0.0;
  std::uint64_t id = 0;
};

// Index of the parent with minimal tree edit distance to the child; ties
// broken by higher f_locomotion, then lower id.  Also reports the distance.
std::size_t closest_parent_index(const BodyGenotype& child, const std::vector<ParentRef>& parents,
                                 int* edit_distance = nullptr);

struct TransferAudit {
  int d_p = 0;
  int d_o = 0;
  int shared_count = 0;
  double alpha = 0.0;
  double sigma_p = 0.0;
  double sigma_o = 0.0;
};

// Full Lamarckian warm start: composes the correspondence map with the mean,
// step-size, and covariance transfers; evolution paths reset to zero and the
// iteration counter restarts.  Works directly on the parent's Cholesky
// factor so the large-matrix case never forms C_p explicitly.
CmaState warm_start(const CmaState& parent_state, const BodyPhenotype& parent,
                    const BodyPhenotype& child, double sigma_init,
                    TransferAudit* audit = nullptr);

}  // namespace lamarck
