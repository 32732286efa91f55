#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "lamarck/morphology.hpp"

namespace lamarck {

// 8 normalized morphological descriptors, each in [0,1].  Component order is
// fixed and shared with the CSV serialization.
using Descriptors = Eigen::Matrix<double, 8, 1>;

enum DescriptorIndex {
  kBranching = 0,
  kLimbs = 1,
  kLengthOfLimbs = 2,
  kCoverage = 3,
  kJoints = 4,
  kProportion = 5,
  kSymmetry = 6,
  kSize = 7,
};

inline constexpr std::array<const char*, 8> kDescriptorNames = {
    "branching", "limbs", "length_of_limbs", "coverage",
    "joints",    "proportion", "symmetry",   "size"};

// Maximal distance in the unit 8-cube; also the empty-pool novelty.
inline const double kMaxNovelty = std::sqrt(8.0);

Descriptors compute_descriptors(const BodyPhenotype& p);

inline double dissimilarity(const Descriptors& a, const Descriptors& b) {
  return (a - b).norm();
}

// Distance to the nearest pool member; the pool must not contain the
// target's own entry.  Empty pool -> sqrt(8).
double novelty(const Descriptors& target, const std::vector<Descriptors>& pool);

}  // namespace lamarck
