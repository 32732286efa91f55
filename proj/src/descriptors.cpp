#include "lamarck/descriptors.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace lamarck {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// ratio with the zero-denominator-:=-0 convention
double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

// Largest possible leaf count for a body of m modules: every non-core module
// is a leaf until the core's 5 slots run out; past that, each additional
// batch of leaves needs an internal brick (1 slot consumed, 3 provided).
int max_leaves(int m) {
  if (m <= 1) return 0;
  const int internal = m > 6 ? (m - 4) / 3 : 0;  // ceil((m-6)/3) for m > 6
  return (m - 1) - internal;
}

}  // namespace

Descriptors compute_descriptors(const BodyPhenotype& p) {
  const int m = p.m;
  Descriptors d = Descriptors::Zero();

  d[kSize] = clamp01(static_cast<double>(m) / kMaxModules);
  d[kJoints] = clamp01(static_cast<double>(p.h) / kMaxHinges);

  // placed-children counts from the parent links
  std::vector<int> child_count(m, 0);
  for (int i = 1; i < m; ++i) child_count[p.parent_index[i]]++;

  int branching_nodes = 0;
  for (int i = 0; i < m; ++i)
    if (child_count[i] >= 3) branching_nodes++;
  d[kBranching] = clamp01(ratio(branching_nodes, std::max(1, (m - 2) / 3)));

  int leaves = 0;
  for (int i = 1; i < m; ++i)
    if (child_count[i] == 0) leaves++;
  d[kLimbs] = clamp01(ratio(leaves, std::max(1, max_leaves(m))));

  // Maximal non-branching chains partition the placed non-core modules: a
  // module extends its parent's chain iff the parent is non-core and has
  // exactly one placed child.
  int chains = 0;
  for (int i = 1; i < m; ++i) {
    const int par = p.parent_index[i];
    if (par == 0 || child_count[par] != 1) chains++;
  }
  const double mean_chain = chains == 0 ? 0.0 : static_cast<double>(m - 1) / chains;
  d[kLengthOfLimbs] = clamp01(ratio(mean_chain, std::max(1, m - 1)));

  // bounding box of occupied cells
  int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
  for (const Placement& pl : p.placements)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], pl.pose.cell[a]);
      hi[a] = std::max(hi[a], pl.pose.cell[a]);
    }
  const double vol = double(hi[0] - lo[0] + 1) * double(hi[1] - lo[1] + 1) * double(hi[2] - lo[2] + 1);
  d[kCoverage] = clamp01(ratio(m, vol));

  const double px = hi[0] - lo[0] + 1, py = hi[1] - lo[1] + 1;
  d[kProportion] = clamp01(std::min(px, py) / std::max(px, py));

  // mirror across the x–z plane through the core: (x, y, z) -> (x, -y, z)
  std::unordered_map<long long, ModuleKind> cells;
  auto key = [](int x, int y, int z) {
    return (static_cast<long long>(x + 512) << 20) | (static_cast<long long>(y + 512) << 10) |
           static_cast<long long>(z + 512);
  };
  for (const Placement& pl : p.placements)
    cells[key(pl.pose.cell[0], pl.pose.cell[1], pl.pose.cell[2])] = pl.kind;
  int mirrored = 0, off_plane = 0;
  for (const Placement& pl : p.placements) {
    const auto& c = pl.pose.cell;
    if (c[1] != 0) off_plane++;
    auto it = cells.find(key(c[0], -c[1], c[2]));
    if (it != cells.end() && it->second == pl.kind) mirrored++;
  }
  d[kSymmetry] = clamp01(ratio(mirrored, off_plane));

  return d;
}

double novelty(const Descriptors& target, const std::vector<Descriptors>& pool) {
  if (pool.empty()) return kMaxNovelty;
  double best = std::numeric_limits<double>::infinity();
  for (const Descriptors& q : pool) best = std::min(best, dissimilarity(target, q));
  return best;
}

}  // namespace lamarck
