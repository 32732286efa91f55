#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

enum class ModuleKind : std::uint8_t { Core = 0, Brick = 1, ActiveHinge = 2 };

// Child attachment slots per module kind.  Slot indices are meaningful per
// kind: core {0:+front, 1:back, 2:left, 3:right, 4:up} (never down, the core
// rests on its underside), brick {0:front, 1:left, 2:right}, hinge {0:front}.
inline int slot_count(ModuleKind k) {
  switch (k) {
    case ModuleKind::Core: return 5;
    case ModuleKind::Brick: return 3;
    case ModuleKind::ActiveHinge: return 1;
  }
  return 0;
}

const char* kind_name(ModuleKind k);
ModuleKind kind_from_name(const std::string& name);

// Body tree node.  `slot` is the attachment slot on the parent (-1 for the
// root).  `id` is a lineage identifier: unique within a run, preserved by
// variation operators for untouched nodes, so parent and offspring can agree
// on which modules are "the same".  Children are kept sorted by slot.
struct BodyNode {
  std::uint64_t id = 0;
  ModuleKind kind = ModuleKind::Core;
  int rotation = 0;  // quarter-turns about the attachment axis, 0..3
  int slot = -1;
  std::vector<BodyNode> children;
};

struct BodyGenotype {
  BodyNode root;  // kind == Core, exactly once, at the root
};

struct GridPose {
  std::array<int, 3> cell{0, 0, 0};
  std::array<int, 3> facing{1, 0, 0};  // unit axis direction
};

struct Placement {
  std::uint64_t id = 0;
  ModuleKind kind = ModuleKind::Core;
  GridPose pose;
};

// Collision-pruned grid embedding of a genotype.
struct BodyPhenotype {
  std::vector<Placement> placements;        // BFS placement order
  std::vector<int> parent_index;            // per placement: index of parent placement (-1 for core)
  std::vector<std::uint64_t> hinge_ids;     // BFS order; positions define joint indices
  int m = 0;                                // placed module count
  int h = 0;                                // placed hinge count
  int z_max = 0;                            // max cell z (core at z = 0)
  // hinge id -> number of placed modules in the subtree rooted at that hinge
  // (the hinge itself counts).
  std::unordered_map<std::uint64_t, int> descendant_counts;
};

enum class InfeasibilityReason { Ok, TooFewHinges };

struct Feasibility {
  bool feasible = true;
  InfeasibilityReason reason = InfeasibilityReason::Ok;
};

inline constexpr int kMaxModules = 25;
inline constexpr int kMaxHinges = 12;
inline constexpr int kMinHingesFeasible = 4;

// --- construction & variation -------------------------------------------

// Random tree of exactly `depth` (root at depth 0): every node fills each
// free slot with probability 0.5, kinds uniform over {Brick, ActiveHinge},
// rotations uniform over 0..3; one random path is forced down to `depth`.
// Caps are enforced before returning.
BodyGenotype random_genotype(int depth, Rng& rng, IdSource& ids);

// Prune back inside the caps: hinges beyond 12 drop (with their subtrees) in
// reverse-BFS order, then leaves drop in reverse-BFS order until ≤ 25 nodes.
BodyGenotype enforce_caps(const BodyGenotype& g);

BodyPhenotype build_phenotype(const BodyGenotype& g);

// One sub-operator per call with probabilities add 0.4 / delete 0.3 /
// modify 0.3; falls through add→delete→modify→add when the chosen one has no
// applicable site.  Untouched nodes keep their ids.
BodyGenotype mutate(const BodyGenotype& g, Rng& rng, IdSource& ids);

// Single-point subtree exchange: a random non-root subtree of `a` is
// replaced by a deep copy of a random non-root subtree of `b`.  Transplanted
// nodes keep b's ids unless they collide with ids retained from `a`.
// Core-only parent on either side degenerates to mutate(a).
BodyGenotype crossover(const BodyGenotype& a, const BodyGenotype& b, Rng& rng, IdSource& ids);

// Ordered-tree edit distance (Zhang–Shasha), unit costs, labels
// (kind, rotation), children ordered by slot index.
int tree_edit_distance(const BodyGenotype& a, const BodyGenotype& b);

Feasibility check_feasibility(const BodyPhenotype& p, int min_hinges = kMinHingesFeasible);

// --- small helpers shared with tests and serialization -------------------

int count_nodes(const BodyGenotype& g);
int count_hinges(const BodyGenotype& g);

// Pointers to every node in BFS order (children visited in slot order).
std::vector<const BodyNode*> bfs_order(const BodyGenotype& g);

}  // namespace lamarck
