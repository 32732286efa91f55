#include "lamarck/morphology.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace lamarck {

const char* kind_name(ModuleKind k) {
  switch (k) {
    case ModuleKind::Core: return "core";
    case ModuleKind::Brick: return "brick";
    case ModuleKind::ActiveHinge: return "active_hinge";
  }
  return "?";
}

ModuleKind kind_from_name(const std::string& name) {
  if (name == "core") return ModuleKind::Core;
  if (name == "brick") return ModuleKind::Brick;
  if (name == "active_hinge") return ModuleKind::ActiveHinge;
  throw std::invalid_argument("unknown module kind: " + name);
}

std::vector<const BodyNode*> bfs_order(const BodyGenotype& g) {
  std::vector<const BodyNode*> order;
  std::deque<const BodyNode*> q{&g.root};
  while (!q.empty()) {
    const BodyNode* n = q.front();
    q.pop_front();
    order.push_back(n);
    for (const BodyNode& c : n->children) q.push_back(&c);
  }
  return order;
}

namespace {

std::vector<BodyNode*> bfs_order_mut(BodyGenotype& g) {
  std::vector<BodyNode*> order;
  std::deque<BodyNode*> q{&g.root};
  while (!q.empty()) {
    BodyNode* n = q.front();
    q.pop_front();
    order.push_back(n);
    for (BodyNode& c : n->children) q.push_back(&c);
  }
  return order;
}

// (parent, index-in-children) of every non-root node, BFS order.
std::vector<std::pair<BodyNode*, int>> bfs_nonroot_sites(BodyGenotype& g) {
  std::vector<std::pair<BodyNode*, int>> sites;
  std::deque<BodyNode*> q{&g.root};
  while (!q.empty()) {
    BodyNode* n = q.front();
    q.pop_front();
    for (int i = 0; i < static_cast<int>(n->children.size()); ++i) {
      sites.emplace_back(n, i);
      q.push_back(&n->children[i]);
    }
  }
  return sites;
}

void insert_child_sorted(BodyNode& parent, BodyNode&& child) {
  auto pos = std::find_if(parent.children.begin(), parent.children.end(),
                          [&](const BodyNode& c) { return c.slot > child.slot; });
  parent.children.insert(pos, std::move(child));
}

bool slot_used(const BodyNode& n, int slot) {
  for (const BodyNode& c : n.children)
    if (c.slot == slot) return true;
  return false;
}

int subtree_size(const BodyNode& n) {
  int s = 1;
  for (const BodyNode& c : n.children) s += subtree_size(c);
  return s;
}

int subtree_hinges(const BodyNode& n) {
  int s = (n.kind == ModuleKind::ActiveHinge) ? 1 : 0;
  for (const BodyNode& c : n.children) s += subtree_hinges(c);
  return s;
}

bool remove_node_by_id(BodyNode& n, std::uint64_t id) {
  for (auto it = n.children.begin(); it != n.children.end(); ++it) {
    if (it->id == id) {
      n.children.erase(it);
      return true;
    }
    if (remove_node_by_id(*it, id)) return true;
  }
  return false;
}

void collect_ids(const BodyNode& n, std::unordered_set<std::uint64_t>& out) {
  out.insert(n.id);
  for (const BodyNode& c : n.children) collect_ids(c, out);
}

}  // namespace

int count_nodes(const BodyGenotype& g) { return subtree_size(g.root); }
int count_hinges(const BodyGenotype& g) { return subtree_hinges(g.root); }

Feasibility check_feasibility(const BodyPhenotype& p, int min_hinges) {
  if (p.h < min_hinges) return {false, InfeasibilityReason::TooFewHinges};
  return {true, InfeasibilityReason::Ok};
}

// --- caps ------------------------------------------------------------------

BodyGenotype enforce_caps(const BodyGenotype& g) {
  BodyGenotype out = g;
  // Hinge cap: drop the reverse-BFS-first (deepest/latest-visited) hinge with
  // its subtree until 12 remain.  The last hinge in BFS order can have no
  // hinge descendants, so each removal drops exactly one hinge.
  while (count_hinges(out) > kMaxHinges) {
    auto order = bfs_order_mut(out);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if ((*it)->kind == ModuleKind::ActiveHinge) {
        remove_node_by_id(out.root, (*it)->id);
        break;
      }
    }
  }
  // Node cap: drop trailing BFS nodes (always leaves) until 25 remain.
  while (count_nodes(out) > kMaxModules) {
    auto order = bfs_order_mut(out);
    remove_node_by_id(out.root, order.back()->id);
  }
  return out;
}

// --- phenotype ---------------------------------------------------------------

namespace {

using Vec3 = std::array<int, 3>;

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 neg(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

int pack_cell(const Vec3& c) {
  // coordinates stay within ±25 of the origin for ≤25 modules
  return ((c[0] + 128) << 16) | ((c[1] + 128) << 8) | (c[2] + 128);
}

// Attachment direction of `slot` on a module with frame (forward f, up u).
Vec3 slot_direction(ModuleKind kind, int slot, const Vec3& f, const Vec3& u) {
  const Vec3 left = cross(u, f);
  switch (kind) {
    case ModuleKind::Core:
      switch (slot) {
        case 0: return f;
        case 1: return neg(f);
        case 2: return left;
        case 3: return neg(left);
        case 4: return u;
      }
      break;
    case ModuleKind::Brick:
      switch (slot) {
        case 0: return f;
        case 1: return left;
        case 2: return neg(left);
      }
      break;
    case ModuleKind::ActiveHinge:
      if (slot == 0) return f;
      break;
  }
  throw std::invalid_argument("invalid slot for module kind");
}

// Up vector transported across the attachment (minimal rotation f -> dir),
// before the child's own quarter-turn about its forward axis.
Vec3 transported_up(const Vec3& f, const Vec3& u, const Vec3& dir) {
  if (dir == u) return neg(f);
  if (dir == neg(u)) return f;
  return u;  // front/back/left/right keep the parent's up
}

}  // namespace

BodyPhenotype build_phenotype(const BodyGenotype& g) {
  BodyPhenotype p;
  std::unordered_set<int> occupied;

  struct Entry {
    const BodyNode* node;
    int placement_index;
    Vec3 cell, forward, up;
  };
  std::deque<Entry> q;

  const Vec3 origin{0, 0, 0}, fx{1, 0, 0}, uz{0, 0, 1};
  occupied.insert(pack_cell(origin));
  p.placements.push_back({g.root.id, g.root.kind, {origin, fx}});
  p.parent_index.push_back(-1);
  q.push_back({&g.root, 0, origin, fx, uz});

  std::unordered_set<std::uint64_t> placed_ids{g.root.id};

  while (!q.empty()) {
    Entry e = q.front();
    q.pop_front();
    for (const BodyNode& c : e.node->children) {
      const Vec3 dir = slot_direction(e.node->kind, c.slot, e.forward, e.up);
      const Vec3 cell = add(e.cell, dir);
      if (!occupied.insert(pack_cell(cell)).second) continue;  // collision: skip c and descendants
      Vec3 up = transported_up(e.forward, e.up, dir);
      for (int r = 0; r < (c.rotation & 3); ++r) up = cross(dir, up);
      const int my_index = static_cast<int>(p.placements.size());
      p.placements.push_back({c.id, c.kind, {cell, dir}});
      p.parent_index.push_back(e.placement_index);
      placed_ids.insert(c.id);
      q.push_back({&c, my_index, cell, dir, up});
    }
  }

  p.m = static_cast<int>(p.placements.size());
  p.z_max = 0;
  for (const Placement& pl : p.placements) {
    p.z_max = std::max(p.z_max, pl.pose.cell[2]);
    if (pl.kind == ModuleKind::ActiveHinge) p.hinge_ids.push_back(pl.id);
  }
  p.h = static_cast<int>(p.hinge_ids.size());

  // Placed-module count for every placed hinge's subtree (hinge included).
  struct Counter {
    const std::unordered_set<std::uint64_t>& placed;
    BodyPhenotype& p;
    int walk(const BodyNode& n) {
      if (!placed.count(n.id)) return 0;
      int s = 1;
      for (const BodyNode& c : n.children) s += walk(c);
      if (n.kind == ModuleKind::ActiveHinge) p.descendant_counts[n.id] = s;
      return s;
    }
  } counter{placed_ids, p};
  counter.walk(g.root);
  return p;
}

// --- random generation -------------------------------------------------------

BodyGenotype random_genotype(int depth, Rng& rng, IdSource& ids) {
  if (depth < 2 || depth > 4) throw std::invalid_argument("depth must be in {2,3,4}");
  std::bernoulli_distribution fill(0.5);
  std::uniform_int_distribution<int> kind_die(0, 1);
  std::uniform_int_distribution<int> rot_die(0, 3);

  // Build into a flat arena (BFS creation order), then assemble the tree.
  struct Tmp {
    ModuleKind kind;
    int rotation, slot, parent;
  };
  std::vector<Tmp> arena{{ModuleKind::Core, 0, -1, -1}};

  auto spawn = [&](int parent, int slot) {
    ModuleKind k = kind_die(rng) == 0 ? ModuleKind::Brick : ModuleKind::ActiveHinge;
    arena.push_back({k, rot_die(rng), slot, parent});
    return static_cast<int>(arena.size()) - 1;
  };

  std::vector<int> level{0};
  int forced = 0;  // index of the node that must reach the target depth
  for (int d = 0; d < depth; ++d) {
    std::vector<int> next;
    std::vector<int> forced_children;
    for (int idx : level) {
      const ModuleKind k = arena[idx].kind;
      std::vector<int> born;
      for (int s = 0; s < slot_count(k); ++s)
        if (fill(rng)) born.push_back(spawn(idx, s));
      if (idx == forced && born.empty()) {
        std::uniform_int_distribution<int> slot_die(0, slot_count(k) - 1);
        born.push_back(spawn(idx, slot_die(rng)));
      }
      if (idx == forced) forced_children = born;
      next.insert(next.end(), born.begin(), born.end());
    }
    if (d + 1 < depth) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(forced_children.size()) - 1);
      forced = forced_children[pick(rng)];
    }
    level = std::move(next);
  }

  // Assemble; ids assigned in creation (BFS) order.
  std::vector<BodyNode> nodes(arena.size());
  for (std::size_t i = 0; i < arena.size(); ++i) {
    nodes[i].id = ids.next();
    nodes[i].kind = arena[i].kind;
    nodes[i].rotation = arena[i].rotation;
    nodes[i].slot = arena[i].slot;
  }
  for (std::size_t i = arena.size(); i-- > 1;)
    insert_child_sorted(nodes[arena[i].parent], std::move(nodes[i]));
  BodyGenotype g{std::move(nodes[0])};
  return enforce_caps(g);
}

// --- variation ---------------------------------------------------------------

namespace {

bool try_add(BodyGenotype& g, Rng& rng, IdSource& ids) {
  std::vector<std::pair<BodyNode*, int>> free_slots;  // (node, slot), BFS order
  for (BodyNode* n : bfs_order_mut(g))
    for (int s = 0; s < slot_count(n->kind); ++s)
      if (!slot_used(*n, s)) free_slots.emplace_back(n, s);
  if (free_slots.empty()) return false;
  std::uniform_int_distribution<std::size_t> pick(0, free_slots.size() - 1);
  auto [node, slot] = free_slots[pick(rng)];
  std::uniform_int_distribution<int> kind_die(0, 1);
  std::uniform_int_distribution<int> rot_die(0, 3);
  BodyNode child;
  child.id = ids.next();
  child.kind = kind_die(rng) == 0 ? ModuleKind::Brick : ModuleKind::ActiveHinge;
  child.rotation = rot_die(rng);
  child.slot = slot;
  insert_child_sorted(*node, std::move(child));
  return true;
}

bool try_delete(BodyGenotype& g, Rng& rng) {
  auto sites = bfs_nonroot_sites(g);
  if (sites.empty()) return false;
  std::uniform_int_distribution<std::size_t> pick(0, sites.size() - 1);
  auto [parent, idx] = sites[pick(rng)];
  parent->children.erase(parent->children.begin() + idx);
  return true;
}

bool try_modify(BodyGenotype& g, Rng& rng) {
  auto sites = bfs_nonroot_sites(g);
  if (sites.empty()) return false;
  std::uniform_int_distribution<std::size_t> pick(0, sites.size() - 1);
  auto [parent, idx] = sites[pick(rng)];
  BodyNode& n = parent->children[idx];
  std::bernoulli_distribution which(0.5);
  if (which(rng)) {
    std::uniform_int_distribution<int> kind_die(0, 1);
    n.kind = kind_die(rng) == 0 ? ModuleKind::Brick : ModuleKind::ActiveHinge;
    // keep only slot-compatible children
    std::erase_if(n.children, [&](const BodyNode& c) { return c.slot >= slot_count(n.kind); });
  } else {
    std::uniform_int_distribution<int> rot_die(0, 3);
    n.rotation = rot_die(rng);
  }
  return true;
}

}  // namespace

BodyGenotype mutate(const BodyGenotype& g, Rng& rng, IdSource& ids) {
  BodyGenotype out = g;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng);
  const int first = u < 0.4 ? 0 : (u < 0.7 ? 1 : 2);  // add / delete / modify
  for (int k = 0; k < 3; ++k) {
    const int op = (first + k) % 3;
    bool done = false;
    switch (op) {
      case 0: done = try_add(out, rng, ids); break;
      case 1: done = try_delete(out, rng); break;
      case 2: done = try_modify(out, rng); break;
    }
    if (done) break;
  }
  return enforce_caps(out);
}

BodyGenotype crossover(const BodyGenotype& a, const BodyGenotype& b, Rng& rng, IdSource& ids) {
  if (a.root.children.empty() || b.root.children.empty()) {
    BodyGenotype copy = a;
    return mutate(copy, rng, ids);
  }
  BodyGenotype out = a;
  auto sites = bfs_nonroot_sites(out);
  std::uniform_int_distribution<std::size_t> pick_a(0, sites.size() - 1);
  auto [parent, idx] = sites[pick_a(rng)];

  auto donors = bfs_order(b);  // index 0 is b's root; skip it
  std::uniform_int_distribution<std::size_t> pick_b(1, donors.size() - 1);
  BodyNode graft = *donors[pick_b(rng)];
  graft.slot = parent->children[idx].slot;

  parent->children.erase(parent->children.begin() + idx);
  std::unordered_set<std::uint64_t> retained;
  collect_ids(out.root, retained);
  // Donor ids survive so structurally inherited hinges still correspond;
  // only collisions with retained ids are re-keyed (losing lineage identity).
  struct Rekey {
    const std::unordered_set<std::uint64_t>& retained;
    IdSource& ids;
    void walk(BodyNode& n) {
      if (retained.count(n.id)) n.id = ids.next();
      for (BodyNode& c : n.children) walk(c);
    }
  } rekey{retained, ids};
  rekey.walk(graft);
  insert_child_sorted(*parent, std::move(graft));
  return enforce_caps(out);
}

// --- tree edit distance ------------------------------------------------------

namespace {

struct Label {
  ModuleKind kind;
  int rotation;
  bool operator==(const Label&) const = default;
};

// Postorder-flattened tree for the Zhang–Shasha dynamic program.
struct Flat {
  std::vector<Label> labels;    // postorder
  std::vector<int> lml;         // leftmost-leaf postorder index per node
  std::vector<int> keyroots;    // ascending
};

int flatten(const BodyNode& n, Flat& f) {
  int first_leaf = -1;
  for (const BodyNode& c : n.children) {
    int leaf = flatten(c, f);
    if (first_leaf < 0) first_leaf = leaf;
  }
  const int me = static_cast<int>(f.labels.size());
  f.labels.push_back({n.kind, n.rotation});
  f.lml.push_back(first_leaf < 0 ? me : first_leaf);
  return first_leaf < 0 ? me : first_leaf;
}

Flat flatten(const BodyGenotype& g) {
  Flat f;
  flatten(g.root, f);
  const int n = static_cast<int>(f.labels.size());
  std::vector<bool> is_keyroot(n, false);
  std::vector<bool> seen_lml(n, false);
  for (int i = n - 1; i >= 0; --i) {  // a keyroot is the highest node with its lml
    if (!seen_lml[f.lml[i]]) {
      is_keyroot[i] = true;
      seen_lml[f.lml[i]] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    if (is_keyroot[i]) f.keyroots.push_back(i);
  return f;
}

}  // namespace

int tree_edit_distance(const BodyGenotype& ga, const BodyGenotype& gb) {
  const Flat a = flatten(ga), b = flatten(gb);
  const int na = static_cast<int>(a.labels.size());
  const int nb = static_cast<int>(b.labels.size());
  std::vector<std::vector<int>> td(na, std::vector<int>(nb, 0));
  std::vector<std::vector<int>> fd(na + 1, std::vector<int>(nb + 1, 0));

  for (int ik : a.keyroots) {
    for (int jk : b.keyroots) {
      const int ioff = a.lml[ik], joff = b.lml[jk];
      const int m = ik - ioff + 1, n = jk - joff + 1;
      fd[0][0] = 0;
      for (int i = 1; i <= m; ++i) fd[i][0] = fd[i - 1][0] + 1;
      for (int j = 1; j <= n; ++j) fd[0][j] = fd[0][j - 1] + 1;
      for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) {
          const int pi = ioff + i - 1, pj = joff + j - 1;
          if (a.lml[pi] == ioff && b.lml[pj] == joff) {
            const int relabel = a.labels[pi] == b.labels[pj] ? 0 : 1;
            fd[i][j] = std::min({fd[i - 1][j] + 1, fd[i][j - 1] + 1, fd[i - 1][j - 1] + relabel});
            td[pi][pj] = fd[i][j];
          } else {
            const int fi = a.lml[pi] - ioff, fj = b.lml[pj] - joff;
            fd[i][j] = std::min({fd[i - 1][j] + 1, fd[i][j - 1] + 1, fd[fi][fj] + td[pi][pj]});
          }
        }
      }
    }
  }
  return td[na - 1][nb - 1];
}

}  // namespace lamarck
