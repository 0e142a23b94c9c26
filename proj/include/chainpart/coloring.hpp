#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chainpart/bipartite.hpp"
#include "chainpart/poset.hpp"

namespace chainpart {

using BigInt = boost::multiprecision::cpp_int;

// Colors are minted lazily: a color is a leaf in a tree of named reserves
// ("bundles"). A bundle is an interior node; refining a bundle for a new
// consumer appends a selector segment. The rendered path (segments joined
// with '/') is the external color name and the deterministic tie-break key.
class ColorArena {
 public:
  int root(const std::string& label);
  int child(int parent, const std::string& label);
  int parent(int id) const { return entries_[id].parent; }
  const std::string& path(int id) const;
  // True iff `anc` is `id` or an ancestor of it (i.e. the reserve contains it).
  bool contains(int anc, int id) const;
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  struct Entry {
    int parent = -1;
    std::string label;
    mutable std::string path_cache;
  };
  std::vector<Entry> entries_;
  std::map<std::pair<int, std::string>, int> intern_;
};

// Chain budget of the algorithm: lambda(1)=1 and
//   lambda1(w) = 16*floor(w^(15/2))*lambda(floor(sqrt(w)))
//   lambda2(w) = 2*C(w^3+1,2) + 2
//   lambda3(w) = w^4*lambda2(w)*lambda(floor(sqrt(w)))
//   lambda(w)  = lambda1(w)*lambda2(w)*lambda3(w)
struct LambdaBudget {
  int w = 0;
  BigInt l1, l2, l3, lambda;
};
LambdaBudget lambda_budget(int w);
// Total chain bound of a run: w^2 * lambda(w).
BigInt lambda_chain_bound(int w);

// Ground edge (a < b) between two consecutive antichains.
struct EdgeKey {
  int a = 0, b = 0;
  auto operator<=>(const EdgeKey&) const = default;
};

// (a<b) <=_E (c<d) iff b <= c in the ground order.
inline bool edge_leq(const Poset& p, EdgeKey e, EdgeKey f) {
  return p.leq(e.b, f.a);
}
inline bool edge_comparable(const Poset& p, EdgeKey e, EdgeKey f) {
  return edge_leq(p, e, f) || edge_leq(p, f, e);
}

// Lexicographically-first edge (x<y) of `source` with x <= t.a and t.b <= y.
// Exists for any target edge inside the source interval; throws otherwise.
EdgeKey find_witness_edge(const Poset& p, const Node& source, EdgeKey target);

// Projecting colors from node `source` = (X, Y) onto edges spanned between
// two antichains inside its interval. ap_prime/as_prime are those antichains
// restricted to the interval (sorted ids); the lexicographically-first
// perfect matchings M1: X -> ap_prime and M2: as_prime -> Y are fixed, and a
// target edge (z<t) maps to the source edge (M1-partner of z, M2-partner of t).
// Identity matchings are used when an antichain equals a side of the source.
std::map<EdgeKey, EdgeKey> project_colors(const Poset& p, const Node& source,
                                          const std::vector<int>& ap_prime,
                                          const std::vector<int>& as_prime,
                                          const std::vector<EdgeKey>& targets);

// Shuffling colors through a complete node of width u that splits into two
// complete children (X,Z) and (Z,Y): parent edge (x_i, y_j) lands on child
// edges (x_i, z_k) and (z_k, y_j) with k = (i+j) mod u. Returns per-child-edge
// source edges; `mid` is Z in ascending id order.
struct ShuffleResult {
  std::map<EdgeKey, EdgeKey> lower, upper;
};
ShuffleResult shuffle_colors(const Node& source, const std::vector<int>& mid);

// Edge bundles, vertex colors and the property-(*) registry.
class ColoringState {
 public:
  explicit ColoringState(ColorArena* arena) : arena_(arena) {}

  void set_edge_bundle(EdgeKey e, std::vector<int> refs);
  void append_edge_refs(EdgeKey e, const std::vector<int>& refs);
  const std::vector<int>* edge_bundle(EdgeKey e) const;

  // Mints the canonical color (child "c") of the lexicographically smallest
  // incident bundle ref and assigns it to x. Returns the color arena id.
  int assign_vertex_color(int x, const std::vector<EdgeKey>& incident);
  const std::map<int, int>& vertex_colors() const { return vertex_color_; }
  int colors_used() const { return static_cast<int>(vertices_by_color_.size()); }

  // Property (*): for every minted color, the endpoints of all edges whose
  // bundle contains it, together with the vertices colored by it, form a
  // chain. Returns the first offending (color, element, element) if any.
  struct StarViolation {
    int color = -1;
    int elem_a = -1, elem_b = -1;
  };
  std::optional<StarViolation> check_property_star(const Poset& p) const;

  ColorArena& arena() { return *arena_; }

 private:
  ColorArena* arena_;
  std::map<EdgeKey, std::vector<int>> bundles_;
  std::map<int, std::vector<EdgeKey>> edges_by_ref_;
  std::map<int, int> vertex_color_;
  std::map<int, std::vector<int>> vertices_by_color_;
};

}  // namespace chainpart
