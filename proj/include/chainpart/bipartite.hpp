#pragma once

#include <climits>
#include <cstdint>
#include <optional>
#include <vector>

namespace chainpart {

// Bipartite poset between two antichains X (lower) and Y (upper).
// xs/ys hold global element ids in ascending order; adj[i] is a bitmask of
// the ys indices above xs[i]. Sides are capped at 31 elements, which is far
// beyond the intended widths.
struct BipartitePoset {
  std::vector<int> xs, ys;
  std::vector<std::uint32_t> adj;

  static constexpr int kMaxSide = 31;

  int nx() const { return static_cast<int>(xs.size()); }
  int ny() const { return static_cast<int>(ys.size()); }
  bool has_edge(int i, int j) const { return (adj[i] >> j) & 1u; }
  int edge_count() const;
  bool is_complete() const;
};

struct Characteristics {
  int width = 0;
  int surplus = 0;
  static constexpr int kInfinity = INT_MAX;

  // Default ordering is the lexicographic one; the infinity sentinel is the
  // largest int, so (width, surplus) compares naturally.
  auto operator<=>(const Characteristics&) const = default;
};

// Lexicographic comparison with surplus infinity handled by the sentinel.
bool characteristics_lex_leq(const Characteristics& a, const Characteristics& b);

// A connected regular bipartite poset with its characteristics.
struct Node {
  BipartitePoset bip;
  Characteristics chars;
  bool complete = false;
};

struct DilworthClique {
  int k = 0;
  std::vector<int> xs, ys;  // indices into bip.xs / bip.ys, ascending
};

// match[i] = ys index matched to xs[i]; nullopt when no perfect matching.
// Lexicographically first: scanning xs in order, each takes the smallest
// feasible partner.
std::optional<std::vector<int>> perfect_matching(const BipartitePoset& b);

// Every edge extends to a perfect matching (and one exists).
bool is_regular(const BipartitePoset& b);

// Connected components of a regular bipartite poset, as nodes with computed
// characteristics, ordered by smallest x id.
std::vector<Node> components(const BipartitePoset& b);

// Largest k such that |N(A)| >= min(|A|+k, |Y|) for every nonempty A of X.
// Characteristics::kInfinity iff complete. Subset enumeration; |X| <= 25.
int surplus(const BipartitePoset& b);
// Same quantity from the Y side over downsets (the duality used as an oracle).
int surplus_dual(const BipartitePoset& b);

// Lexicographically-first Dilworth clique of width k: k xs and k ys, all
// pairs comparable, whose diagonal extends to a perfect matching.
std::optional<DilworthClique> find_dilworth_clique(const Node& n, int k);

// Builds a Node from a connected regular bipartite poset (computes
// characteristics); throws std::invalid_argument otherwise.
Node make_node(BipartitePoset b);

}  // namespace chainpart
