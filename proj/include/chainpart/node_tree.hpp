#pragma once

#include <string>
#include <vector>

#include "chainpart/bipartite.hpp"
#include "chainpart/coloring.hpp"
#include "chainpart/poset.hpp"

namespace chainpart {

enum class Classification { Unset, Active, QMember, Recursive, Problematic, PlainDependent };

const char* classification_name(Classification c);

struct NodeTreeEntry {
  int id = -1;
  int parent = -1;
  Node node;
  int level_lo = 0, level_hi = 0;  // antichain ids the node spans
  bool lower_layered = false;      // position within the parent's split
  Classification cls = Classification::Unset;
  int owner = -1;     // owning active node within the handling instance
  int instance = -1;  // instance that handles this node's split
  std::vector<int> children;
  bool split_done = false;
};

// Interval of a node: upset(X) ∩ downset(Y) in the ground order.
Bits node_interval(const Poset& p, const Node& n);

// All edges (x<y) of a node as ground pairs, in lexicographic order.
std::vector<EdgeKey> node_edges(const Node& n);

class NodeTree {
 public:
  int add_root(Node n, int lo, int hi);
  // Attaches a child and verifies interval containment and lexicographic
  // monotonicity of characteristics; failures are appended to `alarms`.
  int attach(int parent, Node n, int lo, int hi, bool lower, const Poset& p,
             std::vector<std::string>* alarms);

  NodeTreeEntry& at(int id) { return entries_[id]; }
  const NodeTreeEntry& at(int id) const { return entries_[id]; }
  int size() const { return static_cast<int>(entries_.size()); }

  // Diagnostic dump: one JSON object per node.
  std::string dump_json() const;

 private:
  std::vector<NodeTreeEntry> entries_;
};

struct ClassifyContext {
  Characteristics owner_chars;  // characteristics of the governing path/active node
  int floor_sqrt = 1;
  int ceil_sqrt = 1;
};

// Classification of a freshly attached child relative to its governing
// machinery: equal characteristics -> QMember (path member); width at most
// floor(sqrt(w)) -> Recursive; a ceil(sqrt(w)) Dilworth clique -> Active;
// otherwise Problematic.
Classification classify_child(const Node& child, const ClassifyContext& ctx);

// Width of the edge poset ((a<b) <= (c<d) iff b <= c) over the given edges.
int edge_poset_width(const Poset& p, const std::vector<EdgeKey>& edges);

}  // namespace chainpart
