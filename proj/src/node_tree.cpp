#include "chainpart/node_tree.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace chainpart {

using nlohmann::json;

const char* classification_name(Classification c) {
  switch (c) {
    case Classification::Unset: return "unset";
    case Classification::Active: return "active";
    case Classification::QMember: return "q-member";
    case Classification::Recursive: return "recursive";
    case Classification::Problematic: return "problematic";
    case Classification::PlainDependent: return "plain-dependent";
  }
  return "?";
}

Bits node_interval(const Poset& p, const Node& n) {
  return p.upset(n.bip.xs) & p.downset(n.bip.ys);
}

std::vector<EdgeKey> node_edges(const Node& n) {
  std::vector<EdgeKey> out;
  for (int i = 0; i < n.bip.nx(); ++i)
    for (int j = 0; j < n.bip.ny(); ++j)
      if (n.bip.has_edge(i, j)) out.push_back({n.bip.xs[i], n.bip.ys[j]});
  return out;
}

int NodeTree::add_root(Node n, int lo, int hi) {
  NodeTreeEntry e;
  e.id = size();
  e.node = std::move(n);
  e.level_lo = lo;
  e.level_hi = hi;
  entries_.push_back(std::move(e));
  return entries_.back().id;
}

int NodeTree::attach(int parent, Node n, int lo, int hi, bool lower, const Poset& p,
                     std::vector<std::string>* alarms) {
  NodeTreeEntry e;
  e.id = size();
  e.parent = parent;
  e.level_lo = lo;
  e.level_hi = hi;
  e.lower_layered = lower;
  const NodeTreeEntry& pe = entries_[parent];
  // Interval containment (the child lives inside the parent's interval).
  Bits pi = node_interval(p, pe.node);
  Bits ci = node_interval(p, n);
  pi.resize(ci.size());
  if (alarms && !ci.is_subset_of(pi))
    alarms->push_back("node " + std::to_string(e.id) +
                      ": interval not contained in parent interval");
  // Characteristics are lexicographically non-increasing along tree paths.
  if (alarms && !characteristics_lex_leq(n.chars, pe.node.chars))
    alarms->push_back("node " + std::to_string(e.id) +
                      ": characteristics exceed parent characteristics");
  e.node = std::move(n);
  entries_[parent].children.push_back(e.id);
  entries_.push_back(std::move(e));
  return entries_.back().id;
}

std::string NodeTree::dump_json() const {
  std::ostringstream os;
  for (const auto& e : entries_) {
    json j;
    j["id"] = e.id;
    j["parent"] = e.parent;
    j["x"] = e.node.bip.xs;
    j["y"] = e.node.bip.ys;
    j["width"] = e.node.chars.width;
    j["surplus"] = e.node.chars.surplus == Characteristics::kInfinity
                       ? json("inf")
                       : json(e.node.chars.surplus);
    j["complete"] = e.node.complete;
    j["classification"] = classification_name(e.cls);
    j["owner"] = e.owner;
    j["instance"] = e.instance;
    j["levels"] = {e.level_lo, e.level_hi};
    j["children"] = e.children;
    os << j.dump() << "\n";
  }
  return os.str();
}

Classification classify_child(const Node& child, const ClassifyContext& ctx) {
  if (child.chars == ctx.owner_chars) return Classification::QMember;
  if (child.chars.width <= ctx.floor_sqrt) return Classification::Recursive;
  const int k = std::min(ctx.ceil_sqrt, child.chars.width);
  if (find_dilworth_clique(child, k)) return Classification::Active;
  return Classification::Problematic;
}

int edge_poset_width(const Poset& p, const std::vector<EdgeKey>& edges) {
  const int n = static_cast<int>(edges.size());
  if (n == 0) return 0;
  std::vector<int> match_r(n, -1);
  std::vector<char> visited(n, 0);
  auto strictly_less = [&](int e, int f) {
    return e != f && edge_leq(p, edges[e], edges[f]);
  };
  auto augment = [&](auto&& self, int x) -> bool {
    for (int y = 0; y < n; ++y) {
      if (visited[y] || !strictly_less(x, y)) continue;
      visited[y] = 1;
      if (match_r[y] < 0 || self(self, match_r[y])) {
        match_r[y] = x;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int x = 0; x < n; ++x) {
    std::fill(visited.begin(), visited.end(), 0);
    if (augment(augment, x)) ++matched;
  }
  return n - matched;
}

}  // namespace chainpart
