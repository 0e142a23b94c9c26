#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "chainpart/coloring.hpp"
#include "chainpart/node_tree.hpp"
#include "chainpart/partitioners.hpp"
#include "chainpart/presentation.hpp"

namespace chainpart {

struct RunStats {
  int w = 0;
  int rounds = 0;
  int elements = 0;
  long long colors_used = 0;
  std::string lambda_bound;  // decimal w^2 * lambda(w)
  int max_edge_poset_width_seen = 0;
  int recursion_depth = 0;
  std::vector<std::string> invariant_alarms;
  // Monitored quantities (bounds are reported, not enforced):
  int max_registry_width = 0;       // widths of the (P(u,s), <=) posets
  int max_registry_chain_edges = 0; // largest edge poset fed per registry chain
  int max_l_edge_chains = 0;        // First-Fit chains over a registry-chain edge poset
  int max_grower_chains = 0;        // up-/down-growing chains over A/B edge posets
  int first_problematic_total = 0;
  int active_nodes = 0;
  int node_count = 0;
  int instance_count = 0;
};

struct MainOptions {
  bool check_star_each_round = false;
  bool strict_accounting = false;
  PartitionerFactory general = default_general_partitioner();
};

// On-line chain partitioner for regular posets. Feed the event stream in
// order; every vertex is assigned a color (chain name) in the round it is
// presented, and colors are never revised.
class MainPartitioner {
 public:
  explicit MainPartitioner(MainOptions opts = {});
  ~MainPartitioner();

  // Applies the event, colors all new vertices, runs per-round invariants.
  // Returns (element id, color path) pairs for the round.
  std::vector<std::pair<int, std::string>> handle(const Event& e);

  RunStats finalize();

  const PresentationState& presentation() const { return pres_; }
  const NodeTree& tree() const { return tree_; }
  const ColoringState& coloring() const { return colors_; }
  ColorArena& arena() { return arena_; }
  const std::vector<std::string>& alarms() const { return alarms_; }

  // Registry introspection for tests: active node ids per characteristics in
  // the top-level instance, in registration order.
  std::vector<int> registry_nodes(int width, int surplus) const;
  // Order relation of that registry: does a precede b?
  bool registry_less(int width, int surplus, int node_a, int node_b) const;

  // Every registry-chain edge poset fed during the run, with the width of the
  // feeding instance: one (w, edges-in-arrival-order) entry per chain.
  std::vector<std::pair<int, std::vector<EdgeKey>>> registry_chain_edges() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;

  PresentationState pres_;
  NodeTree tree_;
  ColorArena arena_;
  ColoringState colors_;
  MainOptions opts_;
  std::vector<std::string> alarms_;
};

}  // namespace chainpart
