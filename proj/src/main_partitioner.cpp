#include "chainpart/main_partitioner.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>

namespace chainpart {

namespace {

int isqrt_int(int v) {
  int r = 0;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

std::string chars_label(const Characteristics& c) {
  std::string s = std::to_string(c.width) + ".";
  s += c.surplus == Characteristics::kInfinity ? "inf" : std::to_string(c.surplus);
  return s;
}

}  // namespace

struct MainPartitioner::Impl {
  // --- plumbing -------------------------------------------------------------
  PresentationState* pres = nullptr;
  NodeTree* tree = nullptr;
  ColorArena* arena = nullptr;
  ColoringState* colors = nullptr;
  MainOptions* opts = nullptr;
  std::vector<std::string>* alarms = nullptr;
  RunStats stats;
  bool finalized = false;

  const Poset& poset() const { return pres->poset(); }
  void alarm(std::string msg) { alarms->push_back(std::move(msg)); }

  // --- machinery state -------------------------------------------------------
  struct GrowerSide {
    std::vector<EdgeKey> items;
    std::unique_ptr<FirstFitPartitioner> ff;
    bool down = false;  // direction monitor: new items must be minimal (down) / maximal (up)
  };

  struct Registry {
    Characteristics chars;
    std::vector<int> nodes;  // node ids, registration order
    std::vector<std::vector<int>> clique_xs, clique_ys;  // global ids of R(N)
    std::vector<std::vector<char>> rel;                  // rel[i][j]: nodes[i] < nodes[j]
    std::unique_ptr<IOnlinePartitioner> part;            // over registration indices
    struct LChain {
      std::vector<EdgeKey> edges;
      std::unique_ptr<FirstFitPartitioner> ff;
    };
    std::vector<std::unique_ptr<LChain>> chains;
  };

  struct QState {
    int active_node = -1;
    Characteristics chars;
    bool tree_mode = false;
    // Unsplit members ("leaves"): their edges' transported additional refs.
    std::map<int, std::map<EdgeKey, std::array<int, 2>>> leaf_addl;
    std::map<int, int> leaf_path;
    int next_path = 1;
    std::map<int, std::unique_ptr<GrowerSide>> a_paths, b_paths;  // per path id
    std::map<std::pair<int, int>, std::vector<EdgeKey>> merged;   // (side, chain) monitor
  };

  struct PPath {
    int k_node = -1;  // first problematic node of this path
    Characteristics chars;
    int last = -1;
    std::map<EdgeKey, int> k_base;              // K edge -> reserved color block
    std::map<EdgeKey, std::array<int, 2>> addl; // on the edges of `last`
    std::unique_ptr<GrowerSide> a_down, b_up;
    std::map<std::pair<int, int>, std::vector<EdgeKey>> merged;
  };

  struct ProblematicState {
    int m_node = -1;
    int fp_serial = 0;
    std::map<Characteristics, int> first_count;
    int first_total = 0;
    std::map<int, PPath> paths;      // keyed by first-problematic node id
    std::map<int, int> member_path;  // problematic node -> path key
  };

  struct Instance {
    int id = -1;
    int w = 0, fsqrt = 1, csqrt = 1;
    int root_node = -1;
    int depth = 0;
    bool chain_mode = false;
    std::map<EdgeKey, int> root_ref;
    std::map<std::pair<int, int>, std::unique_ptr<Registry>> registries;
    std::map<int, QState> qstates;                              // per active node
    std::map<int, std::unique_ptr<ProblematicState>> pstates;   // per problematic root
    std::map<int, int> problematic_of;  // problematic node -> pstate key
  };

  std::vector<std::unique_ptr<Instance>> instances;
  std::map<int, int> node_instance;                   // node id -> handling instance
  std::map<std::pair<int, int>, std::vector<int>> live;  // gap -> live node ids

  // --- helpers ---------------------------------------------------------------
  int primary_ref(EdgeKey e) const {
    const auto* b = colors->edge_bundle(e);
    if (!b || b->empty()) throw std::logic_error("edge has no bundle yet");
    return b->front();
  }

  int base_ref(const Instance& inst, int node_id, EdgeKey e) {
    if (node_id == inst.root_node) return inst.root_ref.at(e);
    return primary_ref(e);
  }

  GrowerSide* get_side(std::map<int, std::unique_ptr<GrowerSide>>& m, int pid, bool down) {
    auto& p = m[pid];
    if (!p) p = make_grower(down);
    return p.get();
  }

  std::unique_ptr<GrowerSide> make_grower(bool down) {
    auto g = std::make_unique<GrowerSide>();
    g->down = down;
    GrowerSide* raw = g.get();
    g->ff = std::make_unique<FirstFitPartitioner>([this, raw](int a, int b) {
      return edge_leq(poset(), raw->items[a], raw->items[b]);
    });
    return g;
  }

  // Feeds one edge; asserts the up-/down-growing contract and records the
  // merged-chain monitor. Returns the chain index.
  int feed_edge(GrowerSide* g, std::map<std::pair<int, int>, std::vector<EdgeKey>>& merged,
                int side, EdgeKey e) {
    for (EdgeKey f : g->items) {
      bool bad = g->down ? edge_leq(poset(), f, e) && f != e
                         : edge_leq(poset(), e, f) && f != e;
      if (bad) {
        alarm("grower fed a non-" + std::string(g->down ? "minimal" : "maximal") +
              " edge (" + std::to_string(e.a) + "<" + std::to_string(e.b) + ")");
        break;
      }
    }
    int h = static_cast<int>(g->items.size());
    g->items.push_back(e);
    int chain = g->ff->assign(h);
    stats.max_grower_chains = std::max(stats.max_grower_chains, g->ff->chain_count());
    auto& bucket = merged[{side, chain}];
    for (EdgeKey f : bucket)
      if (!edge_comparable(poset(), e, f)) {
        alarm("merged edge chains are not totally ordered across paths");
        break;
      }
    bucket.push_back(e);
    return chain;
  }

  // Antichain members of a level restricted to a node's interval, ascending.
  std::vector<int> level_in_interval(const Node& n, int level_id) {
    Bits iv = node_interval(poset(), n);
    std::vector<int> out;
    for (int x : pres->level_members(level_id))
      if (iv.test(x)) out.push_back(x);
    std::sort(out.begin(), out.end());
    return out;
  }

  // --- active machinery -------------------------------------------------------
  void register_active(Instance& inst, int node_id, bool as_root) {
    NodeTreeEntry& entry = tree->at(node_id);
    const Node& n = entry.node;
    auto key = std::make_pair(n.chars.width, n.chars.surplus);
    auto& regp = inst.registries[key];
    if (!regp) {
      regp = std::make_unique<Registry>();
      regp->chars = n.chars;
      Registry* raw = regp.get();
      regp->part = (opts->general ? opts->general : default_general_partitioner())(
          [raw](int a, int b) { return raw->rel[a][b] != 0; });
    }
    Registry& reg = *regp;

    // R(N): the lexicographically-first Dilworth clique, as wide as available
    // (the full ceil(sqrt(w)) width whenever the node is genuinely active).
    std::optional<DilworthClique> dc;
    for (int k = std::min(inst.csqrt, n.chars.width); k >= 1 && !dc; --k)
      dc = find_dilworth_clique(n, k);
    if (!dc) {
      alarm("active node " + std::to_string(node_id) + " has no clique at all");
      return;
    }
    std::vector<int> cx, cy;
    for (int i : dc->xs) cx.push_back(n.bip.xs[i]);
    for (int j : dc->ys) cy.push_back(n.bip.ys[j]);

    const int idx = static_cast<int>(reg.nodes.size());
    for (auto& row : reg.rel) row.push_back(0);
    reg.rel.emplace_back(idx + 1, 0);
    for (int i = 0; i < idx; ++i) {
      bool below = false, above = false;
      for (int y : reg.clique_ys[i])
        for (int x : cx)
          if (poset().leq(y, x)) below = true;  // nodes[i] < new
      for (int y : cy)
        for (int x : reg.clique_xs[i])
          if (poset().leq(y, x)) above = true;  // new < nodes[i]
      if (below && above)
        alarm("registry order is not antisymmetric at node " + std::to_string(node_id));
      reg.rel[i][idx] = below;
      reg.rel[idx][i] = above;
    }
    reg.nodes.push_back(node_id);
    reg.clique_xs.push_back(cx);
    reg.clique_ys.push_back(cy);
    check_registry(inst, reg);
    const int cp = reg.part->assign(idx);

    if (!as_root) {
      // Replace the chains of the edge poset of the registry chain with colors
      // of the instance-root edges.
      while (static_cast<int>(reg.chains.size()) <= cp)
        reg.chains.push_back(nullptr);
      auto& lcp = reg.chains[cp];
      if (!lcp) {
        lcp = std::make_unique<Registry::LChain>();
        Registry::LChain* raw = lcp.get();
        lcp->ff = std::make_unique<FirstFitPartitioner>([this, raw](int a, int b) {
          return edge_leq(poset(), raw->edges[a], raw->edges[b]);
        });
      }
      const Node& root = tree->at(inst.root_node).node;
      const std::string tag = "P" + chars_label(n.chars) + "c" + std::to_string(cp);
      for (EdgeKey e : node_edges(n)) {
        int h = static_cast<int>(lcp->edges.size());
        lcp->edges.push_back(e);
        int ce = lcp->ff->assign(h);
        stats.max_l_edge_chains = std::max(stats.max_l_edge_chains, lcp->ff->chain_count());
        EdgeKey wit = find_witness_edge(poset(), root, e);
        int ref = arena->child(base_ref(inst, inst.root_node, wit),
                               tag + "e" + std::to_string(ce));
        colors->set_edge_bundle(e, {ref});
      }
      entry.cls = Classification::Active;
      entry.owner = node_id;
      entry.instance = inst.id;
    }
    node_instance[node_id] = inst.id;
    ++stats.active_nodes;

    // Q machinery for the node's own equal-characteristics descendants.
    QState qs;
    qs.active_node = node_id;
    qs.chars = n.chars;
    qs.tree_mode = n.chars.surplus == Characteristics::kInfinity;
    auto& addl = qs.leaf_addl[node_id];
    for (EdgeKey e : node_edges(n)) {
      int base = base_ref(inst, node_id, e);
      addl[e] = {arena->child(base, "q0"), arena->child(base, "q1")};
    }
    qs.leaf_path[node_id] = 0;
    inst.qstates.emplace(node_id, std::move(qs));
  }

  void check_registry(Instance& inst, Registry& reg) {
    const int m = static_cast<int>(reg.rel.size());
    // Transitivity + antisymmetry of the extended order.
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        if (i != j && reg.rel[i][j] && reg.rel[j][i]) {
          alarm("registry order antisymmetry violated");
          return;
        }
        if (!reg.rel[i][j]) continue;
        for (int k = 0; k < m; ++k)
          if (reg.rel[j][k] && !reg.rel[i][k]) {
            alarm("registry order transitivity violated");
            return;
          }
      }
    // Width of the registry poset (must stay within floor(sqrt(w))).
    std::vector<int> match_r(m, -1);
    std::vector<char> vis(m, 0);
    auto augment = [&](auto&& self, int x) -> bool {
      for (int y = 0; y < m; ++y) {
        if (vis[y] || !reg.rel[x][y]) continue;
        vis[y] = 1;
        if (match_r[y] < 0 || self(self, match_r[y])) {
          match_r[y] = x;
          return true;
        }
      }
      return false;
    };
    int matched = 0;
    for (int x = 0; x < m; ++x) {
      std::fill(vis.begin(), vis.end(), 0);
      if (augment(augment, x)) ++matched;
    }
    const int width = m - matched;
    stats.max_registry_width = std::max(stats.max_registry_width, width);
    if (width > std::max(1, inst.fsqrt))
      alarm("registry P(" + chars_label(reg.chars) + ") width " + std::to_string(width) +
            " exceeds floor sqrt bound " + std::to_string(inst.fsqrt));
  }

  // --- recursive spawns --------------------------------------------------------
  void spawn_recursive(Instance& parent, int node_id) {
    const Node& n = tree->at(node_id).node;
    auto inst = std::make_unique<Instance>();
    inst->id = static_cast<int>(instances.size());
    inst->root_node = node_id;
    inst->w = n.chars.width;
    if (n.chars.width == 1) {
      inst->chain_mode = true;
      inst->depth = parent.depth;
      node_instance[node_id] = inst->id;
      instances.push_back(std::move(inst));
      return;
    }
    inst->fsqrt = isqrt_int(inst->w);
    inst->csqrt = inst->fsqrt * inst->fsqrt == inst->w ? inst->fsqrt : inst->fsqrt + 1;
    inst->depth = parent.depth + 1;
    stats.recursion_depth = std::max(stats.recursion_depth, inst->depth);
    for (EdgeKey e : node_edges(n))
      inst->root_ref[e] = arena->child(primary_ref(e), "i" + std::to_string(inst->id));
    Instance* raw = inst.get();
    instances.push_back(std::move(inst));
    register_active(*raw, node_id, /*as_root=*/true);
  }

  // --- problematic machinery -----------------------------------------------------
  void make_pstate(Instance& inst, int m_node, int owner_active) {
    NodeTreeEntry& entry = tree->at(m_node);
    entry.cls = Classification::Problematic;
    entry.owner = owner_active;
    entry.instance = inst.id;
    node_instance[m_node] = inst.id;
    auto ps = std::make_unique<ProblematicState>();
    ps->m_node = m_node;
    start_ppath(inst, *ps, m_node, /*project_from_m=*/false);
    inst.problematic_of[m_node] = m_node;
    inst.pstates.emplace(m_node, std::move(ps));
  }

  // Starts the path machinery for a first-problematic node K within D(M).
  // For K = M the reserved blocks hang off M's own bundle; otherwise the
  // blocks are projected from M's edges onto K's edges.
  void start_ppath(Instance& inst, ProblematicState& ps, int k_node, bool project_from_m) {
    const Node& kn = tree->at(k_node).node;
    const int serial = ps.fp_serial++;
    ps.first_total++;
    stats.first_problematic_total++;
    int& cnt = ps.first_count[kn.chars];
    ++cnt;
    if (cnt > inst.w * inst.w)
      alarm("more than w^2 first problematic nodes share characteristics in D(" +
            std::to_string(ps.m_node) + ")");
    if (ps.first_total > inst.w * inst.w * inst.w * inst.w)
      alarm("more than w^4 first problematic nodes in D(" + std::to_string(ps.m_node) + ")");

    PPath path;
    path.k_node = k_node;
    path.chars = kn.chars;
    path.last = k_node;
    const std::string tag = "f" + std::to_string(serial);
    if (!project_from_m) {
      for (EdgeKey e : node_edges(kn)) {
        int block = arena->child(primary_ref(e), tag);
        path.k_base[e] = block;
        path.addl[e] = {arena->child(block, "q0"), arena->child(block, "q1")};
      }
    } else {
      const NodeTreeEntry& ke = tree->at(k_node);
      const Node& mn = tree->at(ps.m_node).node;
      auto ap = level_in_interval(mn, ke.level_lo);
      auto as = level_in_interval(mn, ke.level_hi);
      auto targets = node_edges(kn);
      auto srcmap = project_colors(poset(), mn, ap, as, targets);
      for (EdgeKey t : targets) {
        int block = arena->child(primary_ref(srcmap.at(t)), tag);
        path.k_base[t] = block;
        path.addl[t] = {arena->child(block, "q0"), arena->child(block, "q1")};
        colors->set_edge_bundle(t, {block});
      }
    }
    ps.member_path[k_node] = k_node;
    ps.paths.emplace(k_node, std::move(path));
  }

  // --- split handling ------------------------------------------------------------
  struct SplitChildren {
    std::vector<int> lowers, uppers;  // node ids, ascending
    std::vector<int> mid;             // new antichain elements inside the parent
  };

  void dispatch_split(int node_id, const SplitChildren& sc) {
    auto it = node_instance.find(node_id);
    if (it == node_instance.end()) {
      alarm("split of node " + std::to_string(node_id) + " with no handling instance");
      return;
    }
    Instance& inst = *instances[it->second];
    NodeTreeEntry& entry = tree->at(node_id);
    entry.split_done = true;
    if (inst.chain_mode) {
      chain_split(inst, node_id, sc);
      return;
    }
    if (node_id == inst.root_node || entry.cls == Classification::Active ||
        entry.cls == Classification::QMember) {
      int active = node_id == inst.root_node ? inst.root_node
                   : entry.cls == Classification::Active ? node_id
                                                          : entry.owner;
      auto qit = inst.qstates.find(active);
      if (qit == inst.qstates.end()) {
        alarm("missing Q state for active node " + std::to_string(active));
        return;
      }
      q_split(inst, qit->second, node_id, sc);
      return;
    }
    if (entry.cls == Classification::Problematic) {
      auto pit = inst.problematic_of.find(node_id);
      if (pit == inst.problematic_of.end()) {
        alarm("problematic node " + std::to_string(node_id) + " has no state");
        return;
      }
      p_split(inst, *inst.pstates.at(pit->second), node_id, sc);
      return;
    }
    alarm("split of node " + std::to_string(node_id) + " with classification " +
          classification_name(entry.cls));
  }

  void chain_split(Instance& inst, int node_id, const SplitChildren& sc) {
    const NodeTreeEntry& entry = tree->at(node_id);
    EdgeKey pe = node_edges(entry.node).at(0);
    const std::vector<int> refs = *colors->edge_bundle(pe);
    for (int cid : sc.lowers) mark_chain_child(inst, cid, refs);
    for (int cid : sc.uppers) mark_chain_child(inst, cid, refs);
  }

  void mark_chain_child(Instance& inst, int cid, const std::vector<int>& refs) {
    NodeTreeEntry& ce = tree->at(cid);
    if (ce.node.chars.width != 1) {
      alarm("chain instance met a node of width > 1");
      return;
    }
    colors->set_edge_bundle(node_edges(ce.node).at(0), refs);
    ce.cls = Classification::Recursive;
    ce.owner = inst.root_node;
    ce.instance = inst.id;
    node_instance[cid] = inst.id;
  }

  void q_split(Instance& inst, QState& qs, int nprime, const SplitChildren& sc) {
    auto itL = qs.leaf_addl.find(nprime);
    if (itL == qs.leaf_addl.end()) {
      alarm("Q split of a non-leaf member " + std::to_string(nprime));
      return;
    }
    const auto addl = std::move(itL->second);
    qs.leaf_addl.erase(itL);
    const int pid = qs.leaf_path.at(nprime);
    qs.leaf_path.erase(nprime);
    const Node np = tree->at(nprime).node;

    ClassifyContext ctx{qs.chars, inst.fsqrt, inst.csqrt};
    std::vector<int> eq, act, dep_low, dep_up;  // dep = recursive or problematic
    std::map<int, Classification> cls;
    for (bool lower : {true, false})
      for (int cid : lower ? sc.lowers : sc.uppers) {
        Classification c = classify_child(tree->at(cid).node, ctx);
        cls[cid] = c;
        if (c == Classification::QMember)
          eq.push_back(cid);
        else if (c == Classification::Active)
          act.push_back(cid);
        else
          (lower ? dep_low : dep_up).push_back(cid);
      }
    if (!qs.tree_mode && eq.size() > 1)
      alarm("path-mode Q member " + std::to_string(nprime) +
            " split into several equal-characteristics children");
    for (int cid : act) register_active(inst, cid, /*as_root=*/false);

    const Node& nnode = tree->at(qs.active_node).node;
    auto feed = [&](bool a_side, const std::vector<int>& nodes_to_feed, int path_id) {
      GrowerSide* g = get_side(a_side ? qs.a_paths : qs.b_paths, path_id, a_side);
      const char* tag = a_side ? "qa" : "qb";
      for (int cid : nodes_to_feed)
        for (EdgeKey e : node_edges(tree->at(cid).node)) {
          int chain = feed_edge(g, qs.merged, a_side ? 0 : 1, e);
          EdgeKey wit = find_witness_edge(poset(), nnode, e);
          int ref = arena->child(base_ref(inst, qs.active_node, wit),
                                 tag + std::to_string(chain));
          colors->set_edge_bundle(e, {ref});
        }
    };

    if (eq.size() == 1) {
      const int mprime = eq[0];
      const bool ext_lower = tree->at(mprime).lower_layered;
      if (ext_lower) {
        if (!dep_low.empty())
          alarm("lower-layered siblings next to a lower-layered Q extension");
        feed(/*a_side=*/true, dep_up, pid);
        feed(/*a_side=*/true, dep_low, pid);  // defensive: keeps edges covered
      } else {
        if (!dep_up.empty())
          alarm("upper-layered siblings next to an upper-layered Q extension");
        feed(/*a_side=*/false, dep_low, pid);
        feed(/*a_side=*/false, dep_up, pid);
      }
      // Spine projection of the two additional colors onto the extension.
      const Node& mn = tree->at(mprime).node;
      auto targets = node_edges(mn);
      auto srcmap = ext_lower
                        ? project_colors(poset(), np, np.bip.xs, mn.bip.ys, targets)
                        : project_colors(poset(), np, mn.bip.xs, np.bip.ys, targets);
      auto& new_addl = qs.leaf_addl[mprime];
      for (EdgeKey t : targets) {
        const auto& refs = addl.at(srcmap.at(t));
        colors->set_edge_bundle(t, {refs[0], refs[1]});
        new_addl[t] = refs;
      }
      qs.leaf_path[mprime] = pid;
      mark_dependent(inst, mprime, Classification::QMember, qs.active_node);
    } else if (eq.size() == 2) {
      if (!qs.tree_mode) alarm("double Q extension outside tree mode");
      int low_eq = tree->at(eq[0]).lower_layered ? eq[0] : eq[1];
      int up_eq = eq[0] == low_eq ? eq[1] : eq[0];
      if (low_eq == up_eq || !tree->at(low_eq).node.complete ||
          !tree->at(up_eq).node.complete)
        alarm("double Q extension children are not a complete pair");
      if (!dep_low.empty() || !dep_up.empty() || !act.empty())
        alarm("double Q extension with sibling children");
      ShuffleResult sr = shuffle_colors(np, sc.mid);
      auto apply = [&](int child, const std::map<EdgeKey, EdgeKey>& m) {
        auto& new_addl = qs.leaf_addl[child];
        for (EdgeKey t : node_edges(tree->at(child).node)) {
          const auto& refs = addl.at(m.at(t));
          colors->set_edge_bundle(t, {refs[0], refs[1]});
          new_addl[t] = refs;
        }
      };
      apply(low_eq, sr.lower);
      apply(up_eq, sr.upper);
      // The upper continuation keeps the A side; the lower one takes B.
      qs.leaf_path[up_eq] = pid;
      const int npid = qs.next_path++;
      qs.leaf_path[low_eq] = npid;
      auto bit = qs.b_paths.find(pid);
      if (bit != qs.b_paths.end()) {
        qs.b_paths[npid] = std::move(bit->second);
        qs.b_paths.erase(pid);
      }
      mark_dependent(inst, low_eq, Classification::QMember, qs.active_node);
      mark_dependent(inst, up_eq, Classification::QMember, qs.active_node);
    } else {
      // Terminal split: project the two additional colors onto the dependents.
      auto project_side = [&](const std::vector<int>& kids, bool upper_side) {
        if (kids.empty()) return;
        std::vector<EdgeKey> targets;
        for (int cid : kids)
          for (EdgeKey e : node_edges(tree->at(cid).node)) targets.push_back(e);
        auto srcmap = upper_side
                          ? project_colors(poset(), np, sc.mid, np.bip.ys, targets)
                          : project_colors(poset(), np, np.bip.xs, sc.mid, targets);
        for (EdgeKey t : targets)
          colors->set_edge_bundle(t, {addl.at(srcmap.at(t))[upper_side ? 0 : 1]});
      };
      project_side(dep_up, /*upper_side=*/true);
      project_side(dep_low, /*upper_side=*/false);
    }

    // Dependent bookkeeping: problematic states and recursive instances.
    for (const auto& kids : {dep_low, dep_up})
      for (int cid : kids) {
        if (cls[cid] == Classification::Problematic) {
          make_pstate(inst, cid, qs.active_node);
        } else {
          mark_dependent(inst, cid, Classification::Recursive, qs.active_node);
          spawn_recursive(inst, cid);
        }
      }
  }

  void mark_dependent(Instance& inst, int cid, Classification c, int owner) {
    NodeTreeEntry& e = tree->at(cid);
    e.cls = c;
    e.owner = owner;
    e.instance = inst.id;
    node_instance[cid] = inst.id;
  }

  void p_split(Instance& inst, ProblematicState& ps, int nprime, const SplitChildren& sc) {
    auto mit = ps.member_path.find(nprime);
    if (mit == ps.member_path.end()) {
      alarm("problematic node " + std::to_string(nprime) + " is not on a path");
      return;
    }
    PPath& path = ps.paths.at(mit->second);
    if (path.last != nprime) {
      alarm("problematic split off the end of its path");
      return;
    }
    const auto addl = std::move(path.addl);
    path.addl.clear();
    const Node np = tree->at(nprime).node;
    const int owner = tree->at(ps.m_node).owner;

    ClassifyContext ctx{path.chars, inst.fsqrt, inst.csqrt};
    std::vector<int> eq, rec_low, rec_up, firsts;
    std::map<int, Classification> cls;
    for (bool lower : {true, false})
      for (int cid : lower ? sc.lowers : sc.uppers) {
        Classification c = classify_child(tree->at(cid).node, ctx);
        if (c == Classification::Active) {
          alarm("Dilworth clique appeared inside a problematic subtree");
          c = Classification::Problematic;
        }
        cls[cid] = c;
        if (c == Classification::QMember)
          eq.push_back(cid);
        else if (c == Classification::Recursive)
          (lower ? rec_low : rec_up).push_back(cid);
        else
          firsts.push_back(cid);
      }
    if (eq.size() > 1) alarm("problematic path split into two equal children");

    const Node& kn = tree->at(path.k_node).node;
    auto feed = [&](bool a_side, const std::vector<int>& kids) {
      if (kids.empty()) return;
      auto& gptr = a_side ? path.a_down : path.b_up;
      if (!gptr) gptr = make_grower(a_side);
      const char* tag = a_side ? "pa" : "pb";
      for (int cid : kids)
        for (EdgeKey e : node_edges(tree->at(cid).node)) {
          int chain = feed_edge(gptr.get(), path.merged, a_side ? 0 : 1, e);
          EdgeKey wit = find_witness_edge(poset(), kn, e);
          int ref = arena->child(path.k_base.at(wit), tag + std::to_string(chain));
          colors->set_edge_bundle(e, {ref});
        }
    };

    if (eq.size() >= 1) {
      const int mprime = eq[0];
      const bool ext_lower = tree->at(mprime).lower_layered;
      if (ext_lower) {
        if (!rec_low.empty()) alarm("lower recursive siblings next to a lower extension");
        feed(true, rec_up);
        feed(true, rec_low);
      } else {
        if (!rec_up.empty()) alarm("upper recursive siblings next to an upper extension");
        feed(false, rec_low);
        feed(false, rec_up);
      }
      const Node& mn = tree->at(mprime).node;
      auto targets = node_edges(mn);
      auto srcmap = ext_lower
                        ? project_colors(poset(), np, np.bip.xs, mn.bip.ys, targets)
                        : project_colors(poset(), np, mn.bip.xs, np.bip.ys, targets);
      for (EdgeKey t : targets) {
        const auto& refs = addl.at(srcmap.at(t));
        colors->set_edge_bundle(t, {refs[0], refs[1]});
        path.addl[t] = refs;
      }
      path.last = mprime;
      ps.member_path[mprime] = path.k_node;
      mark_dependent(inst, mprime, Classification::Problematic, owner);
      inst.problematic_of[mprime] = ps.m_node;
    } else {
      auto project_side = [&](const std::vector<int>& kids, bool upper_side) {
        if (kids.empty()) return;
        std::vector<EdgeKey> targets;
        for (int cid : kids)
          for (EdgeKey e : node_edges(tree->at(cid).node)) targets.push_back(e);
        auto srcmap = upper_side
                          ? project_colors(poset(), np, sc.mid, np.bip.ys, targets)
                          : project_colors(poset(), np, np.bip.xs, sc.mid, targets);
        for (EdgeKey t : targets)
          colors->set_edge_bundle(t, {addl.at(srcmap.at(t))[upper_side ? 0 : 1]});
      };
      project_side(rec_up, true);
      project_side(rec_low, false);
    }

    for (int cid : firsts) {
      NodeTreeEntry& ce = tree->at(cid);
      ce.cls = Classification::Problematic;
      ce.owner = owner;
      ce.instance = inst.id;
      node_instance[cid] = inst.id;
      inst.problematic_of[cid] = ps.m_node;
      start_ppath(inst, ps, cid, /*project_from_m=*/true);
    }
    for (const auto& kids : {rec_low, rec_up})
      for (int cid : kids) {
        mark_dependent(inst, cid, Classification::Recursive, owner);
        spawn_recursive(inst, cid);
      }
  }
};

// ---------------------------------------------------------------------------------

MainPartitioner::MainPartitioner(MainOptions opts)
    : impl_(std::make_unique<Impl>()), colors_(&arena_), opts_(std::move(opts)) {
  impl_->pres = &pres_;
  impl_->tree = &tree_;
  impl_->arena = &arena_;
  impl_->colors = &colors_;
  impl_->opts = &opts_;
  impl_->alarms = &alarms_;
}

MainPartitioner::~MainPartitioner() = default;

std::vector<std::pair<int, std::string>> MainPartitioner::handle(const Event& e) {
  auto ap = pres_.apply(e);
  std::vector<std::pair<int, std::string>> out;
  Impl& im = *impl_;

  if (std::holds_alternative<InitEvent>(e)) {
    Node root = make_node(ap.down_bip);
    int rid = tree_.add_root(root, 1, 2);
    auto inst = std::make_unique<Impl::Instance>();
    inst->id = 0;
    inst->w = pres_.width();
    inst->fsqrt = isqrt_int(inst->w);
    inst->csqrt = inst->fsqrt * inst->fsqrt == inst->w ? inst->fsqrt : inst->fsqrt + 1;
    inst->root_node = rid;
    Impl::Instance* raw = inst.get();
    im.instances.push_back(std::move(inst));
    for (EdgeKey ek : node_edges(root)) {
      int ref = arena_.root("e" + std::to_string(ek.a) + "." + std::to_string(ek.b));
      raw->root_ref[ek] = ref;
      colors_.set_edge_bundle(ek, {ref});
    }
    NodeTreeEntry& entry = tree_.at(rid);
    entry.owner = rid;
    entry.instance = 0;
    if (raw->w == 1) {
      // A width-1 presentation is one chain; keep the single bundle forever.
      raw->chain_mode = true;
      entry.cls = Classification::Recursive;
      im.node_instance[rid] = 0;
    } else {
      entry.cls = Classification::Active;
      im.register_active(*raw, rid, /*as_root=*/true);
    }
    im.live[{1, 2}] = {rid};
    std::vector<int> verts = pres_.level_members(1);
    for (int v : pres_.level_members(2)) verts.push_back(v);
    std::sort(verts.begin(), verts.end());
    for (int v : verts) {
      std::vector<EdgeKey> inc;
      for (EdgeKey ek : node_edges(root))
        if (ek.a == v || ek.b == v) inc.push_back(ek);
      int c = colors_.assign_vertex_color(v, inc);
      out.emplace_back(v, arena_.path(c));
    }
  } else {
    const auto gap = std::make_pair(ap.below, ap.above);
    auto lit = im.live.find(gap);
    if (lit == im.live.end()) throw std::logic_error("no live nodes in the split gap");
    std::vector<int> to_split = lit->second;
    im.live.erase(lit);
    std::sort(to_split.begin(), to_split.end());

    std::map<int, int> xowner, yowner;
    for (int nid : to_split) {
      for (int x : tree_.at(nid).node.bip.xs) xowner[x] = nid;
      for (int y : tree_.at(nid).node.bip.ys) yowner[y] = nid;
    }
    std::map<int, Impl::SplitChildren> kids;
    std::vector<int> lower_live, upper_live;
    for (Node& c : components(ap.down_bip)) {
      auto oit = xowner.find(c.bip.xs[0]);
      if (oit == xowner.end()) throw std::logic_error("component with unknown parent");
      for (int x : c.bip.xs)
        if (xowner.at(x) != oit->second)
          alarms_.push_back("lower component spans two parent nodes");
      for (int z : c.bip.ys) {
        auto& mid = kids[oit->second].mid;
        if (std::find(mid.begin(), mid.end(), z) == mid.end()) mid.push_back(z);
      }
      int id = tree_.attach(oit->second, std::move(c), ap.below, ap.level_id,
                            /*lower=*/true, pres_.poset(), &alarms_);
      kids[oit->second].lowers.push_back(id);
      lower_live.push_back(id);
    }
    for (Node& c : components(ap.up_bip)) {
      auto oit = yowner.find(c.bip.ys[0]);
      if (oit == yowner.end()) throw std::logic_error("component with unknown parent");
      for (int y : c.bip.ys)
        if (yowner.at(y) != oit->second)
          alarms_.push_back("upper component spans two parent nodes");
      int id = tree_.attach(oit->second, std::move(c), ap.level_id, ap.above,
                            /*lower=*/false, pres_.poset(), &alarms_);
      kids[oit->second].uppers.push_back(id);
      upper_live.push_back(id);
    }
    im.live[{ap.below, ap.level_id}] = lower_live;
    im.live[{ap.level_id, ap.above}] = upper_live;

    for (int nid : to_split) {
      auto& sc = kids[nid];
      std::sort(sc.lowers.begin(), sc.lowers.end());
      std::sort(sc.uppers.begin(), sc.uppers.end());
      std::sort(sc.mid.begin(), sc.mid.end());
      im.dispatch_split(nid, sc);
    }

    for (int v : ap.members) {
      std::vector<EdgeKey> inc;
      for (int i = 0; i < ap.down_bip.nx(); ++i)
        for (int j = 0; j < ap.down_bip.ny(); ++j)
          if (ap.down_bip.has_edge(i, j) && ap.down_bip.ys[j] == v)
            inc.push_back({ap.down_bip.xs[i], v});
      for (int i = 0; i < ap.up_bip.nx(); ++i)
        for (int j = 0; j < ap.up_bip.ny(); ++j)
          if (ap.up_bip.has_edge(i, j) && ap.up_bip.xs[i] == v)
            inc.push_back({v, ap.up_bip.ys[j]});
      int c = colors_.assign_vertex_color(v, inc);
      out.emplace_back(v, arena_.path(c));
    }
  }

  if (opts_.check_star_each_round) {
    if (auto bad = colors_.check_property_star(pres_.poset()))
      alarms_.push_back("property (*) violated by color " + arena_.path(bad->color) +
                        " on elements " + std::to_string(bad->elem_a) + "," +
                        std::to_string(bad->elem_b));
  }
  return out;
}

RunStats MainPartitioner::finalize() {
  Impl& im = *impl_;
  RunStats& s = im.stats;
  s.w = pres_.width();
  s.rounds = pres_.rounds();
  s.elements = pres_.poset().size();
  s.colors_used = colors_.colors_used();
  s.lambda_bound = lambda_chain_bound(std::max(1, s.w)).str();
  s.node_count = tree_.size();
  s.instance_count = static_cast<int>(im.instances.size());

  if (auto bad = colors_.check_property_star(pres_.poset()))
    alarms_.push_back("property (*) violated by color " + arena_.path(bad->color));

  for (auto& instp : im.instances) {
    const long long w3 = static_cast<long long>(instp->w) * instp->w * instp->w;
    for (auto& [key, reg] : instp->registries) {
      for (auto& lc : reg->chains) {
        if (!lc) continue;
        s.max_registry_chain_edges =
            std::max(s.max_registry_chain_edges, static_cast<int>(lc->edges.size()));
        int wd = edge_poset_width(pres_.poset(), lc->edges);
        s.max_edge_poset_width_seen = std::max(s.max_edge_poset_width_seen, wd);
        if (wd > w3)
          alarms_.push_back("edge poset of a registry chain has width " +
                            std::to_string(wd) + " > w^3");
      }
    }
  }
  // Ownership partition: every node classified and owned exactly once.
  for (int i = 0; i < tree_.size(); ++i) {
    const auto& e = tree_.at(i);
    if (e.cls == Classification::Unset || e.owner < 0)
      alarms_.push_back("node " + std::to_string(i) + " was never claimed by an owner");
  }
  if (opts_.strict_accounting && s.w >= 1) {
    if (BigInt(s.colors_used) > lambda_chain_bound(s.w))
      alarms_.push_back("strict accounting: colors exceed w^2*lambda(w)");
  }
  s.invariant_alarms = alarms_;
  im.finalized = true;
  return s;
}

std::vector<int> MainPartitioner::registry_nodes(int width, int surplus) const {
  const auto& inst = *impl_->instances.at(0);
  auto it = inst.registries.find({width, surplus});
  if (it == inst.registries.end()) return {};
  return it->second->nodes;
}

std::vector<std::pair<int, std::vector<EdgeKey>>> MainPartitioner::registry_chain_edges()
    const {
  std::vector<std::pair<int, std::vector<EdgeKey>>> out;
  for (const auto& instp : impl_->instances)
    for (const auto& [key, reg] : instp->registries)
      for (const auto& lc : reg->chains)
        if (lc && !lc->edges.empty()) out.emplace_back(instp->w, lc->edges);
  return out;
}

bool MainPartitioner::registry_less(int width, int surplus, int node_a, int node_b) const {
  const auto& inst = *impl_->instances.at(0);
  const auto& reg = *inst.registries.at({width, surplus});
  auto pos = [&](int n) {
    return static_cast<int>(std::find(reg.nodes.begin(), reg.nodes.end(), n) -
                            reg.nodes.begin());
  };
  return reg.rel[pos(node_a)][pos(node_b)] != 0;
}

}  // namespace chainpart
