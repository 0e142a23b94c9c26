#include "chainpart/harness.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chainpart {

using nlohmann::json;

namespace {

std::vector<int> random_perm(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Union of k random permutation wirings between two sides of size w.
// Every edge of such a union lies on a perfect matching, so the side
// relation is always regular; only the composition can be illegal.
std::vector<std::pair<int, int>> perm_union(const std::vector<int>& from,
                                            const std::vector<int>& to, int k,
                                            std::mt19937_64& rng) {
  const int w = static_cast<int>(from.size());
  std::set<std::pair<int, int>> out;
  for (int t = 0; t < k; ++t) {
    auto p = random_perm(w, rng);
    for (int i = 0; i < w; ++i) out.insert({from[i], to[p[i]]});
  }
  return {out.begin(), out.end()};
}

}  // namespace

std::vector<Event> generate_regular_presentation(const GeneratorConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const int w = cfg.w;
  std::vector<Event> events;
  InitEvent init;
  init.w = w;
  for (int i = 0; i < w; ++i) {
    init.a1.push_back(i);
    init.a2.push_back(w + i);
  }
  events.emplace_back(init);
  PresentationState ps;
  ps.apply(events.back());

  for (int r = 0; r < cfg.rounds; ++r) {
    const auto& order = ps.level_order();
    const int g = static_cast<int>(rng() % (order.size() - 1));
    const int below = order[g], above = order[g + 1];
    std::vector<int> lo = ps.level_members(below);
    std::vector<int> hi = ps.level_members(above);
    std::sort(lo.begin(), lo.end());
    std::sort(hi.begin(), hi.end());
    std::vector<int> mid(w);
    std::iota(mid.begin(), mid.end(), ps.poset().size());

    InsertEvent ev;
    ev.below = below;
    ev.above = above;
    ev.members = mid;

    bool done = false;
    for (int t = 0; t < cfg.reject_tries && !done; ++t) {
      auto down = perm_union(lo, mid, 1 + static_cast<int>(rng() % w), rng);
      auto up = perm_union(mid, hi, 1 + static_cast<int>(rng() % w), rng);
      bool legal = true;
      for (auto [a, z] : down) {
        for (auto [z2, b] : up)
          if (z == z2 && !ps.poset().less(a, b)) {
            legal = false;
            break;
          }
        if (!legal) break;
      }
      if (legal) {
        ev.down = down;
        ev.up = up;
        done = true;
      }
    }
    if (!done) {
      // Factor the gap relation through a random permutation.
      auto p = random_perm(w, rng);
      ev.down.clear();
      ev.up.clear();
      if (rng() & 1) {
        for (int i = 0; i < w; ++i) ev.down.push_back({lo[i], mid[p[i]]});
        for (int i = 0; i < w; ++i)
          for (int b : hi)
            if (ps.poset().less(lo[i], b)) ev.up.push_back({mid[p[i]], b});
      } else {
        for (int j = 0; j < w; ++j) ev.up.push_back({mid[j], hi[p[j]]});
        for (int j = 0; j < w; ++j)
          for (int a : lo)
            if (ps.poset().less(a, hi[p[j]])) ev.down.push_back({a, mid[j]});
      }
      std::sort(ev.down.begin(), ev.down.end());
      std::sort(ev.up.begin(), ev.up.end());
    }
    events.emplace_back(ev);
    ps.apply(events.back());
  }
  return events;
}

std::vector<std::vector<int>> exact_chain_cover(const PresentationState& ps) {
  std::map<int, int> next;
  const auto& order = ps.level_order();
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    BipartitePoset gap = ps.gap_bipartite(order[i], order[i + 1]);
    for (const Node& c : components(gap)) {
      auto pm = perfect_matching(c.bip);
      if (!pm) throw std::logic_error("component without a perfect matching");
      for (int x = 0; x < c.bip.nx(); ++x)
        next[c.bip.xs[x]] = c.bip.ys[(*pm)[x]];
    }
  }
  std::vector<std::vector<int>> chains;
  for (int start : ps.level_members(order[0])) {
    std::vector<int> chain{start};
    auto it = next.find(start);
    while (it != next.end()) {
      chain.push_back(it->second);
      it = next.find(it->second);
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::vector<std::pair<int, std::string>> FirstFitVertexAlgo::operator()(const Event& e) {
  auto ap = pres_.apply(e);
  std::vector<int> fresh = ap.members;
  if (std::holds_alternative<InitEvent>(e)) {
    fresh = pres_.level_members(1);
    for (int v : pres_.level_members(2)) fresh.push_back(v);
    std::sort(fresh.begin(), fresh.end());
  }
  std::vector<std::pair<int, std::string>> out;
  for (int v : fresh) {
    std::size_t c = 0;
    for (; c < chains_.size(); ++c) {
      bool all = true;
      for (int u : chains_[c])
        if (!pres_.poset().comparable(u, v)) {
          all = false;
          break;
        }
      if (all) break;
    }
    if (c == chains_.size()) chains_.emplace_back();
    chains_[c].push_back(v);
    out.emplace_back(v, "ff" + std::to_string(c));
  }
  return out;
}

OnlineAlgo wrap_main_partitioner(MainPartitioner& mp) {
  return [&mp](const Event& e) { return mp.handle(e); };
}

AdversaryResult adversary_width2(const OnlineAlgo& algo) {
  AdversaryResult res;
  InitEvent init;
  init.w = 2;
  init.a1 = {0, 1};
  init.a2 = {2, 3};
  res.events.emplace_back(init);
  PresentationState ps;
  ps.apply(res.events.back());
  for (auto& [v, c] : algo(res.events.back())) res.colors[v] = c;

  std::set<std::string> distinct;
  for (auto& [v, c] : res.colors) distinct.insert(c);
  if (res.colors.size() == 4 && distinct.size() == 2) {
    // A two-color answer pairs each bottom with one top; cross the pairing.
    const int t0 = res.colors.at(2) == res.colors.at(0) ? 2 : 3;
    const int t1 = t0 == 2 ? 3 : 2;
    InsertEvent ev;
    ev.below = 1;
    ev.above = 2;
    ev.members = {4, 5};
    ev.down = {{0, 4}, {1, 5}};
    ev.up = {{4, t1}, {5, t0}};
    std::sort(ev.up.begin(), ev.up.end());
    res.events.emplace_back(ev);
    ps.apply(res.events.back());
    for (auto& [v, c] : algo(res.events.back())) res.colors[v] = c;
  }

  // Validity check: every color class must be a chain of the final order.
  std::map<std::string, std::vector<int>> classes;
  for (auto& [v, c] : res.colors) classes[c].push_back(v);
  for (auto& [c, vs] : classes)
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        if (!ps.poset().comparable(vs[i], vs[j])) {
          res.valid = false;
          res.error = "color " + c + " holds incomparable elements " +
                      std::to_string(vs[i]) + "," + std::to_string(vs[j]);
        }
  for (int v = 0; v < ps.poset().size(); ++v)
    if (!res.colors.count(v)) {
      res.valid = false;
      res.error = "element " + std::to_string(v) + " was never colored";
    }
  res.distinct_colors = static_cast<int>(classes.size());
  return res;
}

std::string stats_to_json(const RunStats& s) {
  json j;
  j["type"] = "stats";
  j["w"] = s.w;
  j["rounds"] = s.rounds;
  j["elements"] = s.elements;
  j["colors_used"] = s.colors_used;
  j["lambda_bound"] = s.lambda_bound;
  j["max_edge_poset_width_seen"] = s.max_edge_poset_width_seen;
  j["recursion_depth"] = s.recursion_depth;
  j["max_registry_width"] = s.max_registry_width;
  j["max_registry_chain_edges"] = s.max_registry_chain_edges;
  j["max_l_edge_chains"] = s.max_l_edge_chains;
  j["max_grower_chains"] = s.max_grower_chains;
  j["first_problematic_total"] = s.first_problematic_total;
  j["active_nodes"] = s.active_nodes;
  j["node_count"] = s.node_count;
  j["instance_count"] = s.instance_count;
  j["invariant_alarms"] = s.invariant_alarms;
  return j.dump();
}

RunResult run_stream(const std::vector<Event>& events, const MainOptions& opts) {
  RunResult res;
  MainPartitioner mp(opts);
  for (const Event& e : events) {
    res.lines.push_back(event_to_json(e));
    auto asg = mp.handle(e);
    std::sort(asg.begin(), asg.end());
    json line;
    line["type"] = "colors";
    line["round"] = mp.presentation().rounds();
    auto& arr = line["assign"] = json::array();
    for (auto& [v, c] : asg) arr.push_back(json::array({v, c}));
    res.lines.push_back(line.dump());
  }
  res.stats = mp.finalize();
  res.lines.push_back(stats_to_json(res.stats));
  return res;
}

VerifyResult verify_transcript(std::istream& in) {
  VerifyResult res;
  PresentationState ps;
  std::map<int, std::string> colors;
  std::set<int> pending;
  bool saw_stats = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      res.parse_error = true;
      res.ok = false;
      res.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
      return res;
    }
    const std::string type = j.value("type", "");
    try {
      if (type == "init" || type == "insert") {
        if (!pending.empty()) {
          res.ok = false;
          res.errors.push_back("line " + std::to_string(lineno) +
                               ": previous round left uncolored elements");
        }
        auto ap = ps.apply(parse_event_json(line));
        for (int v : ap.members) pending.insert(v);
        if (type == "init")
          for (int v : ps.level_members(1)) pending.insert(v);
      } else if (type == "colors") {
        for (const auto& pr : j.at("assign")) {
          const int v = pr.at(0).get<int>();
          const std::string c = pr.at(1).get<std::string>();
          if (!pending.erase(v)) {
            res.ok = false;
            res.errors.push_back("line " + std::to_string(lineno) + ": element " +
                                 std::to_string(v) + " colored out of turn");
          }
          colors[v] = c;
        }
      } else if (type == "stats") {
        saw_stats = true;
      } else {
        res.parse_error = true;
        res.ok = false;
        res.errors.push_back("line " + std::to_string(lineno) + ": unknown type");
        return res;
      }
    } catch (const std::exception& e) {
      res.parse_error = true;
      res.ok = false;
      res.errors.push_back("line " + std::to_string(lineno) + ": " + e.what());
      return res;
    }
  }
  if (!pending.empty()) {
    res.ok = false;
    res.errors.push_back("stream ended with uncolored elements");
  }
  if (!saw_stats) res.errors.push_back("note: no stats line present");
  res.w = ps.width();
  res.elements = ps.poset().size();
  for (int v = 0; v < ps.poset().size(); ++v)
    if (!colors.count(v)) {
      res.ok = false;
      res.errors.push_back("element " + std::to_string(v) + " was never colored");
    }
  std::map<std::string, std::vector<int>> classes;
  for (auto& [v, c] : colors) classes[c].push_back(v);
  res.colors = static_cast<int>(classes.size());
  for (auto& [c, vs] : classes)
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t k = i + 1; k < vs.size(); ++k)
        if (!ps.poset().comparable(vs[i], vs[k])) {
          res.ok = false;
          res.errors.push_back("color " + c + " holds incomparable elements " +
                               std::to_string(vs[i]) + "," + std::to_string(vs[k]));
        }
  return res;
}

}  // namespace chainpart
