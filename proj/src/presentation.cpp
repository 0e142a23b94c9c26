#include "chainpart/presentation.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace chainpart {

using nlohmann::json;

Event parse_event_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad json: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "init") {
      InitEvent ev;
      ev.w = j.at("w").get<int>();
      ev.a1 = j.at("a1").get<std::vector<int>>();
      ev.a2 = j.at("a2").get<std::vector<int>>();
      if (j.contains("edges"))
        ev.edges = j.at("edges").get<std::vector<std::pair<int, int>>>();
      return ev;
    }
    if (type == "insert") {
      InsertEvent ev;
      ev.below = j.at("below").get<int>();
      ev.above = j.at("above").get<int>();
      ev.members = j.at("members").get<std::vector<int>>();
      ev.down = j.at("down").get<std::vector<std::pair<int, int>>>();
      ev.up = j.at("up").get<std::vector<std::pair<int, int>>>();
      return ev;
    }
    throw ParseError("unknown event type: " + type);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad event fields: ") + e.what());
  }
}

std::string event_to_json(const Event& e) {
  json j;
  if (const auto* init = std::get_if<InitEvent>(&e)) {
    j["type"] = "init";
    j["w"] = init->w;
    j["a1"] = init->a1;
    j["a2"] = init->a2;
    if (init->edges) j["edges"] = *init->edges;
  } else {
    const auto& ins = std::get<InsertEvent>(e);
    j["type"] = "insert";
    j["below"] = ins.below;
    j["above"] = ins.above;
    j["members"] = ins.members;
    j["down"] = ins.down;
    j["up"] = ins.up;
  }
  return j.dump();
}

const std::vector<int>& PresentationState::level_members(int level_id) const {
  auto it = levels_.find(level_id);
  if (it == levels_.end()) throw std::out_of_range("unknown antichain id");
  return it->second;
}

BipartitePoset PresentationState::gap_bipartite(int below_id, int above_id) const {
  const auto& lo = level_members(below_id);
  const auto& hi = level_members(above_id);
  BipartitePoset b;
  b.xs = lo;
  b.ys = hi;
  std::sort(b.xs.begin(), b.xs.end());
  std::sort(b.ys.begin(), b.ys.end());
  for (int x : b.xs) {
    std::uint32_t m = 0;
    for (int j = 0; j < b.ny(); ++j)
      if (poset_.less(x, b.ys[j])) m |= 1u << j;
    b.adj.push_back(m);
  }
  return b;
}

namespace {

void add_violation(ValidationResult& r, int cond, std::string detail) {
  r.ok = false;
  r.violations.push_back({cond, std::move(detail)});
}

BipartitePoset build_bip(const std::vector<int>& xs, const std::vector<int>& ys,
                         const std::vector<std::pair<int, int>>& edges) {
  BipartitePoset b;
  b.xs = xs;
  b.ys = ys;
  std::sort(b.xs.begin(), b.xs.end());
  std::sort(b.ys.begin(), b.ys.end());
  b.adj.assign(b.xs.size(), 0);
  for (auto [a, c] : edges) {
    auto xi = std::lower_bound(b.xs.begin(), b.xs.end(), a);
    auto yj = std::lower_bound(b.ys.begin(), b.ys.end(), c);
    if (xi == b.xs.end() || *xi != a || yj == b.ys.end() || *yj != c)
      throw std::invalid_argument("edge endpoint outside its antichain");
    b.adj[xi - b.xs.begin()] |= 1u << (yj - b.ys.begin());
  }
  return b;
}

}  // namespace

ValidationResult PresentationState::validate(const Event& e) const {
  ValidationResult r;
  if (const auto* init = std::get_if<InitEvent>(&e)) {
    if (initialized()) {
      add_violation(r, 2, "duplicate init");
      return r;
    }
    if (init->w < 1) {
      add_violation(r, 1, "width must be positive");
      return r;
    }
    std::vector<int> want1(init->w), want2(init->w);
    for (int i = 0; i < init->w; ++i) {
      want1[i] = i;
      want2[i] = init->w + i;
    }
    if (init->a1 != want1 || init->a2 != want2)
      add_violation(r, 1, "init antichains must use dense fresh ids");
    if (init->edges) {
      std::set<std::pair<int, int>> have(init->edges->begin(), init->edges->end());
      for (int a : init->a1)
        for (int b : init->a2)
          if (!have.count({a, b}))
            add_violation(r, 3, "missing A1xA2 pair (" + std::to_string(a) + "," +
                                    std::to_string(b) + ")");
    }
    return r;
  }

  const auto& ins = std::get<InsertEvent>(e);
  if (!initialized()) {
    add_violation(r, 2, "insert before init");
    return r;
  }
  auto pos_below = std::find(order_.begin(), order_.end(), ins.below);
  auto pos_above = std::find(order_.begin(), order_.end(), ins.above);
  if (pos_below == order_.end() || pos_above == order_.end() ||
      pos_below + 1 != pos_above) {
    add_violation(r, 2, "antichains are not consecutive in the linear order");
    return r;
  }
  if (static_cast<int>(ins.members.size()) != w_) {
    add_violation(r, 1, "new antichain must have exactly w elements");
    return r;
  }
  for (std::size_t i = 0; i < ins.members.size(); ++i)
    if (ins.members[i] != poset_.size() + static_cast<int>(i))
      throw std::invalid_argument("members must be fresh dense ids");

  BipartitePoset down, up;
  try {
    down = build_bip(level_members(ins.below), ins.members, ins.down);
    up = build_bip(ins.members, level_members(ins.above), ins.up);
  } catch (const std::invalid_argument& ex) {
    throw;  // malformed input, not a condition violation
  }
  if (!is_regular(down))
    add_violation(r, 4, "lower bipartite poset is not regular");
  if (!is_regular(up))
    add_violation(r, 4, "upper bipartite poset is not regular");
  // Legality: every composed pair must already be a relation, otherwise the
  // insertion would change the order between existing antichains.
  const auto& lo = level_members(ins.below);
  (void)lo;
  for (auto [a, x] : ins.down)
    for (auto [x2, b] : ins.up)
      if (x == x2 && !poset_.less(a, b))
        add_violation(r, 4, "composition (" + std::to_string(a) + "<" +
                              std::to_string(x) + "<" + std::to_string(b) +
                              ") is not an existing relation");
  return r;
}

PresentationState::Applied PresentationState::apply(const Event& e) {
  ValidationResult v = validate(e);
  if (!v.ok) {
    std::ostringstream os;
    os << "invalid event:";
    for (const auto& viol : v.violations)
      os << " [condition " << viol.condition << "] " << viol.detail << ";";
    throw std::invalid_argument(os.str());
  }
  Applied out;
  if (const auto* init = std::get_if<InitEvent>(&e)) {
    w_ = init->w;
    for (int i = 0; i < w_; ++i) poset_.add_element({}, {}, 1);
    for (int i = 0; i < w_; ++i) poset_.add_element(init->a1, {}, 2);
    levels_[1] = init->a1;
    levels_[2] = init->a2;
    order_ = {1, 2};
    rounds_ = 2;
    out.level_id = 2;
    out.below = 1;
    out.above = 2;
    out.members = init->a2;
    out.down_bip = gap_bipartite(1, 2);
    return out;
  }
  const auto& ins = std::get<InsertEvent>(e);
  std::map<int, std::vector<int>> below_of, above_of;
  for (auto [a, x] : ins.down) below_of[x].push_back(a);
  for (auto [x, b] : ins.up) above_of[x].push_back(b);
  const int level_id = static_cast<int>(order_.size()) + 1;
  for (int x : ins.members) poset_.add_element(below_of[x], above_of[x], level_id);
  levels_[level_id] = ins.members;
  auto pos = std::find(order_.begin(), order_.end(), ins.above);
  order_.insert(pos, level_id);
  ++rounds_;
  out.level_id = level_id;
  out.below = ins.below;
  out.above = ins.above;
  out.members = ins.members;
  out.down_bip = gap_bipartite(ins.below, level_id);
  out.up_bip = gap_bipartite(level_id, ins.above);
  return out;
}

}  // namespace chainpart
