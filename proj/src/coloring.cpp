#include "chainpart/coloring.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace chainpart {

int ColorArena::root(const std::string& label) { return child(-1, label); }

int ColorArena::child(int parent, const std::string& label) {
  auto key = std::make_pair(parent, label);
  auto it = intern_.find(key);
  if (it != intern_.end()) return it->second;
  Entry e;
  e.parent = parent;
  e.label = label;
  entries_.push_back(std::move(e));
  int id = static_cast<int>(entries_.size()) - 1;
  intern_.emplace(std::move(key), id);
  return id;
}

const std::string& ColorArena::path(int id) const {
  const Entry& e = entries_[id];
  if (e.path_cache.empty()) {
    if (e.parent < 0)
      e.path_cache = e.label;
    else
      e.path_cache = path(e.parent) + "/" + e.label;
  }
  return e.path_cache;
}

bool ColorArena::contains(int anc, int id) const {
  for (int cur = id; cur >= 0; cur = entries_[cur].parent)
    if (cur == anc) return true;
  return false;
}

namespace {

BigInt isqrt_floor(const BigInt& v) {
  return boost::multiprecision::sqrt(v);
}

BigInt choose2(const BigInt& m) { return m * (m - 1) / 2; }

}  // namespace

LambdaBudget lambda_budget(int w) {
  if (w < 1) throw std::invalid_argument("width must be positive");
  static std::map<int, LambdaBudget> memo;
  auto it = memo.find(w);
  if (it != memo.end()) return it->second;
  LambdaBudget b;
  b.w = w;
  if (w == 1) {
    b.l1 = b.l2 = b.l3 = 1;
    b.lambda = 1;
  } else {
    const int r = static_cast<int>(isqrt_floor(BigInt(w)));
    const BigInt lam_r = lambda_budget(r).lambda;
    BigInt w15 = 1;
    for (int i = 0; i < 15; ++i) w15 *= w;
    b.l1 = 16 * isqrt_floor(w15) * lam_r;  // floor(w^(15/2))
    BigInt w3 = BigInt(w) * w * w;
    b.l2 = 2 * choose2(w3 + 1) + 2;
    BigInt w4 = BigInt(w) * w * w * w;
    b.l3 = w4 * b.l2 * lam_r;
    b.lambda = b.l1 * b.l2 * b.l3;
  }
  memo[w] = b;
  return b;
}

BigInt lambda_chain_bound(int w) {
  return BigInt(w) * w * lambda_budget(w).lambda;
}

EdgeKey find_witness_edge(const Poset& p, const Node& source, EdgeKey target) {
  const BipartitePoset& b = source.bip;
  for (int i = 0; i < b.nx(); ++i) {
    if (!p.leq(b.xs[i], target.a)) continue;
    for (int j = 0; j < b.ny(); ++j)
      if (b.has_edge(i, j) && p.leq(target.b, b.ys[j])) return {b.xs[i], b.ys[j]};
  }
  throw std::logic_error("no witness edge sandwiches the target");
}

namespace {

// Lexicographically-first perfect matching from `lo` to `hi` under p.less;
// match[i] = index into hi. Identity when lo == hi.
std::vector<int> lex_matching(const Poset& p, const std::vector<int>& lo,
                              const std::vector<int>& hi) {
  if (lo == hi) {
    std::vector<int> id(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) id[i] = static_cast<int>(i);
    return id;
  }
  BipartitePoset b;
  b.xs = lo;
  b.ys = hi;
  for (int x : lo) {
    std::uint32_t m = 0;
    for (std::size_t j = 0; j < hi.size(); ++j)
      if (p.less(x, hi[j])) m |= 1u << j;
    b.adj.push_back(m);
  }
  auto m = perfect_matching(b);
  if (!m) throw std::logic_error("projection matching does not exist");
  return *m;
}

}  // namespace

std::map<EdgeKey, EdgeKey> project_colors(const Poset& p, const Node& source,
                                          const std::vector<int>& ap_prime,
                                          const std::vector<int>& as_prime,
                                          const std::vector<EdgeKey>& targets) {
  const BipartitePoset& b = source.bip;
  if (ap_prime.size() != b.xs.size() || as_prime.size() != b.ys.size())
    throw std::invalid_argument("projection antichains must have the node width");
  std::vector<int> m1 = lex_matching(p, b.xs, ap_prime);   // X -> A'_p
  std::vector<int> m2 = lex_matching(p, as_prime, b.ys);   // A'_s -> Y
  // Partner lookup: element of A'_p -> x, element of A'_s -> y.
  std::map<int, int> x_of, y_of;
  for (std::size_t i = 0; i < m1.size(); ++i) x_of[ap_prime[m1[i]]] = b.xs[i];
  for (std::size_t j = 0; j < as_prime.size(); ++j) y_of[as_prime[j]] = b.ys[m2[j]];
  std::map<EdgeKey, EdgeKey> out;
  for (EdgeKey t : targets) {
    auto xi = x_of.find(t.a);
    auto yj = y_of.find(t.b);
    if (xi == x_of.end() || yj == y_of.end())
      throw std::invalid_argument("projection target outside the antichains");
    EdgeKey src{xi->second, yj->second};
    if (!(p.leq(src.a, t.a) && p.leq(t.b, src.b)))
      throw std::logic_error("projection source does not sandwich the target");
    auto [_, fresh] = out.emplace(t, src);
    if (!fresh) throw std::logic_error("duplicate projection target");
  }
  // Injectivity (each source edge serves at most one target per stage).
  std::set<EdgeKey> used;
  for (const auto& [t, s] : out)
    if (!used.insert(s).second) throw std::logic_error("projection is not injective");
  return out;
}

ShuffleResult shuffle_colors(const Node& source, const std::vector<int>& mid) {
  const BipartitePoset& b = source.bip;
  const int u = b.nx();
  if (!source.complete) throw std::invalid_argument("shuffle requires a complete node");
  if (static_cast<int>(mid.size()) != u)
    throw std::invalid_argument("shuffle middle antichain has wrong size");
  ShuffleResult r;
  for (int i = 0; i < u; ++i)
    for (int j = 0; j < u; ++j) {
      const int k = (i + j) % u;
      EdgeKey src{b.xs[i], b.ys[j]};
      r.lower[{b.xs[i], mid[k]}] = src;
      r.upper[{mid[k], b.ys[j]}] = src;
    }
  return r;
}

void ColoringState::set_edge_bundle(EdgeKey e, std::vector<int> refs) {
  if (refs.empty()) throw std::invalid_argument("empty bundle");
  if (bundles_.count(e)) throw std::logic_error("edge bundle already set");
  for (int r : refs) edges_by_ref_[r].push_back(e);
  bundles_[e] = std::move(refs);
}

void ColoringState::append_edge_refs(EdgeKey e, const std::vector<int>& refs) {
  auto it = bundles_.find(e);
  if (it == bundles_.end()) {
    set_edge_bundle(e, refs);
    return;
  }
  for (int r : refs) {
    if (std::find(it->second.begin(), it->second.end(), r) != it->second.end()) continue;
    it->second.push_back(r);
    edges_by_ref_[r].push_back(e);
  }
}

const std::vector<int>* ColoringState::edge_bundle(EdgeKey e) const {
  auto it = bundles_.find(e);
  return it == bundles_.end() ? nullptr : &it->second;
}

int ColoringState::assign_vertex_color(int x, const std::vector<EdgeKey>& incident) {
  if (vertex_color_.count(x)) throw std::logic_error("vertex already colored");
  int best = -1;
  for (EdgeKey e : incident) {
    const auto* refs = edge_bundle(e);
    if (!refs) continue;
    for (int r : *refs) {
      int c = arena_->child(r, "c");
      if (best < 0 || arena_->path(c) < arena_->path(best)) best = c;
    }
  }
  if (best < 0) throw std::logic_error("vertex has no bundled incident edge");
  vertex_color_[x] = best;
  vertices_by_color_[best].push_back(x);
  return best;
}

std::optional<ColoringState::StarViolation> ColoringState::check_property_star(
    const Poset& p) const {
  for (const auto& [color, verts] : vertices_by_color_) {
    std::vector<int> touched = verts;
    for (int cur = color; cur >= 0; cur = arena_->parent(cur)) {
      auto it = edges_by_ref_.find(cur);
      if (it == edges_by_ref_.end()) continue;
      for (EdgeKey e : it->second) {
        touched.push_back(e.a);
        touched.push_back(e.b);
      }
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (std::size_t i = 0; i < touched.size(); ++i)
      for (std::size_t j = i + 1; j < touched.size(); ++j)
        if (!p.comparable(touched[i], touched[j]))
          return StarViolation{color, touched[i], touched[j]};
  }
  return std::nullopt;
}

}  // namespace chainpart
