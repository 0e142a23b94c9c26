#include "chainpart/poset.hpp"

#include <stdexcept>

namespace chainpart {

namespace {

void check_ids(const Poset& p, const std::vector<int>& ids) {
  for (int x : ids) {
    if (x < 0 || x >= p.size()) throw std::out_of_range("unknown element id");
  }
}

}  // namespace

int Poset::add_element(const std::vector<int>& below, const std::vector<int>& above,
                       int level) {
  check_ids(*this, below);
  check_ids(*this, above);
  const int x = size();
  Bits lo(x + 1), hi(x + 1);
  for (int a : below) {
    lo.set(a);
    Bits t = below_[a];
    t.resize(x + 1);
    lo |= t;
  }
  for (int b : above) {
    hi.set(b);
    Bits t = above_[b];
    t.resize(x + 1);
    hi |= t;
  }
  if (lo.intersects(hi)) throw std::logic_error("element both below and above another");
  // The closure may not create relations between existing elements: everything
  // above x must already be above everything below x.
  for (std::size_t a = lo.find_first(); a != Bits::npos; a = lo.find_next(a)) {
    Bits want = hi;
    want.resize(above_[a].size());
    if (!want.is_subset_of(above_[a]))
      throw std::logic_error("insertion would relate two existing elements");
  }
  for (auto& row : above_) row.resize(x + 1);
  for (auto& row : below_) row.resize(x + 1);
  for (int a = 0; a < x; ++a) {
    if (lo.test(a)) above_[a].set(x);
    if (hi.test(a)) below_[a].set(x);
  }
  above_.push_back(hi);
  below_.push_back(lo);
  level_of_.push_back(level);
  return x;
}

Bits Poset::upset(const std::vector<int>& a) const {
  check_ids(*this, a);
  Bits r(size());
  for (int x : a) {
    r.set(x);
    r |= above_[x];
  }
  return r;
}

Bits Poset::downset(const std::vector<int>& a) const {
  check_ids(*this, a);
  Bits r(size());
  for (int x : a) {
    r.set(x);
    r |= below_[x];
  }
  return r;
}

bool Poset::is_antichain(const std::vector<int>& a) const {
  check_ids(*this, a);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a[i] == a[j] || comparable(a[i], a[j])) return false;
  return true;
}

bool Poset::antichain_below(const std::vector<int>& a, const std::vector<int>& b) const {
  if (!is_antichain(a) || !is_antichain(b)) throw std::invalid_argument("not antichains");
  Bits down = downset(b);
  for (int x : a)
    if (!down.test(x)) return false;
  return true;
}

Poset::WidthResult Poset::width_with_witness() const {
  const int n = size();
  WidthResult res;
  if (n == 0) return res;
  // Fulkerson: min chain cover of the closure = n - max matching in the split
  // bipartite graph (left x adjacent to right y iff x < y).
  std::vector<int> match_r(n, -1), match_l(n, -1);
  Bits visited(n);
  // Kuhn augmentation.
  auto try_augment = [&](auto&& self, int x) -> bool {
    const Bits& adj = above_[x];
    for (std::size_t y = adj.find_first(); y != Bits::npos; y = adj.find_next(y)) {
      if (visited.test(y)) continue;
      visited.set(y);
      if (match_r[y] < 0 || self(self, match_r[y])) {
        match_r[y] = x;
        match_l[x] = static_cast<int>(y);
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int x = 0; x < n; ++x) {
    visited.reset();
    if (try_augment(try_augment, x)) ++matched;
  }
  res.width = n - matched;

  // Chains: follow matched edges from elements that are not a matched right end.
  Bits is_right_end(n);
  for (int y = 0; y < n; ++y)
    if (match_r[y] >= 0) is_right_end.set(y);
  for (int x = 0; x < n; ++x) {
    if (is_right_end.test(x)) continue;
    std::vector<int> chain;
    for (int v = x; v != -1; v = match_l[v]) chain.push_back(v);
    res.chains.push_back(std::move(chain));
  }

  // Koenig: alternating reachability from unmatched left vertices gives a
  // minimum vertex cover; the witness antichain is {x : left(x) in Z, right(x) not in Z}.
  Bits zl(n), zr(n);
  std::vector<int> queue;
  for (int x = 0; x < n; ++x)
    if (match_l[x] < 0) {
      zl.set(x);
      queue.push_back(x);
    }
  while (!queue.empty()) {
    int x = queue.back();
    queue.pop_back();
    const Bits& adj = above_[x];
    for (std::size_t y = adj.find_first(); y != Bits::npos; y = adj.find_next(y)) {
      if (zr.test(y)) continue;
      zr.set(y);
      int nx = match_r[y];
      if (nx >= 0 && !zl.test(nx)) {
        zl.set(nx);
        queue.push_back(nx);
      }
    }
  }
  for (int x = 0; x < n; ++x)
    if (zl.test(x) && !zr.test(x)) res.antichain.push_back(x);
  if (static_cast<int>(res.antichain.size()) != res.width ||
      static_cast<int>(res.chains.size()) != res.width)
    throw std::logic_error("width witness construction failed");
  return res;
}

bool Poset::is_kk_free(int k) const {
  if (k < 1) throw std::invalid_argument("k must be positive");
  const int n = size();
  if (2 * k > n) return true;
  std::vector<Bits> incomp(n, Bits(n));
  for (int i = 0; i < n; ++i) {
    incomp[i] = ~(above_[i] | below_[i]);
    incomp[i].reset(i);
  }
  // Grow two chains a1<..<ak, b1<..<bk with all cross pairs incomparable.
  auto extend = [&](auto&& self, const Bits& cand_a, const Bits& cand_b, int need_a,
                    int need_b) -> bool {
    if (need_a == 0 && need_b == 0) return true;
    if (static_cast<int>(cand_a.count()) < need_a) return false;
    if (static_cast<int>(cand_b.count()) < need_b) return false;
    if (need_a >= need_b && need_a > 0) {
      for (std::size_t x = cand_a.find_first(); x != Bits::npos; x = cand_a.find_next(x)) {
        if (self(self, cand_a & above_[x], cand_b & incomp[x], need_a - 1, need_b))
          return true;
      }
      return false;
    }
    for (std::size_t y = cand_b.find_first(); y != Bits::npos; y = cand_b.find_next(y)) {
      if (self(self, cand_a & incomp[y], cand_b & above_[y], need_a, need_b - 1))
        return true;
    }
    return false;
  };
  for (int a = 0; a < n; ++a) {
    const Bits& ia = incomp[a];
    for (std::size_t b = ia.find_first(); b != Bits::npos; b = ia.find_next(b)) {
      if (static_cast<int>(b) <= a) continue;  // symmetry break
      if (extend(extend, above_[a] & incomp[b], above_[b] & ia, k - 1, k - 1))
        return false;
    }
  }
  return true;
}

}  // namespace chainpart
