#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstdint>
#include <vector>

namespace chainpart {

using Bits = boost::dynamic_bitset<std::uint64_t>;

// Strict partial order over dense int ids, stored transitively closed.
// Elements are only ever added; relations are never removed.
class Poset {
 public:
  int size() const { return static_cast<int>(above_.size()); }

  bool less(int a, int b) const { return above_[a].test(b); }
  bool leq(int a, int b) const { return a == b || less(a, b); }
  bool comparable(int a, int b) const { return a == b || less(a, b) || less(b, a); }

  // `below`/`above` are generating sets of strict predecessors/successors;
  // the closure is taken internally. Throws std::logic_error if closing the
  // new element would require a new relation between two existing elements.
  int add_element(const std::vector<int>& below, const std::vector<int>& above,
                  int level = -1);

  const Bits& strict_above(int x) const { return above_[x]; }
  const Bits& strict_below(int x) const { return below_[x]; }
  int level_of(int x) const { return level_of_[x]; }

  Bits upset(const std::vector<int>& a) const;    // a together with everything above
  Bits downset(const std::vector<int>& a) const;  // a together with everything below

  bool is_antichain(const std::vector<int>& a) const;
  // A ⊑ B: both antichains, every a in A has some b in B with a <= b.
  bool antichain_below(const std::vector<int>& a, const std::vector<int>& b) const;

  struct WidthResult {
    int width = 0;
    std::vector<int> antichain;              // witness, size == width
    std::vector<std::vector<int>> chains;    // witness cover, chains.size() == width
  };
  WidthResult width_with_witness() const;
  int width() const { return width_with_witness().width; }
  std::vector<std::vector<int>> min_chain_cover() const {
    return width_with_witness().chains;
  }

  // True iff the poset contains no induced k+k: two k-element chains with
  // every cross pair incomparable. Backtracking search; meant for small n.
  bool is_kk_free(int k) const;

 private:
  std::vector<Bits> above_, below_;
  std::vector<int> level_of_;
};

}  // namespace chainpart
