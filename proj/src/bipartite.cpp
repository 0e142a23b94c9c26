#include "chainpart/bipartite.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace chainpart {

namespace {

// Maximum matching size on masked rows via Kuhn's algorithm.
// rows[i] is restricted to `col_mask`; rows listed in `row_ids`.
int matching_size(const std::vector<std::uint32_t>& rows, std::uint32_t col_mask,
                  const std::vector<int>& row_ids) {
  std::vector<int> match_c(32, -1);
  int total = 0;
  std::uint32_t visited = 0;
  auto augment = [&](auto&& self, int r) -> bool {
    std::uint32_t cand = rows[r] & col_mask & ~visited;
    while (cand) {
      int c = std::countr_zero(cand);
      cand &= cand - 1;
      visited |= 1u << c;
      if (match_c[c] < 0 || self(self, match_c[c])) {
        match_c[c] = r;
        return true;
      }
    }
    return false;
  };
  for (int r : row_ids) {
    visited = 0;
    if (augment(augment, r)) ++total;
  }
  return total;
}

bool has_perfect_matching(const BipartitePoset& b, std::uint32_t row_mask,
                          std::uint32_t col_mask) {
  std::vector<int> rows;
  for (int i = 0; i < b.nx(); ++i)
    if ((row_mask >> i) & 1u) rows.push_back(i);
  return matching_size(b.adj, col_mask, rows) == static_cast<int>(rows.size());
}

void check_sides(const BipartitePoset& b) {
  if (b.nx() > BipartitePoset::kMaxSide || b.ny() > BipartitePoset::kMaxSide)
    throw std::invalid_argument("bipartite side too large");
  if (static_cast<int>(b.adj.size()) != b.nx())
    throw std::invalid_argument("adjacency size mismatch");
}

}  // namespace

int BipartitePoset::edge_count() const {
  int total = 0;
  for (auto m : adj) total += std::popcount(m);
  return total;
}

bool BipartitePoset::is_complete() const {
  const std::uint32_t full = ny() == 0 ? 0 : ((ny() == 32 ? 0u : (1u << ny())) - 1u);
  for (auto m : adj)
    if (m != full) return false;
  return nx() > 0;
}

bool characteristics_lex_leq(const Characteristics& a, const Characteristics& b) {
  if (a.width != b.width) return a.width < b.width;
  return a.surplus <= b.surplus;
}

std::optional<std::vector<int>> perfect_matching(const BipartitePoset& b) {
  check_sides(b);
  if (b.nx() != b.ny() || b.nx() == 0) return std::nullopt;
  const std::uint32_t all_rows = (1u << b.nx()) - 1u;
  const std::uint32_t all_cols = (1u << b.ny()) - 1u;
  if (!has_perfect_matching(b, all_rows, all_cols)) return std::nullopt;
  // Lexicographically-first: fix partners row by row, keeping feasibility.
  std::vector<int> match(b.nx(), -1);
  std::uint32_t used_cols = 0;
  for (int i = 0; i < b.nx(); ++i) {
    bool placed = false;
    for (int j = 0; j < b.ny() && !placed; ++j) {
      if (!b.has_edge(i, j) || ((used_cols >> j) & 1u)) continue;
      std::vector<int> rest;
      for (int r = i + 1; r < b.nx(); ++r) rest.push_back(r);
      if (matching_size(b.adj, all_cols & ~(used_cols | (1u << j)), rest) ==
          static_cast<int>(rest.size())) {
        match[i] = j;
        used_cols |= 1u << j;
        placed = true;
      }
    }
    if (!placed) throw std::logic_error("perfect matching extraction failed");
  }
  return match;
}

bool is_regular(const BipartitePoset& b) {
  check_sides(b);
  if (b.nx() != b.ny() || b.nx() == 0) return false;
  const std::uint32_t all_rows = (1u << b.nx()) - 1u;
  const std::uint32_t all_cols = (1u << b.ny()) - 1u;
  if (!has_perfect_matching(b, all_rows, all_cols)) return false;
  for (int i = 0; i < b.nx(); ++i) {
    for (int j = 0; j < b.ny(); ++j) {
      if (!b.has_edge(i, j)) continue;
      if (!has_perfect_matching(b, all_rows & ~(1u << i), all_cols & ~(1u << j)))
        return false;
    }
  }
  return true;
}

int surplus(const BipartitePoset& b) {
  check_sides(b);
  if (b.nx() == 0 || b.nx() > 25) throw std::invalid_argument("surplus: bad side size");
  const int n = b.nx();
  int best = Characteristics::kInfinity;
  for (std::uint32_t a = 1; a < (1u << n); ++a) {
    std::uint32_t nbr = 0;
    std::uint32_t rest = a;
    while (rest) {
      int i = std::countr_zero(rest);
      rest &= rest - 1;
      nbr |= b.adj[i];
    }
    if (std::popcount(nbr) == b.ny()) continue;  // full neighborhood: no constraint
    best = std::min(best, std::popcount(nbr) - std::popcount(a));
  }
  return best;
}

int surplus_dual(const BipartitePoset& b) {
  check_sides(b);
  if (b.ny() == 0 || b.ny() > 25) throw std::invalid_argument("surplus: bad side size");
  const int n = b.ny();
  // Symmetric form on the Y side over down-neighborhoods.
  int best = Characteristics::kInfinity;
  for (std::uint32_t a = 1; a < (1u << n); ++a) {
    std::uint32_t nbr = 0;
    for (int i = 0; i < b.nx(); ++i)
      if (b.adj[i] & a) nbr |= 1u << i;
    if (std::popcount(nbr) == b.nx()) continue;
    best = std::min(best, std::popcount(nbr) - std::popcount(a));
  }
  return best;
}

std::vector<Node> components(const BipartitePoset& b) {
  check_sides(b);
  const int nx = b.nx(), ny = b.ny();
  std::vector<int> comp_x(nx, -1), comp_y(ny, -1);
  int ncomp = 0;
  for (int s = 0; s < nx; ++s) {
    if (comp_x[s] >= 0) continue;
    // BFS over the bipartite graph.
    std::vector<int> qx{s};
    comp_x[s] = ncomp;
    std::vector<int> qy;
    while (!qx.empty() || !qy.empty()) {
      if (!qx.empty()) {
        int i = qx.back();
        qx.pop_back();
        for (int j = 0; j < ny; ++j)
          if (b.has_edge(i, j) && comp_y[j] < 0) {
            comp_y[j] = ncomp;
            qy.push_back(j);
          }
      } else {
        int j = qy.back();
        qy.pop_back();
        for (int i = 0; i < nx; ++i)
          if (b.has_edge(i, j) && comp_x[i] < 0) {
            comp_x[i] = ncomp;
            qx.push_back(i);
          }
      }
    }
    ++ncomp;
  }
  for (int j = 0; j < ny; ++j)
    if (comp_y[j] < 0) throw std::invalid_argument("isolated upper element");
  std::vector<Node> out;
  for (int c = 0; c < ncomp; ++c) {
    BipartitePoset sub;
    std::vector<int> xmap(nx, -1), ymap(ny, -1);
    for (int j = 0; j < ny; ++j)
      if (comp_y[j] == c) {
        ymap[j] = sub.ny();
        sub.ys.push_back(b.ys[j]);
      }
    for (int i = 0; i < nx; ++i)
      if (comp_x[i] == c) {
        xmap[i] = sub.nx();
        sub.xs.push_back(b.xs[i]);
        std::uint32_t m = 0;
        for (int j = 0; j < ny; ++j)
          if (b.has_edge(i, j)) m |= 1u << ymap[j];
        sub.adj.push_back(m);
      }
    out.push_back(make_node(std::move(sub)));
  }
  std::sort(out.begin(), out.end(),
            [](const Node& a, const Node& b2) { return a.bip.xs[0] < b2.bip.xs[0]; });
  return out;
}

Node make_node(BipartitePoset b) {
  check_sides(b);
  if (b.nx() != b.ny() || b.nx() == 0)
    throw std::invalid_argument("node sides must be equal and nonempty");
  Node n;
  n.bip = std::move(b);
  if (!is_regular(n.bip))
    throw std::invalid_argument("bipartite poset is not regular");
  n.complete = n.bip.is_complete();
  n.chars.width = n.bip.nx();
  n.chars.surplus = surplus(n.bip);
  return n;
}

std::optional<DilworthClique> find_dilworth_clique(const Node& n, int k) {
  const BipartitePoset& b = n.bip;
  if (k < 1 || k > b.nx()) return std::nullopt;
  const std::uint32_t all_rows = (1u << b.nx()) - 1u;
  const std::uint32_t all_cols = (1u << b.ny()) - 1u;
  // Enumerate x-subsets in lexicographic order of ascending index vectors.
  std::vector<int> sx(k), sy(k);
  auto pick_ys = [&](auto&& self, std::uint32_t common, int depth, int start,
                     std::uint32_t chosen) -> bool {
    if (depth == k) {
      std::uint32_t rows = all_rows;
      for (int i : sx) rows &= ~(1u << i);
      if (has_perfect_matching(b, rows, all_cols & ~chosen)) return true;
      return false;
    }
    for (int j = start; j < b.ny(); ++j) {
      if (!((common >> j) & 1u)) continue;
      sy[depth] = j;
      if (self(self, common, depth + 1, j + 1, chosen | (1u << j))) return true;
    }
    return false;
  };
  auto pick_xs = [&](auto&& self, int depth, int start, std::uint32_t common) -> bool {
    if (depth == k) {
      if (std::popcount(common) < k) return false;
      return pick_ys(pick_ys, common, 0, 0, 0);
    }
    for (int i = start; i < b.nx(); ++i) {
      sx[depth] = i;
      std::uint32_t c = common & b.adj[i];
      if (std::popcount(c) < k) continue;
      if (self(self, depth + 1, i + 1, c)) return true;
    }
    return false;
  };
  if (!pick_xs(pick_xs, 0, 0, all_cols)) return std::nullopt;
  DilworthClique dc;
  dc.k = k;
  dc.xs = sx;
  dc.ys = sy;
  return dc;
}

}  // namespace chainpart
