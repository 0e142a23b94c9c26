#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "chainpart/coloring.hpp"
#include "chainpart/presentation.hpp"

using namespace chainpart;

namespace {

// Independent recomputation of the chain budget, written directly from the
// defining recurrence with no memoization or shared helpers.
BigInt lambda_ref(int w);
BigInt floor_pow_15_over_2(int w) {
  // floor(w^(15/2)) = floor(sqrt(w^15))
  BigInt p = 1;
  for (int i = 0; i < 15; ++i) p *= w;
  BigInt lo = 0, hi = p;
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (mid * mid <= p)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}
BigInt lambda_ref(int w) {
  if (w <= 1) return 1;
  int fs = 1;
  while ((fs + 1) * (fs + 1) <= w) ++fs;
  BigInt ls = lambda_ref(fs);
  BigInt w3 = BigInt(w) * w * w;
  BigInt l1 = 16 * floor_pow_15_over_2(w) * ls;
  BigInt l2 = (w3 + 1) * w3 + 2;  // 2*C(w^3+1, 2) + 2
  BigInt l3 = BigInt(w) * w * w * w * l2 * ls;
  return l1 * l2 * l3;
}

Node complete_node(int w, int base_x, int base_y) {
  BipartitePoset b;
  for (int i = 0; i < w; ++i) {
    b.xs.push_back(base_x + i);
    b.ys.push_back(base_y + i);
    b.adj.push_back((1u << w) - 1);
  }
  return make_node(b);
}

}  // namespace

TEST_CASE("arena interning, paths and containment") {
  ColorArena a;
  int r = a.root("e0.2");
  CHECK(a.root("e0.2") == r);
  int c1 = a.child(r, "q0");
  int c2 = a.child(r, "q1");
  CHECK(a.child(r, "q0") == c1);
  CHECK(c1 != c2);
  CHECK(a.path(c1) == "e0.2/q0");
  int leaf = a.child(c1, "c");
  CHECK(a.path(leaf) == "e0.2/q0/c");
  CHECK(a.contains(r, leaf));
  CHECK(a.contains(c1, leaf));
  CHECK(!a.contains(c2, leaf));
  CHECK(a.contains(leaf, leaf));
  CHECK(!a.contains(leaf, c1));
}

TEST_CASE("chain budget values and recurrence") {
  auto b1 = lambda_budget(1);
  CHECK(b1.lambda == 1);
  auto b2 = lambda_budget(2);
  CHECK(b2.l1 == 2896);
  CHECK(b2.l2 == 74);
  CHECK(b2.l3 == 1184);
  CHECK(b2.lambda == BigInt("253735936"));
  CHECK(lambda_chain_bound(2) == BigInt("1014943744"));
  for (int w = 1; w <= 64; ++w) {
    auto b = lambda_budget(w);
    CHECK(b.lambda == b.l1 * b.l2 * b.l3);
    CHECK(b.lambda == lambda_ref(w));
  }
}

TEST_CASE("edge order relations and witness edges") {
  PresentationState ps;
  InitEvent e;
  e.w = 2;
  e.a1 = {0, 1};
  e.a2 = {2, 3};
  ps.apply(e);
  const Poset& p = ps.poset();
  CHECK(edge_leq(p, {0, 2}, {2, 3}));   // 2 <= 2
  CHECK(!edge_leq(p, {0, 2}, {0, 3}));  // 2 vs 0 incomparable downward
  CHECK(edge_comparable(p, {0, 2}, {2, 3}));

  Node src = complete_node(2, 0, 2);
  // Witness of an edge inside the source is the lex-first sandwiching edge.
  CHECK(find_witness_edge(p, src, {0, 2}) == EdgeKey{0, 2});
  CHECK(find_witness_edge(p, src, {1, 3}) == EdgeKey{1, 3});
  // A 1x1 sub-block cannot sandwich an edge hanging off the other chain.
  Node narrow = complete_node(1, 0, 2);
  CHECK_THROWS_AS(find_witness_edge(p, narrow, {1, 3}), std::logic_error);
}

TEST_CASE("projection fixes lex-first matchings and is injective per side") {
  // Ground: 2 levels of 3, complete, and a middle level in between.
  PresentationState ps;
  InitEvent e;
  e.w = 3;
  e.a1 = {0, 1, 2};
  e.a2 = {3, 4, 5};
  ps.apply(e);
  InsertEvent ins;
  ins.below = 1;
  ins.above = 2;
  ins.members = {6, 7, 8};
  for (int a : {0, 1, 2})
    for (int z : {6, 7, 8}) ins.down.push_back({a, z});
  for (int z : {6, 7, 8})
    for (int b : {3, 4, 5}) ins.up.push_back({z, b});
  ps.apply(ins);
  const Poset& p = ps.poset();
  Node src = complete_node(3, 0, 3);

  // Project onto edges between the middle level and A2.
  std::vector<EdgeKey> targets;
  for (int z : {6, 7, 8})
    for (int b : {3, 4, 5}) targets.push_back({z, b});
  auto m = project_colors(p, src, {6, 7, 8}, {3, 4, 5}, targets);
  REQUIRE(m.size() == targets.size());
  // The upper matching is the identity (antichain equals the source side),
  // so (z_i, b_j) maps to (x_{M1(z_i)}, b_j); lex-first M1 pairs in order.
  CHECK(m.at({6, 3}) == EdgeKey{0, 3});
  CHECK(m.at({7, 4}) == EdgeKey{1, 4});
  CHECK(m.at({8, 5}) == EdgeKey{2, 5});
  // Distinct targets with distinct endpoints map to distinct sources.
  std::set<EdgeKey> images;
  for (int z : {6, 7, 8}) images.insert(m.at({z, 3}));
  CHECK(images.size() == 3);
}

TEST_CASE("shuffling covers each child edge exactly once") {
  for (int u : {1, 3, 4}) {
    Node src = complete_node(u, 0, u);
    std::vector<int> mid;
    for (int i = 0; i < u; ++i) mid.push_back(2 * u + i);
    ShuffleResult sr = shuffle_colors(src, mid);
    // Every (x_i, z_k) and (z_k, y_j) child edge appears exactly once as a
    // key, and every parent edge is used exactly u times per side.
    CHECK(static_cast<int>(sr.lower.size()) == u * u);
    CHECK(static_cast<int>(sr.upper.size()) == u * u);
    std::map<EdgeKey, int> uses;
    for (auto& [t, s] : sr.lower) {
      CHECK(t.a < 2 * u);
      CHECK(t.b >= 2 * u);
      ++uses[s];
    }
    for (auto& [t, s] : sr.upper) ++uses[s];
    CHECK(static_cast<int>(uses.size()) == u * u);
    for (auto& [s, cnt] : uses) CHECK(cnt == 2);
    // Sandwiching: the source edge of (x_i, z_k) shares its x endpoint, the
    // source of (z_k, y_j) its y endpoint.
    for (auto& [t, s] : sr.lower) CHECK(s.a == t.a);
    for (auto& [t, s] : sr.upper) CHECK(s.b == t.b);
    // Consistency: lower (x_i,z_k) and upper (z_k,y_j) reuse (x_i,y_j) iff
    // k = (i+j) mod u.
    for (auto& [t, s] : sr.lower) {
      int i = t.a, k = t.b - 2 * u, j = s.b - u;
      CHECK(k == (i + j) % u);
    }
  }
}

TEST_CASE("bundles, vertex colors and the chain invariant") {
  PresentationState ps;
  InitEvent e;
  e.w = 2;
  e.a1 = {0, 1};
  e.a2 = {2, 3};
  ps.apply(e);
  ColorArena arena;
  ColoringState cs(&arena);
  int r02 = arena.root("e0.2");
  int r13 = arena.root("e1.3");
  cs.set_edge_bundle({0, 2}, {r02});
  cs.set_edge_bundle({1, 3}, {r13});
  CHECK_THROWS_AS(cs.set_edge_bundle({0, 2}, {r13}), std::logic_error);

  int c0 = cs.assign_vertex_color(0, {{0, 2}});
  int c2 = cs.assign_vertex_color(2, {{0, 2}});
  CHECK(c0 == c2);  // same bundle, same canonical color
  CHECK(arena.path(c0) == "e0.2/c");
  cs.assign_vertex_color(1, {{1, 3}});
  cs.assign_vertex_color(3, {{1, 3}});
  CHECK(cs.colors_used() == 2);
  CHECK(!cs.check_property_star(ps.poset()).has_value());

  // Color 1 and 2 alike: they are incomparable, so (*) must fire.
  ColoringState bad(&arena);
  bad.set_edge_bundle({0, 2}, {r02});
  bad.assign_vertex_color(0, {{0, 2}});
  bad.assign_vertex_color(1, {{0, 2}});
  auto v = bad.check_property_star(ps.poset());
  REQUIRE(v.has_value());
  CHECK(arena.path(v->color) == "e0.2/c");
}

TEST_CASE("vertex color picks the lexicographically smallest reserve") {
  ColorArena arena;
  ColoringState cs(&arena);
  int ra = arena.root("b");
  int rb = arena.root("a");
  cs.set_edge_bundle({0, 2}, {ra});
  cs.set_edge_bundle({0, 3}, {rb});
  int c = cs.assign_vertex_color(0, {{0, 2}, {0, 3}});
  CHECK(arena.path(c) == "a/c");
}

TEST_CASE("property star sees endpoints of edges carrying the color") {
  PresentationState ps;
  InitEvent e;
  e.w = 2;
  e.a1 = {0, 1};
  e.a2 = {2, 3};
  ps.apply(e);
  ColorArena arena;
  ColoringState cs(&arena);
  int r = arena.root("e0.2");
  cs.set_edge_bundle({0, 2}, {r});
  cs.set_edge_bundle({1, 3}, {r});  // same reserve on an incomparable edge
  int c = cs.assign_vertex_color(0, {{0, 2}});
  (void)c;
  auto v = cs.check_property_star(ps.poset());
  REQUIRE(v.has_value());  // endpoints {0,2} and {1,3} cannot form a chain
}
