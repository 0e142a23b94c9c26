#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <sstream>

#include "chainpart/harness.hpp"
#include "chainpart/main_partitioner.hpp"

using namespace chainpart;

namespace {

InitEvent init_w(int w) {
  InitEvent e;
  e.w = w;
  for (int i = 0; i < w; ++i) {
    e.a1.push_back(i);
    e.a2.push_back(w + i);
  }
  return e;
}

InsertEvent ins(int below, int above, std::vector<int> members,
                std::vector<std::pair<int, int>> down,
                std::vector<std::pair<int, int>> up) {
  InsertEvent e;
  e.below = below;
  e.above = above;
  e.members = std::move(members);
  e.down = std::move(down);
  e.up = std::move(up);
  return e;
}

}  // namespace

TEST_CASE("width 1 run stays on a single color") {
  MainOptions opts;
  opts.check_star_each_round = true;
  MainPartitioner mp(opts);
  mp.handle(Event{init_w(1)});
  mp.handle(Event{ins(1, 2, {2}, {{0, 2}}, {{2, 1}})});
  mp.handle(Event{ins(1, 3, {3}, {{0, 3}}, {{3, 2}})});
  auto stats = mp.finalize();
  CHECK(stats.colors_used == 1);
  CHECK(stats.invariant_alarms.empty());
}

TEST_CASE("width 2 identity split spawns Q members") {
  MainOptions opts;
  opts.check_star_each_round = true;
  MainPartitioner mp(opts);
  mp.handle(Event{init_w(2)});
  // Complete middle: both children complete of width 2 -> a double extension.
  mp.handle(Event{ins(1, 2, {4, 5}, {{0, 4}, {0, 5}, {1, 4}, {1, 5}},
                      {{4, 2}, {4, 3}, {5, 2}, {5, 3}})});
  // Then a matching split below: children of width 1.
  mp.handle(Event{ins(1, 3, {6, 7}, {{0, 6}, {1, 7}}, {{6, 4}, {6, 5}, {7, 4}, {7, 5}})});
  auto stats = mp.finalize();
  CHECK(stats.invariant_alarms.empty());
  CHECK(stats.w == 2);
  // Color budget is tiny compared to the bound but must stay within it.
  CHECK(BigInt(stats.colors_used) <= lambda_chain_bound(2));
  const auto& tree = mp.tree();
  int qmembers = 0;
  for (int i = 0; i < tree.size(); ++i)
    if (tree.at(i).cls == Classification::QMember) ++qmembers;
  CHECK(qmembers == 3);  // the double extension plus the spine continuation
}

TEST_CASE("worked width-6 example: registries and classifications") {
  MainOptions opts;
  opts.check_star_each_round = true;
  MainPartitioner mp(opts);
  mp.handle(Event{init_w(6)});
  // Present the third antichain (elements 12..17) between A1 and A2.
  mp.handle(Event{ins(
      1, 2, {12, 13, 14, 15, 16, 17},
      {{0, 12}, {0, 13}, {0, 14}, {1, 12}, {1, 13}, {1, 14}, {2, 12}, {2, 13},
       {2, 14}, {2, 15}, {3, 14}, {3, 15}, {4, 16}, {4, 17}, {5, 16}, {5, 17}},
      {{12, 6}, {13, 7}, {13, 8}, {13, 9}, {14, 7}, {14, 8}, {14, 9}, {14, 10},
       {15, 7}, {15, 8}, {15, 9}, {15, 10}, {15, 11}, {16, 7}, {16, 8}, {16, 9},
       {16, 10}, {16, 11}, {17, 7}, {17, 8}, {17, 9}, {17, 10}, {17, 11}})});
  // Lower children: a (4,1) block and a complete 2x2; upper: a trivial node
  // and the (5,2) block.
  CHECK(mp.tree().size() == 5);
  CHECK(mp.tree().at(1).node.chars == Characteristics{4, 1});
  CHECK(mp.tree().at(1).cls == Classification::Active);
  CHECK(mp.tree().at(2).node.chars ==
        Characteristics{2, Characteristics::kInfinity});
  CHECK(mp.tree().at(2).cls == Classification::Recursive);
  CHECK(mp.tree().at(3).node.chars ==
        Characteristics{1, Characteristics::kInfinity});
  CHECK(mp.tree().at(4).node.chars == Characteristics{5, 2});
  CHECK(mp.tree().at(4).cls == Classification::Active);
  CHECK(mp.registry_nodes(4, 1) == std::vector<int>{1});
  CHECK(mp.registry_nodes(5, 2) == std::vector<int>{4});

  // Present the fourth antichain (elements 18..23) between the new level
  // and A2: the (5,2) node splits into two more (4,1) actives.
  mp.handle(Event{ins(
      3, 2, {18, 19, 20, 21, 22, 23},
      {{12, 18}, {13, 19}, {14, 20}, {14, 21}, {15, 20}, {15, 21}, {15, 22},
       {15, 23}, {16, 21}, {16, 22}, {16, 23}, {17, 21}, {17, 22}, {17, 23}},
      {{18, 6}, {19, 7}, {19, 8}, {19, 9}, {20, 7}, {20, 8}, {20, 9}, {21, 7},
       {21, 8}, {21, 9}, {21, 10}, {22, 9}, {22, 10}, {23, 11}})});

  auto reg = mp.registry_nodes(4, 1);
  REQUIRE(reg.size() == 3);
  const int n3 = reg[0], n8 = reg[1], n5 = reg[2];
  CHECK(mp.tree().at(n8).node.bip.xs == std::vector<int>{14, 15, 16, 17});
  CHECK(mp.tree().at(n5).node.bip.ys == std::vector<int>{7, 8, 9, 10});
  // The registry order: both earlier actives precede the late upper one,
  // and the two lower ones are incomparable.
  CHECK(mp.registry_less(4, 1, n3, n5));
  CHECK(mp.registry_less(4, 1, n8, n5));
  CHECK(!mp.registry_less(4, 1, n5, n3));
  CHECK(!mp.registry_less(4, 1, n3, n8));
  CHECK(!mp.registry_less(4, 1, n8, n3));

  auto stats = mp.finalize();
  CHECK(stats.invariant_alarms.empty());
  CHECK(stats.active_nodes >= 4);
  CHECK(stats.max_registry_width <= 2);  // floor(sqrt(6))
}

TEST_CASE("random runs keep the chain invariant and stay within budget") {
  for (int w = 2; w <= 6; ++w) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      GeneratorConfig cfg;
      cfg.w = w;
      cfg.rounds = 30;
      cfg.seed = seed * 977 + w;
      auto events = generate_regular_presentation(cfg);
      MainOptions opts;
      opts.check_star_each_round = true;
      RunResult rr = run_stream(events, opts);
      INFO("w=" << w << " seed=" << cfg.seed);
      CHECK(rr.stats.invariant_alarms.empty());
      CHECK(BigInt(rr.stats.colors_used) <= lambda_chain_bound(w));
      std::stringstream ss;
      for (auto& l : rr.lines) ss << l << "\n";
      auto vr = verify_transcript(ss);
      CHECK(vr.ok);
      CHECK(vr.w == w);
      CHECK(vr.colors == rr.stats.colors_used);
    }
  }
}

TEST_CASE("every vertex gets exactly one color in its own round") {
  GeneratorConfig cfg;
  cfg.w = 4;
  cfg.rounds = 15;
  cfg.seed = 99;
  auto events = generate_regular_presentation(cfg);
  MainPartitioner mp;
  std::set<int> colored;
  for (const auto& e : events) {
    auto asg = mp.handle(e);
    std::size_t expect = std::holds_alternative<InitEvent>(e) ? 8 : 4;
    CHECK(asg.size() == expect);
    for (auto& [v, c] : asg) {
      CHECK(!c.empty());
      CHECK(colored.insert(v).second);
    }
  }
  CHECK(static_cast<int>(colored.size()) == mp.presentation().poset().size());
}

TEST_CASE("rejected events do not corrupt the partitioner") {
  MainPartitioner mp;
  mp.handle(Event{init_w(2)});
  CHECK_THROWS_AS(mp.handle(Event{ins(1, 2, {4, 5}, {}, {})}),
                  std::invalid_argument);
  // The legal version still goes through afterwards.
  auto asg = mp.handle(
      Event{ins(1, 2, {4, 5}, {{0, 4}, {1, 5}}, {{4, 2}, {5, 3}})});
  CHECK(asg.size() == 2);
  CHECK(mp.finalize().invariant_alarms.empty());
}

TEST_CASE("identical seeds give byte-identical transcripts") {
  GeneratorConfig cfg;
  cfg.w = 5;
  cfg.rounds = 25;
  cfg.seed = 12345;
  auto ev1 = generate_regular_presentation(cfg);
  auto ev2 = generate_regular_presentation(cfg);
  REQUIRE(ev1.size() == ev2.size());
  for (std::size_t i = 0; i < ev1.size(); ++i)
    CHECK(event_to_json(ev1[i]) == event_to_json(ev2[i]));
  MainOptions opts;
  auto r1 = run_stream(ev1, opts);
  auto r2 = run_stream(ev2, opts);
  CHECK(r1.lines == r2.lines);
}
