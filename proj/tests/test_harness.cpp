#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <regex>
#include <set>
#include <sstream>

#include "chainpart/harness.hpp"

using namespace chainpart;

TEST_CASE("generated presentations are legal and sized as requested") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (int w : {1, 3, 5}) {
      GeneratorConfig cfg;
      cfg.w = w;
      cfg.rounds = 12;
      cfg.seed = seed;
      auto events = generate_regular_presentation(cfg);
      REQUIRE(events.size() == 13);
      PresentationState ps;
      for (const auto& e : events) ps.apply(e);  // throws if any event is illegal
      CHECK(ps.poset().size() == w * 14);
      CHECK(ps.poset().width() == w);
    }
  }
}

TEST_CASE("exact chain cover produces w covering chains") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorConfig cfg;
    cfg.w = 1 + static_cast<int>(seed % 6);
    cfg.rounds = 10;
    cfg.seed = seed;
    auto events = generate_regular_presentation(cfg);
    PresentationState ps;
    for (const auto& e : events) ps.apply(e);
    auto chains = exact_chain_cover(ps);
    CHECK(static_cast<int>(chains.size()) == cfg.w);
    std::set<int> covered;
    for (const auto& c : chains) {
      for (std::size_t i = 0; i + 1 < c.size(); ++i)
        CHECK(ps.poset().less(c[i], c[i + 1]));
      for (int v : c) CHECK(covered.insert(v).second);
    }
    CHECK(static_cast<int>(covered.size()) == ps.poset().size());
  }
}

TEST_CASE("first-fit baseline colors everything into valid chains") {
  GeneratorConfig cfg;
  cfg.w = 4;
  cfg.rounds = 10;
  cfg.seed = 5;
  auto events = generate_regular_presentation(cfg);
  FirstFitVertexAlgo ff;
  PresentationState ps;
  std::map<std::string, std::vector<int>> classes;
  for (const auto& e : events) {
    ps.apply(e);
    for (auto& [v, c] : ff(e)) classes[c].push_back(v);
  }
  int total = 0;
  for (auto& [c, vs] : classes) {
    total += static_cast<int>(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        CHECK(ps.poset().comparable(vs[i], vs[j]));
  }
  CHECK(total == ps.poset().size());
}

TEST_CASE("the width-2 adversary beats first-fit and the bundle partitioner") {
  FirstFitVertexAlgo ff;
  auto r1 = adversary_width2(std::ref(ff));
  CHECK(r1.valid);
  CHECK(r1.distinct_colors >= 3);

  MainPartitioner mp;
  auto r2 = adversary_width2(wrap_main_partitioner(mp));
  CHECK(r2.valid);
  CHECK(r2.distinct_colors >= 3);

  // The certificate: the adversarial poset really has width 2.
  PresentationState ps;
  for (const auto& e : r2.events) ps.apply(e);
  CHECK(ps.poset().width() == 2);
}

TEST_CASE("transcript verification accepts good runs and flags tampering") {
  GeneratorConfig cfg;
  cfg.w = 3;
  cfg.rounds = 8;
  cfg.seed = 21;
  auto events = generate_regular_presentation(cfg);
  RunResult rr = run_stream(events, MainOptions{});
  std::string good;
  for (auto& l : rr.lines) good += l + "\n";

  {
    std::stringstream ss(good);
    auto vr = verify_transcript(ss);
    CHECK(vr.ok);
    CHECK(!vr.parse_error);
    CHECK(vr.w == 3);
    CHECK(vr.colors == rr.stats.colors_used);
  }
  {
    // Rewrite every assignment to one shared color: incomparable elements
    // end up together and the chain check must fire.
    std::string bad =
        std::regex_replace(good, std::regex(R"re((\[\d+,)"[^"]*"\])re"), "$1\"x\"]");
    std::stringstream ss(bad);
    auto vr = verify_transcript(ss);
    CHECK(!vr.ok);
    CHECK(!vr.errors.empty());
  }
  {
    // Drop a colors line: uncovered elements.
    std::stringstream out;
    std::stringstream in(good);
    std::string line;
    bool dropped = false;
    while (std::getline(in, line)) {
      if (!dropped && line.find("\"colors\"") != std::string::npos) {
        dropped = true;
        continue;
      }
      out << line << "\n";
    }
    auto vr = verify_transcript(out);
    CHECK(!vr.ok);
  }
  {
    // Corrupt the json itself.
    std::stringstream ss("{\"type\":\"init\",");
    auto vr = verify_transcript(ss);
    CHECK(vr.parse_error);
  }
  {
    // An illegal event stream is rejected during replay.
    std::stringstream ss(
        R"({"type":"insert","below":1,"above":2,"members":[0],"down":[],"up":[]})");
    auto vr = verify_transcript(ss);
    CHECK(!vr.ok);
  }
}
