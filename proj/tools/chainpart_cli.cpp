#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chainpart/harness.hpp"

using namespace chainpart;

namespace {

std::vector<Event> read_events(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    events.push_back(parse_event_json(line));
  }
  return events;
}

int cmd_generate(int w, int rounds, std::uint64_t seed, const std::string& out) {
  GeneratorConfig cfg{w, rounds, seed};
  auto events = generate_regular_presentation(cfg);
  std::ofstream f;
  std::ostream* os = &std::cout;
  if (!out.empty()) {
    f.open(out);
    os = &f;
  }
  for (const auto& e : events) *os << event_to_json(e) << "\n";
  return 0;
}

int cmd_run(const std::string& in, const std::string& out, const std::string& algo,
            bool star, bool strict) {
  std::ifstream fin;
  std::istream* is = &std::cin;
  if (!in.empty() && in != "-") {
    fin.open(in);
    if (!fin) {
      std::cerr << "cannot open " << in << "\n";
      return 2;
    }
    is = &fin;
  }
  std::vector<Event> events;
  try {
    events = read_events(*is);
  } catch (const std::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  }
  std::ofstream fout;
  std::ostream* os = &std::cout;
  if (!out.empty()) {
    fout.open(out);
    os = &fout;
  }
  try {
    MainOptions opts;
    opts.check_star_each_round = star;
    opts.strict_accounting = strict;
    if (algo == "ff") {
      FirstFitVertexAlgo ff;
      PresentationState ps;
      std::ostringstream buf;
      for (const auto& e : events) {
        ps.apply(e);
        buf << event_to_json(e) << "\n";
        auto asg = ff(e);
        std::sort(asg.begin(), asg.end());
        buf << "{\"type\":\"colors\",\"round\":" << ps.rounds() << ",\"assign\":[";
        for (std::size_t i = 0; i < asg.size(); ++i) {
          if (i) buf << ",";
          buf << "[" << asg[i].first << ",\"" << asg[i].second << "\"]";
        }
        buf << "]}\n";
      }
      RunStats s;
      s.w = ps.width();
      s.rounds = ps.rounds();
      s.elements = ps.poset().size();
      s.colors_used = ff.colors();
      s.lambda_bound = lambda_chain_bound(std::max(1, s.w)).str();
      buf << stats_to_json(s) << "\n";
      *os << buf.str();
      return 0;
    }
    RunResult res = run_stream(events, opts);
    for (const auto& l : res.lines) *os << l << "\n";
    if (!res.stats.invariant_alarms.empty()) {
      for (const auto& a : res.stats.invariant_alarms)
        std::cerr << "alarm: " << a << "\n";
      return 1;
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid stream: " << e.what() << "\n";
    return 2;
  }
}

int cmd_adversary(const std::string& algo) {
  AdversaryResult res;
  if (algo == "ff") {
    FirstFitVertexAlgo ff;
    res = adversary_width2(std::ref(ff));
  } else {
    MainPartitioner mp;
    res = adversary_width2(wrap_main_partitioner(mp));
  }
  for (const auto& e : res.events) std::cout << event_to_json(e) << "\n";
  for (const auto& [v, c] : res.colors)
    std::cout << "element " << v << " -> " << c << "\n";
  std::cout << "distinct colors: " << res.distinct_colors << "\n";
  if (!res.valid) {
    std::cout << "INVALID: " << res.error << "\n";
    return 1;
  }
  std::cout << (res.distinct_colors >= 3 ? "forced a third chain\n"
                                         : "algorithm survived with 2 chains\n");
  return res.distinct_colors >= 3 ? 0 : 1;
}

int cmd_verify(const std::string& in) {
  std::ifstream fin;
  std::istream* is = &std::cin;
  if (!in.empty() && in != "-") {
    fin.open(in);
    if (!fin) {
      std::cerr << "cannot open " << in << "\n";
      return 2;
    }
    is = &fin;
  }
  VerifyResult res = verify_transcript(*is);
  for (const auto& e : res.errors) std::cerr << e << "\n";
  std::cout << "w=" << res.w << " elements=" << res.elements
            << " colors=" << res.colors << (res.ok ? " OK" : " FAIL") << "\n";
  if (res.parse_error) return 2;
  return res.ok ? 0 : 1;
}

int cmd_lambda(int w) {
  for (int v = 1; v <= w; ++v) {
    auto b = lambda_budget(v);
    std::cout << "w=" << v << " lambda1=" << b.l1 << " lambda2=" << b.l2
              << " lambda3=" << b.l3 << " lambda=" << b.lambda
              << " chains<=" << lambda_chain_bound(v) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-line chain partitioning of regular posets"};
  app.require_subcommand(1);

  int w = 2, rounds = 8;
  std::uint64_t seed = 1;
  std::string in, out, algo = "bundle";
  bool star = false, strict = false;

  auto* gen = app.add_subcommand("generate", "emit a random regular presentation");
  gen->add_option("--w", w, "poset width");
  gen->add_option("--rounds", rounds, "insert rounds after init");
  gen->add_option("--seed", seed, "rng seed");
  gen->add_option("-o,--out", out, "output file (default stdout)");

  auto* run = app.add_subcommand("run", "partition an event stream into chains");
  run->add_option("-i,--in", in, "event stream (default stdin)");
  run->add_option("-o,--out", out, "transcript output (default stdout)");
  run->add_option("--algo", algo, "bundle|ff")
      ->check(CLI::IsMember({"bundle", "ff"}));
  run->add_flag("--star-checks", star, "verify the color invariant every round");
  run->add_flag("--strict", strict, "enable strict chain accounting");

  auto* adv = app.add_subcommand("adversary", "width-2 lower-bound game");
  adv->add_option("--algo", algo, "bundle|ff")
      ->check(CLI::IsMember({"bundle", "ff"}));

  auto* ver = app.add_subcommand("verify", "replay and check a transcript");
  ver->add_option("-i,--in", in, "transcript (default stdin)");

  auto* lam = app.add_subcommand("lambda", "print the chain budget table");
  lam->add_option("--w", w, "largest width to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(w, rounds, seed, out);
    if (run->parsed()) return cmd_run(in, out, algo, star, strict);
    if (adv->parsed()) return cmd_adversary(algo);
    if (ver->parsed()) return cmd_verify(in);
    if (lam->parsed()) return cmd_lambda(w);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
