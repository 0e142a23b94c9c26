#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "chainpart/main_partitioner.hpp"
#include "chainpart/presentation.hpp"

namespace chainpart {

// Random regular presentations. Each round splits a random gap; the new
// antichain is wired either by factoring the gap relation through a random
// permutation, or by sampling both sides as unions of random permutations and
// rejecting illegal compositions (with the factorization as fallback).
struct GeneratorConfig {
  int w = 2;
  int rounds = 8;  // insert rounds after init
  std::uint64_t seed = 1;
  int reject_tries = 20;
};
std::vector<Event> generate_regular_presentation(const GeneratorConfig& cfg);

// Exact minimum chain cover of a fully presented regular poset: per gap, the
// lexicographically-first perfect matching of every connected component; the
// union stitches into exactly w vertex-disjoint chains.
std::vector<std::vector<int>> exact_chain_cover(const PresentationState& ps);

// An online vertex-coloring algorithm: consumes one event, returns the
// (element, color) assignments for that round.
using OnlineAlgo =
    std::function<std::vector<std::pair<int, std::string>>(const Event&)>;

// Greedy baseline: each new element joins the first existing color class it
// is comparable with everything in, else opens a fresh one.
class FirstFitVertexAlgo {
 public:
  std::vector<std::pair<int, std::string>> operator()(const Event& e);
  int colors() const { return static_cast<int>(chains_.size()); }

 private:
  PresentationState pres_;
  std::vector<std::vector<int>> chains_;
};

OnlineAlgo wrap_main_partitioner(MainPartitioner& mp);

// Width-2 adversary: after the initial two antichains it inserts one
// antichain whose wiring crosses whatever two-chain pairing the algorithm
// committed to, so any correct algorithm is forced onto a third color.
struct AdversaryResult {
  std::vector<Event> events;
  std::map<int, std::string> colors;
  int distinct_colors = 0;
  bool valid = true;  // every color class the algorithm produced is a chain
  std::string error;
};
AdversaryResult adversary_width2(const OnlineAlgo& algo);

// Transcript = JSONL: the event lines interleaved with one
// {"type":"colors","round":t,"assign":[[id,color],...]} line per round, and a
// final {"type":"stats",...} line.
std::string stats_to_json(const RunStats& s);
struct RunResult {
  RunStats stats;
  std::vector<std::string> lines;
};
RunResult run_stream(const std::vector<Event>& events, const MainOptions& opts);

struct VerifyResult {
  bool ok = true;
  bool parse_error = false;
  std::vector<std::string> errors;
  int w = 0;
  int elements = 0;
  int colors = 0;
};
VerifyResult verify_transcript(std::istream& in);

}  // namespace chainpart
