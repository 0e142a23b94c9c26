#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "chainpart/bipartite.hpp"
#include "chainpart/poset.hpp"

namespace chainpart {

// First round: two complete maximum antichains A1 (minimal) and A2 (maximal).
// `edges` is only populated when a caller wants to model a defective init;
// the wire format always means the complete relation.
struct InitEvent {
  int w = 0;
  std::vector<int> a1, a2;
  std::optional<std::vector<std::pair<int, int>>> edges;
};

// Insert a new maximum antichain strictly between two currently consecutive
// ones. `down` are (old, new) comparabilities, `up` are (new, old).
struct InsertEvent {
  int below = 0, above = 0;  // antichain ids
  std::vector<int> members;
  std::vector<std::pair<int, int>> down, up;
};

using Event = std::variant<InitEvent, InsertEvent>;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Event parse_event_json(const std::string& line);
std::string event_to_json(const Event& e);

struct Violation {
  int condition = 0;  // 1..4 per the regularity conditions
  std::string detail;
};

struct ValidationResult {
  bool ok = true;
  std::vector<Violation> violations;
};

// Ground poset plus the antichain sequence. Antichain ids are 1-based in
// presentation order (A1=1, A2=2, inserts get 3,4,...); the linear order of
// the levels is tracked separately.
class PresentationState {
 public:
  ValidationResult validate(const Event& e) const;

  struct Applied {
    int level_id = 0;
    int below = 0, above = 0;
    std::vector<int> members;
    BipartitePoset down_bip, up_bip;  // (A_below, A_t) and (A_t, A_above)
  };
  // Validates, then applies; throws std::invalid_argument on any violation.
  Applied apply(const Event& e);

  bool initialized() const { return w_ > 0; }
  int width() const { return w_; }
  int rounds() const { return rounds_; }
  const Poset& poset() const { return poset_; }
  const std::vector<int>& level_order() const { return order_; }
  const std::vector<int>& level_members(int level_id) const;
  // Bipartite poset between two currently consecutive antichains.
  BipartitePoset gap_bipartite(int below_id, int above_id) const;

 private:
  Poset poset_;
  int w_ = 0;
  int rounds_ = 0;
  std::vector<int> order_;
  std::map<int, std::vector<int>> levels_;
};

}  // namespace chainpart
