#include "chainpart/partitioners.hpp"

#include <stdexcept>

namespace chainpart {

int FirstFitPartitioner::assign(int item) {
  for (std::size_t c = 0; c < chains_.size(); ++c) {
    bool ok = true;
    for (int other : chains_[c]) {
      if (!(less_(other, item) || less_(item, other))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      chains_[c].push_back(item);
      return static_cast<int>(c);
    }
  }
  chains_.push_back({item});
  return static_cast<int>(chains_.size()) - 1;
}

UpGrowingPartitioner::UpGrowingPartitioner(LessFn less)
    : less_(std::move(less)), ff_(less_) {}

int UpGrowingPartitioner::assign(int item) {
  for (int other : seen_)
    if (less_(item, other))
      throw std::invalid_argument("up-growing item is not maximal at presentation");
  seen_.push_back(item);
  return ff_.assign(item);
}

DownGrowingPartitioner::DownGrowingPartitioner(LessFn less) {
  LessFn reversed = [less = std::move(less)](int a, int b) { return less(b, a); };
  up_ = std::make_unique<UpGrowingPartitioner>(std::move(reversed));
}

PartitionerFactory default_general_partitioner() {
  return [](LessFn less) -> std::unique_ptr<IOnlinePartitioner> {
    return std::make_unique<FirstFitPartitioner>(std::move(less));
  };
}

}  // namespace chainpart
