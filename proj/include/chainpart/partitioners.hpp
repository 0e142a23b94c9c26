#pragma once

#include <functional>
#include <memory>
#include <vector>

namespace chainpart {

// Items are opaque handles; the owner supplies the order via callbacks.
// `less(a, b)` must be a strict partial order; comparability is
// less(a,b) || less(b,a) (items are never presented twice).
using LessFn = std::function<bool(int, int)>;

class IOnlinePartitioner {
 public:
  virtual ~IOnlinePartitioner() = default;
  // Returns the 0-based chain index for the new item.
  virtual int assign(int item) = 0;
  virtual int chain_count() const = 0;
  virtual const std::vector<std::vector<int>>& chains() const = 0;
};

// Lowest chain whose members are all comparable with the item.
class FirstFitPartitioner : public IOnlinePartitioner {
 public:
  explicit FirstFitPartitioner(LessFn less) : less_(std::move(less)) {}
  int assign(int item) override;
  int chain_count() const override { return static_cast<int>(chains_.size()); }
  const std::vector<std::vector<int>>& chains() const override { return chains_; }

 private:
  LessFn less_;
  std::vector<std::vector<int>> chains_;
};

// Accepts only maximal-at-presentation items (throws std::invalid_argument
// otherwise). Backed by First-Fit; the C(w+1,2) bound is monitored by the
// caller, not enforced here.
class UpGrowingPartitioner : public IOnlinePartitioner {
 public:
  explicit UpGrowingPartitioner(LessFn less);
  int assign(int item) override;
  int chain_count() const override { return ff_.chain_count(); }
  const std::vector<std::vector<int>>& chains() const override { return ff_.chains(); }

 private:
  LessFn less_;
  FirstFitPartitioner ff_;
  std::vector<int> seen_;
};

// Order-reversal wrapper around the up-growing partitioner; accepts only
// minimal-at-presentation items.
class DownGrowingPartitioner : public IOnlinePartitioner {
 public:
  explicit DownGrowingPartitioner(LessFn less);
  int assign(int item) override { return up_->assign(item); }
  int chain_count() const override { return up_->chain_count(); }
  const std::vector<std::vector<int>>& chains() const override { return up_->chains(); }

 private:
  std::unique_ptr<UpGrowingPartitioner> up_;
};

using PartitionerFactory = std::function<std::unique_ptr<IOnlinePartitioner>(LessFn)>;

// The pluggable partitioner used for the registry posets; First-Fit by default.
PartitionerFactory default_general_partitioner();

}  // namespace chainpart
