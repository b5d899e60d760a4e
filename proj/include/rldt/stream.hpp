#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rldt/schema.hpp"

namespace rldt {

/// A finite, replayable sequence of labeled points.
///
/// The points are shared and immutable; a stream only owns the order in which
/// they are visited, so many shuffled streams over one dataset are cheap.
class DataStream {
 public:
  DataStream() = default;
  DataStream(std::shared_ptr<const std::vector<LabeledInstance>> points,
             std::vector<std::size_t> order, std::uint64_t seed);

  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  const LabeledInstance& operator[](std::size_t t) const { return (*points_)[order_[t]]; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& order() const { return order_; }

 private:
  std::shared_ptr<const std::vector<LabeledInstance>> points_;
  std::vector<std::size_t> order_;
  std::uint64_t seed_ = 0;
};

/// Visits the points in their stored order (drift experiments must not shuffle).
DataStream ordered_stream(std::shared_ptr<const std::vector<LabeledInstance>> points);

/// A seed-determined permutation of the points. Throws on an empty dataset.
DataStream shuffle_stream(std::shared_ptr<const std::vector<LabeledInstance>> points,
                          std::uint64_t seed);

/// Deterministic labeling rule: ordered clauses, first match wins.
///
/// Text form: clauses separated by ';', each `cond&cond:label`, where a cond
/// is `x<j>=<v>` and `*` matches everything. Example: `x0=0:0;x0=1:1;*:0`.
class LabelRule {
 public:
  struct Clause {
    std::vector<std::pair<int, int>> conditions;  // (feature, value), all must hold
    int label = 0;
  };

  LabelRule() = default;
  LabelRule(std::vector<Clause> clauses, int fallback);

  /// label = x_j (feature arity must not exceed K).
  static LabelRule copy_feature(const FeatureSchema& schema, int j);
  /// label = (arity_j - 1) - x_j.
  static LabelRule flip_feature(const FeatureSchema& schema, int j);
  static LabelRule parse(std::string_view text);

  int operator()(const std::vector<int>& values) const;
  std::string to_string() const;
  /// Throws std::invalid_argument when a clause references something outside the schema.
  void check(const FeatureSchema& schema) const;

 private:
  std::vector<Clause> clauses_;
  int fallback_ = 0;
};

/// Features i.i.d. uniform over their arities; labels from `before` for
/// t < switch_at and from `after` from then on.
DataStream synth_drift_stream(const FeatureSchema& schema, const LabelRule& before,
                              const LabelRule& after, std::size_t switch_at,
                              std::size_t length, std::uint64_t seed);

/// Seed-shuffled indices 0..n-1 cut into `folds` contiguous folds whose
/// sizes differ by at most one. Throws if folds < 2 or folds > n.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int folds, std::uint64_t seed);

}  // namespace rldt
