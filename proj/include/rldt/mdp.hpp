#pragma once

// The episodic query/report MDP. A state is the set of feature values
// observed so far for the current point; a report ends the episode.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rldt/schema.hpp"

namespace rldt {

struct Observation {
  int feature = 0;
  int value = 0;

  auto operator<=>(const Observation&) const = default;
};

/// Known (feature, value) pairs, kept sorted by feature index so that any
/// query order reaching the same configuration yields the same state.
class State {
 public:
  State() = default;
  /// Sorts the pairs; throws std::invalid_argument on a repeated feature.
  explicit State(std::vector<Observation> known);

  std::size_t depth() const { return known_.size(); }
  bool empty() const { return known_.empty(); }
  bool knows(int feature) const;
  std::span<const Observation> known() const { return known_; }

  /// This state plus one more observation. Throws std::logic_error if the
  /// feature is already known.
  State with(Observation obs) const;

  /// Stable text form `j1=v1,j2=v2,...`; the empty state is "".
  std::string key() const;
  static State parse(std::string_view key);

  /// Throws std::invalid_argument if an index or value falls outside the schema.
  void check(const FeatureSchema& schema) const;

  bool operator==(const State&) const = default;
  auto operator<=>(const State&) const = default;

  std::size_t hash() const;

 private:
  std::vector<Observation> known_;
};

struct StateHash {
  std::size_t operator()(const State& s) const { return s.hash(); }
};

/// Query(feature j) or Report(class k).
class Action {
 public:
  enum class Kind : std::uint8_t { kQuery, kReport };

  static constexpr Action query(int feature) { return Action(Kind::kQuery, feature); }
  static constexpr Action report(int cls) { return Action(Kind::kReport, cls); }

  constexpr Kind kind() const { return kind_; }
  constexpr int index() const { return index_; }
  constexpr bool is_query() const { return kind_ == Kind::kQuery; }
  constexpr bool is_report() const { return kind_ == Kind::kReport; }

  /// Position in the d + K value vector: queries first, then reports. This is
  /// also the deterministic tie-break order.
  constexpr int slot(int num_features) const {
    return is_query() ? index_ : num_features + index_;
  }
  static constexpr Action from_slot(int slot, int num_features) {
    return slot < num_features ? query(slot) : report(slot - num_features);
  }

  /// "F3" for Query(3), "R1" for Report(1).
  std::string to_string() const;
  static Action parse(std::string_view text);

  bool operator==(const Action&) const = default;

 private:
  constexpr Action(Kind kind, int index) : kind_(kind), index_(index) {}
  Kind kind_;
  int index_;
};

/// gamma, per-class report rewards and per-feature query costs.
struct RewardParams {
  double gamma = 0.8;
  std::vector<double> r_plus;   // length K
  std::vector<double> r_minus;  // length K
  std::vector<double> query_costs;  // length d

  /// Scalar rewards broadcast to every class.
  static RewardParams uniform(const FeatureSchema& schema, double gamma, double r_plus,
                              double r_minus);
  /// Throws std::invalid_argument on any broken invariant.
  void check(const FeatureSchema& schema) const;
};

/// Queries for every unknown feature (only while depth < max_queries), then
/// every report, both ascending.
std::vector<Action> allowed_actions(const State& s, const FeatureSchema& schema, int max_queries);

bool is_allowed(const State& s, Action a, const FeatureSchema& schema, int max_queries);

/// Observe feature `a.index()` of `x`. Throws std::logic_error for a report
/// action or an already known feature.
State transition(const State& s, Action a, const LabeledInstance& x);

double query_reward(int feature, const RewardParams& params);
double report_reward(int reported, int y_true, const RewardParams& params);

}  // namespace rldt
