#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rldt/mdp.hpp"

namespace rldt {

struct QTableLayout {
  int num_features = 0;
  int num_classes = 0;
  int max_queries = 0;
  double q_optimistic = 8.0;  // default for unseen query actions
  double r_init = 0.0;        // default for unseen report actions

  bool operator==(const QTableLayout&) const = default;
};

/// Lazily materialized action values Q(s, a).
///
/// Unseen (state, action) pairs read as their defaults. A pair becomes
/// materialized on its first update; only materialized pairs are exported.
/// Reading or writing an action that is not allowed at the state throws
/// std::logic_error.
class QTable {
 public:
  QTable() = default;
  explicit QTable(QTableLayout layout);

  const QTableLayout& layout() const { return layout_; }

  double get(const State& s, Action a) const;
  std::uint32_t update_count(const State& s, Action a) const;

  /// Greedy action over `allowed` (non-empty); ties go to the earliest slot,
  /// i.e. queries ascending, then reports ascending.
  std::pair<Action, double> max(const State& s, std::span<const Action> allowed) const;
  /// Same, over every action allowed at `s` under the layout's query limit.
  std::pair<Action, double> best(const State& s) const;
  /// Greedy report only.
  std::pair<Action, double> best_report(const State& s) const;

  /// Q <- Q + alpha (target - Q); returns the new value.
  double update(const State& s, Action a, double target, double alpha);

  /// True once any action at `s` has been written.
  bool contains(const State& s) const { return rows_.count(s) != 0; }
  std::size_t materialized_states() const { return rows_.size(); }
  std::size_t materialized_entries() const { return entries_; }
  /// Total number of update() calls; used to check that acting never writes.
  std::uint64_t version() const { return version_; }

  /// `state_key<TAB>action<TAB>value<TAB>update_count` per materialized pair,
  /// states in lexicographic key order, actions in slot order. A leading
  /// `#` line records the layout.
  void write(std::ostream& out) const;
  static QTable read(std::istream& in);

 private:
  struct Row {
    std::vector<double> value;
    std::vector<std::uint32_t> count;
  };

  void check_allowed(const State& s, Action a) const;
  double default_for(Action a) const;
  int slots() const { return layout_.num_features + layout_.num_classes; }

  QTableLayout layout_;
  std::unordered_map<State, Row, StateHash> rows_;
  std::size_t entries_ = 0;
  std::uint64_t version_ = 0;
};

}  // namespace rldt
