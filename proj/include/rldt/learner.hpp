#pragma once

// Episodes and Q-learning updates. One episode per data point: query
// features until a report, then learn from the revealed label.

#include <functional>
#include <span>
#include <vector>

#include "rldt/config.hpp"
#include "rldt/mdp.hpp"
#include "rldt/qtable.hpp"
#include "rldt/random.hpp"
#include "rldt/schema.hpp"
#include "rldt/tree.hpp"

namespace rldt {

struct Step {
  State state;
  Action action;
  double reward = 0.0;
};

struct EpisodeTrace {
  std::vector<Step> steps;  // queries, then exactly one report
  std::vector<Observation> queried;
  int reported = 0;
  int y_true = 0;
  double return_ = 0.0;  // sum_t gamma^t r_t
  int n_queries = 0;

  bool correct() const { return reported == y_true; }
};

/// Everything the update routines need besides the table.
struct UpdateRule {
  RewardParams reward;
  std::vector<double> alpha;  // per class
  int max_queries = 0;

  static UpdateRule from(const FeatureSchema& schema, const AgentConfig& cfg);

  /// Report(k) learns at alpha[k]; queries learn at the point's class rate.
  double report_alpha(int k) const { return alpha[k]; }
  double query_alpha(int y_true) const { return alpha[y_true]; }
  double report_target(int k, int y_true) const { return report_reward(k, y_true, reward); }
};

/// One update per class at `s`: target r_plus[y] for the true label,
/// r_minus[k] for every other k.
void update_report_actions(const State& s, int y_true, QTable& q, const UpdateRule& rule);

/// Backward along the trajectory actually taken; report actions are
/// refreshed at every visited state.
void update_single_path(const EpisodeTrace& trace, QTable& q, const UpdateRule& rule);

/// Every subset of `queried`, deepest first. Each state-action pair reachable
/// by some reordering or truncation of the queries is updated exactly once.
void update_multipath_full(std::span<const Observation> queried, int y_true, QTable& q,
                           const UpdateRule& rule);

/// Prefix chains of `num_paths` random query orders, deepest prefix first,
/// with pairs already updated in this episode skipped.
void update_multipath_sampled(std::span<const Observation> queried, int y_true, QTable& q,
                              const UpdateRule& rule, int num_paths, Rng& rng);

/// Owns a Q-table and an RNG; single threaded.
///
/// RNG draw order per decision: one uniform in [0, 1) for the exploration
/// test, then one index draw if exploring. Sampled updates draw their
/// permutations after the episode ends.
class Learner {
 public:
  Learner(FeatureSchema schema, AgentConfig cfg);

  Action select_action(const State& s);
  /// Acts on `x` without touching the table.
  EpisodeTrace run_episode(const LabeledInstance& x);
  /// Applies the configured update mode to a finished episode.
  void learn(const EpisodeTrace& trace);
  EpisodeTrace observe(const LabeledInstance& x);

  /// Greedy prediction with no exploration and no learning.
  EpisodeTrace predict(const LabeledInstance& x) const;

  const FeatureSchema& schema() const { return schema_; }
  const AgentConfig& config() const { return cfg_; }
  const UpdateRule& rule() const { return rule_; }
  QTable& table() { return table_; }
  const QTable& table() const { return table_; }
  Rng& rng() { return rng_; }

  void set_alpha(std::vector<double> alpha);
  void set_epsilon(double epsilon) { cfg_.epsilon = epsilon; }

 private:
  EpisodeTrace rollout(const LabeledInstance& x,
                       const std::function<Action(const State&)>& choose) const;

  FeatureSchema schema_;
  AgentConfig cfg_;
  UpdateRule rule_;
  QTable table_;
  Rng rng_;
};

/// Greedy rollout from the empty state. A query becomes a split with one
/// child per value; a report becomes a leaf. States the table has never
/// written are leaves holding their default greedy report.
DecisionTree extract_policy_tree(const QTable& q, const FeatureSchema& schema, int max_depth);

}  // namespace rldt
