#include "rldt/learner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace rldt {

UpdateRule UpdateRule::from(const FeatureSchema& schema, const AgentConfig& cfg) {
  UpdateRule rule;
  rule.reward = cfg.reward_params(schema);
  rule.alpha = cfg.alpha_per_class(schema.num_classes());
  rule.max_queries = cfg.max_queries;
  return rule;
}

void update_report_actions(const State& s, int y_true, QTable& q, const UpdateRule& rule) {
  const int classes = static_cast<int>(rule.alpha.size());
  for (int k = 0; k < classes; ++k) {
    q.update(s, Action::report(k), rule.report_target(k, y_true), rule.report_alpha(k));
  }
}

namespace {

double query_target(const State& child, int feature, const QTable& q, const UpdateRule& rule) {
  return query_reward(feature, rule.reward) + rule.reward.gamma * q.best(child).second;
}

State subset_state(std::span<const Observation> queried, unsigned mask) {
  std::vector<Observation> known;
  for (std::size_t i = 0; i < queried.size(); ++i) {
    if (mask & (1u << i)) known.push_back(queried[i]);
  }
  return State(std::move(known));
}

}  // namespace

void update_single_path(const EpisodeTrace& trace, QTable& q, const UpdateRule& rule) {
  if (trace.steps.empty() || !trace.steps.back().action.is_report()) {
    throw std::invalid_argument("update_single_path: trace must end with a report");
  }
  const auto& steps = trace.steps;
  update_report_actions(steps.back().state, trace.y_true, q, rule);
  for (std::size_t i = steps.size() - 1; i-- > 0;) {
    const Step& step = steps[i];
    const State& next = steps[i + 1].state;
    const double target = step.reward + rule.reward.gamma * q.best(next).second;
    q.update(step.state, step.action, target, rule.query_alpha(trace.y_true));
    update_report_actions(step.state, trace.y_true, q, rule);
  }
}

void update_multipath_full(std::span<const Observation> queried, int y_true, QTable& q,
                           const UpdateRule& rule) {
  const auto m = queried.size();
  if (static_cast<int>(m) > rule.max_queries) {
    throw std::invalid_argument("update_multipath_full: more queries than max_queries");
  }
  if (m >= 31) throw std::invalid_argument("update_multipath_full: too many queries to enumerate");
  std::vector<unsigned> masks(1u << m);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) > std::popcount(b);
  });
  for (unsigned mask : masks) {
    const State s = subset_state(queried, mask);
    update_report_actions(s, y_true, q, rule);
    if (static_cast<int>(s.depth()) >= rule.max_queries) continue;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) continue;
      const State child = s.with(queried[i]);
      q.update(s, Action::query(queried[i].feature), query_target(child, queried[i].feature, q, rule),
               rule.query_alpha(y_true));
    }
  }
}

void update_multipath_sampled(std::span<const Observation> queried, int y_true, QTable& q,
                              const UpdateRule& rule, int num_paths, Rng& rng) {
  if (num_paths < 1) throw std::invalid_argument("update_multipath_sampled: num_paths must be >= 1");
  if (static_cast<int>(queried.size()) > rule.max_queries) {
    throw std::invalid_argument("update_multipath_sampled: more queries than max_queries");
  }
  // Visited (state, slot) pairs; reports at a state are updated as one group (slot -1).
  struct Key {
    State state;
    int slot;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return k.state.hash() * 31u + static_cast<std::size_t>(k.slot + 1);
    }
  };
  std::unordered_set<Key, KeyHash> visited;
  std::vector<Observation> order(queried.begin(), queried.end());
  const auto m = order.size();
  for (int p = 0; p < num_paths; ++p) {
    shuffle_in_place(std::span<Observation>(order), rng);
    std::vector<State> prefix(m + 1);
    for (std::size_t d = 0; d < m; ++d) prefix[d + 1] = prefix[d].with(order[d]);
    for (std::size_t d = m + 1; d-- > 0;) {
      if (d < m && visited.insert({prefix[d], order[d].feature}).second) {
        q.update(prefix[d], Action::query(order[d].feature),
                 query_target(prefix[d + 1], order[d].feature, q, rule), rule.query_alpha(y_true));
      }
      if (visited.insert({prefix[d], -1}).second) update_report_actions(prefix[d], y_true, q, rule);
    }
  }
}

Learner::Learner(FeatureSchema schema, AgentConfig cfg)
    : schema_(std::move(schema)), cfg_(std::move(cfg)), rng_(cfg_.seed) {
  cfg_.validate(schema_);
  rule_ = UpdateRule::from(schema_, cfg_);
  table_ = QTable(QTableLayout{schema_.num_features(), schema_.num_classes(), cfg_.max_queries,
                               cfg_.q_optimistic, cfg_.r_init});
}

void Learner::set_alpha(std::vector<double> alpha) {
  cfg_.alpha = std::move(alpha);
  rule_.alpha = cfg_.alpha_per_class(schema_.num_classes());
  for (double a : rule_.alpha) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
  }
}

Action Learner::select_action(const State& s) {
  const bool can_query = static_cast<int>(s.depth()) < cfg_.max_queries &&
                         static_cast<int>(s.depth()) < schema_.num_features();
  const double u = uniform01(rng_);
  if (u < cfg_.epsilon) {
    if (cfg_.truncated_exploration) {
      if (can_query) {
        const auto unknown = static_cast<std::uint64_t>(schema_.num_features()) - s.depth();
        auto pick = uniform_index(rng_, unknown);
        for (int j = 0; j < schema_.num_features(); ++j) {
          if (s.knows(j)) continue;
          if (pick-- == 0) return Action::query(j);
        }
      }
    } else {
      const auto allowed = allowed_actions(s, schema_, cfg_.max_queries);
      return allowed[uniform_index(rng_, allowed.size())];
    }
  }
  return table_.best(s).first;
}

EpisodeTrace Learner::rollout(const LabeledInstance& x,
                              const std::function<Action(const State&)>& choose) const {
  EpisodeTrace trace;
  trace.y_true = x.label;
  State s;
  double discount = 1.0;
  for (;;) {
    const Action a = choose(s);
    if (a.is_query()) {
      const double r = query_reward(a.index(), rule_.reward);
      trace.return_ += discount * r;
      trace.steps.push_back({s, a, r});
      trace.queried.push_back({a.index(), x.values[a.index()]});
      s = transition(s, a, x);
      ++trace.n_queries;
      discount *= rule_.reward.gamma;
    } else {
      const double r = report_reward(a.index(), x.label, rule_.reward);
      trace.return_ += discount * r;
      trace.steps.push_back({s, a, r});
      trace.reported = a.index();
      return trace;
    }
  }
}

EpisodeTrace Learner::run_episode(const LabeledInstance& x) {
  check_instance(schema_, x);
  return rollout(x, [this](const State& s) { return select_action(s); });
}

EpisodeTrace Learner::predict(const LabeledInstance& x) const {
  check_instance(schema_, x);
  return rollout(x, [this](const State& s) { return table_.best(s).first; });
}

void Learner::learn(const EpisodeTrace& trace) {
  // A frozen learner leaves the table, its counters and the RNG untouched.
  if (std::all_of(rule_.alpha.begin(), rule_.alpha.end(), [](double a) { return a == 0.0; })) {
    return;
  }
  switch (cfg_.update_mode) {
    case UpdateMode::kSinglePath:
      update_single_path(trace, table_, rule_);
      break;
    case UpdateMode::kMultipathFull:
      update_multipath_full(trace.queried, trace.y_true, table_, rule_);
      break;
    case UpdateMode::kMultipathSampled:
      update_multipath_sampled(trace.queried, trace.y_true, table_, rule_, cfg_.num_paths, rng_);
      break;
  }
}

EpisodeTrace Learner::observe(const LabeledInstance& x) {
  auto trace = run_episode(x);
  learn(trace);
  return trace;
}

DecisionTree extract_policy_tree(const QTable& q, const FeatureSchema& schema, int max_depth) {
  DecisionTree tree;
  const int limit = std::min(max_depth, q.layout().max_queries);
  std::function<int(const State&)> grow = [&](const State& s) -> int {
    const int fallback = q.best_report(s).first.index();
    if (!q.contains(s)) return tree.add_leaf(fallback);
    const Action a = static_cast<int>(s.depth()) < limit ? q.best(s).first : q.best_report(s).first;
    if (a.is_report()) return tree.add_leaf(a.index());
    const int node = tree.add_split(a.index(), fallback, schema.arity(a.index()));
    for (int v = 0; v < schema.arity(a.index()); ++v) {
      const int child = grow(s.with({a.index(), v}));
      tree.set_child(node, v, child);
    }
    return node;
  };
  grow(State{});
  return tree;
}

}  // namespace rldt
