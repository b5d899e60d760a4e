#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <set>
#include <sstream>

#include "rldt/eval.hpp"
#include "rldt/learner.hpp"
#include "helpers.hpp"

using namespace rldt;

namespace {

UpdateRule rule_for(const FeatureSchema& s, double alpha = 0.1, int max_queries = 3) {
  AgentConfig cfg;
  cfg.alpha = {alpha};
  cfg.max_queries = max_queries;
  return UpdateRule::from(s, cfg);
}

QTable table_for(const FeatureSchema& s, int max_queries = 3) {
  return QTable(QTableLayout{s.num_features(), s.num_classes(), max_queries, 8.0, 0.0});
}

std::vector<Observation> obs(std::initializer_list<Observation> o) { return o; }

}  // namespace

TEST_CASE("epsilon 0 is greedy") {
  const auto s = test::binary_schema(3);
  AgentConfig cfg;
  cfg.epsilon = 0.0;
  Learner l(s, cfg);
  for (int i = 0; i < 20; ++i) CHECK(l.select_action(State()) == Action::query(0));
}

TEST_CASE("epsilon 1 with truncation explores queries only") {
  const auto s = test::binary_schema(4);
  AgentConfig cfg;
  cfg.epsilon = 1.0;
  cfg.max_queries = 2;
  Learner l(s, cfg);
  // Make reports look best so any query choice comes from exploration.
  l.table().update(State(), Action::report(1), 100.0, 1.0);
  std::set<int> seen;
  for (int i = 0; i < 200; ++i) {
    const auto a = l.select_action(State());
    CHECK(a.is_query());
    seen.insert(a.index());
  }
  CHECK(seen.size() == 4);
  const State full({{0, 0}, {1, 1}});
  for (int i = 0; i < 20; ++i) CHECK(l.select_action(full) == Action::report(0));
}

TEST_CASE("epsilon 1 without truncation can explore reports") {
  const auto s = test::binary_schema(1);
  AgentConfig cfg;
  cfg.epsilon = 1.0;
  cfg.truncated_exploration = false;
  Learner l(s, cfg);
  bool report = false;
  for (int i = 0; i < 100; ++i) report = report || l.select_action(State()).is_report();
  CHECK(report);
}

TEST_CASE("zero query limit gives one report step") {
  const auto s = test::binary_schema(3);
  AgentConfig cfg;
  cfg.max_queries = 0;
  Learner l(s, cfg);
  const auto t = l.run_episode({{0, 1, 0}, 1});
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].action.is_report());
  CHECK(t.n_queries == 0);
}

TEST_CASE("fresh defaults query three times then report") {
  const auto s = test::binary_schema(5);
  Learner l(s, AgentConfig{});
  const auto t = l.run_episode({{0, 1, 0, 1, 1}, 0});
  CHECK(t.n_queries == 3);
  REQUIRE(t.steps.size() == 4);
  CHECK(t.steps.back().action.is_report());
  CHECK(t.queried.size() == 3);
}

TEST_CASE("episode return is the discounted sum") {
  const auto s = test::binary_schema(2);
  AgentConfig cfg;
  cfg.epsilon = 0.0;
  cfg.max_queries = 2;
  Learner l(s, cfg);
  // Fresh table: F0, F1, then Report(0) at the limit; the label is 0.
  const auto t = l.run_episode({{1, 1}, 0});
  REQUIRE(t.n_queries == 2);
  CHECK(t.correct());
  CHECK(t.return_ == doctest::Approx(3.2));
  double sum = 0, disc = 1;
  for (const auto& st : t.steps) {
    sum += disc * st.reward;
    disc *= 0.8;
  }
  CHECK(t.return_ == doctest::Approx(sum));
}

TEST_CASE("run_episode does not write the table") {
  const auto s = test::binary_schema(3);
  Learner l(s, AgentConfig{});
  l.run_episode({{0, 1, 0}, 1});
  CHECK(l.table().version() == 0);
}

TEST_CASE("report updates") {
  SUBCASE("three classes, full step") {
    std::vector<Feature> fs{{"a", 2, {}}};
    const FeatureSchema s(fs, 3);
    auto q = table_for(s);
    update_report_actions(State(), 1, q, rule_for(s, 1.0));
    CHECK(q.get(State(), Action::report(0)) == -5.0);
    CHECK(q.get(State(), Action::report(1)) == 5.0);
    CHECK(q.get(State(), Action::report(2)) == -5.0);
  }
  SUBCASE("half step") {
    const auto s = test::binary_schema(1);
    auto q = table_for(s);
    update_report_actions(State(), 0, q, rule_for(s, 0.5));
    CHECK(q.get(State(), Action::report(0)) == 2.5);
    CHECK(q.get(State(), Action::report(1)) == -2.5);
  }
  SUBCASE("per-class rates") {
    const auto s = test::binary_schema(1);
    AgentConfig cfg;
    cfg.alpha = {0.1, 1.0};
    const auto rule = UpdateRule::from(s, cfg);
    auto q = table_for(s);
    update_report_actions(State(), 1, q, rule);
    CHECK(q.get(State(), Action::report(0)) == doctest::Approx(-0.5));
    CHECK(q.get(State(), Action::report(1)) == doctest::Approx(5.0));
  }
}

TEST_CASE("single path update counts") {
  const auto s = test::binary_schema(3);
  Learner l(s, AgentConfig{});
  SUBCASE("no queries") {
    EpisodeTrace t;
    t.steps.push_back({State(), Action::report(0), 5.0});
    t.y_true = 0;
    auto q = table_for(s);
    update_single_path(t, q, l.rule());
    CHECK(q.version() == 2);
  }
  SUBCASE("one query") {
    EpisodeTrace t;
    t.steps.push_back({State(), Action::query(1), 0.0});
    t.steps.push_back({State({{1, 0}}), Action::report(0), 5.0});
    t.queried = {{1, 0}};
    t.y_true = 0;
    auto q = table_for(s);
    update_single_path(t, q, l.rule());
    CHECK(q.version() == 5);
  }
}

TEST_CASE("single path reads the freshly updated next state") {
  const auto s = test::binary_schema(2);
  EpisodeTrace t;
  t.steps.push_back({State(), Action::query(0), 0.0});
  t.steps.push_back({State({{0, 1}}), Action::report(1), 5.0});
  t.queried = {{0, 1}};
  t.y_true = 1;
  auto q = table_for(s, 1);
  update_single_path(t, q, rule_for(s, 1.0, 1));
  // Child reports are 5 / -5 after the full step; target = 0.8 * 5.
  CHECK(q.get(State(), Action::query(0)) == doctest::Approx(4.0));
}

TEST_CASE("multipath full pair counts") {
  const auto s = test::binary_schema(4);
  const auto rule = rule_for(s);
  SUBCASE("m = 2") {
    auto q = table_for(s);
    update_multipath_full(obs({{0, 1}, {2, 0}}), 1, q, rule);
    CHECK(q.version() == 12);
    CHECK(q.materialized_entries() == 12);
  }
  SUBCASE("m = 3") {
    auto q = table_for(s);
    update_multipath_full(obs({{0, 1}, {2, 0}, {3, 1}}), 1, q, rule);
    CHECK(q.version() == 28);
    CHECK(q.materialized_entries() == 28);
  }
  SUBCASE("m = 0 equals a report update at s0") {
    auto a = table_for(s);
    auto b = table_for(s);
    update_multipath_full({}, 0, a, rule);
    update_report_actions(State(), 0, b, rule);
    CHECK(test::counts(a) == test::counts(b));
  }
}

TEST_CASE("multipath full reads deeper values first") {
  const auto s = test::binary_schema(2);
  auto q = table_for(s, 2);
  update_multipath_full(obs({{0, 1}, {1, 0}}), 0, q, rule_for(s, 1.0, 2));
  // Depth-2 reports become 5, depth-1 query targets 0.8 * 5, the root sees 0.8 * 8 only if stale.
  CHECK(q.get(State({{0, 1}}), Action::query(1)) == doctest::Approx(4.0));
  CHECK(q.get(State(), Action::query(0)) == doctest::Approx(0.8 * 5.0));
}

TEST_CASE("multipath sampled single path counts") {
  const auto s = test::binary_schema(4);
  auto q = table_for(s);
  Rng rng(3);
  update_multipath_sampled(obs({{0, 1}, {2, 0}, {3, 1}}), 0, q, rule_for(s), 1, rng);
  CHECK(q.version() == 3 + 4 * 2);
}

TEST_CASE("multipath sampled with many paths matches the full update") {
  const auto s = test::binary_schema(3);
  auto full = table_for(s);
  auto sampled = table_for(s);
  update_multipath_full(obs({{0, 1}, {2, 0}}), 1, full, rule_for(s));
  Rng rng(11);
  update_multipath_sampled(obs({{0, 1}, {2, 0}}), 1, sampled, rule_for(s), 10, rng);
  CHECK(test::counts(full) == test::counts(sampled));
}

TEST_CASE("multipath sampled never updates a pair twice") {
  const auto s = test::binary_schema(4);
  for (int seed = 0; seed < 20; ++seed) {
    auto q = table_for(s);
    Rng rng(seed);
    update_multipath_sampled(obs({{0, 1}, {1, 0}, {3, 1}}), 0, q, rule_for(s), 12, rng);
    for (const auto& [pair, count] : test::counts(q)) CHECK(count == 1);
  }
}

TEST_CASE("multipath rejects too many queries") {
  const auto s = test::binary_schema(4);
  auto q = table_for(s, 1);
  CHECK_THROWS_AS(update_multipath_full(obs({{0, 1}, {1, 0}}), 0, q, rule_for(s, 0.1, 1)),
                  std::invalid_argument);
}

TEST_CASE("update modes agree on zero-query episodes") {
  const auto s = test::binary_schema(2);
  AgentConfig base;
  base.max_queries = 0;
  std::vector<std::string> dumps;
  for (auto mode : {UpdateMode::kSinglePath, UpdateMode::kMultipathFull, UpdateMode::kMultipathSampled}) {
    AgentConfig cfg = base;
    cfg.update_mode = mode;
    Learner l(s, cfg);
    for (int i = 0; i < 50; ++i) l.observe({{i % 2, (i / 2) % 2}, (i / 3) % 2});
    std::ostringstream out;
    l.table().write(out);
    dumps.push_back(out.str());
  }
  CHECK(dumps[0] == dumps[1]);
  CHECK(dumps[1] == dumps[2]);
}

TEST_CASE("frozen learner leaves the table alone") {
  const auto s = test::binary_schema(2);
  AgentConfig cfg;
  cfg.alpha = {0.0};
  Learner l(s, cfg);
  l.observe({{0, 1}, 1});
  CHECK(l.table().version() == 0);
}

TEST_CASE("fresh table at zero queries extracts a single leaf") {
  const auto s = test::binary_schema(2);
  const auto q = table_for(s, 0);
  const auto tree = extract_policy_tree(q, s, 0);
  REQUIRE(tree.size() == 1);
  CHECK(tree.root().is_leaf());
  CHECK(tree.root().label == 0);
}

TEST_CASE("converged tree on label = x0") {
  const auto s = test::binary_schema(3);
  const auto rule = LabelRule::copy_feature(s, 0);
  const auto stream = synth_drift_stream(s, rule, rule, 2999, 3000, 4);
  Learner l(s, AgentConfig{});
  for (std::size_t t = 0; t < stream.size(); ++t) l.observe(stream[t]);
  const auto tree = extract_policy_tree(l.table(), s, 3);
  REQUIRE_FALSE(tree.root().is_leaf());
  CHECK(tree.root().feature == 0);
  const auto& left = tree.node(tree.root().children[0]);
  const auto& right = tree.node(tree.root().children[1]);
  CHECK(left.is_leaf());
  CHECK(right.is_leaf());
  CHECK(left.label == 0);
  CHECK(right.label == 1);
  CHECK(tree.depth() <= 3);
  CHECK(tree.paths_have_unique_features());
}

TEST_CASE("learner is reproducible from its seed") {
  const auto s = test::binary_schema(4);
  const auto rule = LabelRule::parse("x1=1&x2=1:1;*:0");
  const auto stream = synth_drift_stream(s, rule, rule, 499, 500, 8);
  auto run = [&](UpdateMode mode) {
    AgentConfig cfg;
    cfg.update_mode = mode;
    cfg.num_paths = 2;
    cfg.epsilon = 0.2;
    Learner l(s, cfg);
    for (std::size_t t = 0; t < stream.size(); ++t) l.observe(stream[t]);
    std::ostringstream out;
    l.table().write(out);
    return out.str();
  };
  for (auto mode : {UpdateMode::kSinglePath, UpdateMode::kMultipathFull, UpdateMode::kMultipathSampled}) {
    CHECK(run(mode) == run(mode));
  }
}

TEST_CASE("querying a revealing feature beats reporting when gamma is 1") {
  std::vector<Feature> fs{{"x0", 2, {}}};
  const FeatureSchema s(fs, 2);
  AgentConfig cfg;
  cfg.gamma = 1.0;
  cfg.max_queries = 1;
  cfg.alpha = {0.05};
  const auto rule = LabelRule::copy_feature(s, 0);
  const auto stream = synth_drift_stream(s, rule, rule, 3999, 4000, 2);
  Learner l(s, cfg);
  for (std::size_t t = 0; t < stream.size(); ++t) l.observe(stream[t]);
  CHECK(l.table().get(State(), Action::query(0)) > l.table().best_report(State()).second);
}

TEST_CASE("query cost suppresses queries") {
  const auto s = test::binary_schema(3);
  const auto rule = LabelRule::parse("x0=1&x1=1:1;*:0");
  std::vector<double> mean_queries;
  for (double cost : {0.0, 1.0, 3.0}) {
    double total = 0;
    for (int seed = 0; seed < 10; ++seed) {
      AgentConfig cfg;
      cfg.query_costs = {cost};
      cfg.seed = 100 + seed;
      const auto stream = synth_drift_stream(s, rule, rule, 2999, 3000, 50 + seed);
      const auto m = prequential_run(stream, s, cfg);
      total += m.mean(2000, 3000).queries;
    }
    mean_queries.push_back(total / 10);
  }
  CHECK(mean_queries[0] >= mean_queries[1]);
  CHECK(mean_queries[1] >= mean_queries[2]);
  CHECK(mean_queries[2] < mean_queries[0]);
}

TEST_CASE("config validation") {
  const auto s = test::binary_schema(2);
  AgentConfig cfg;
  cfg.gamma = 1.5;
  CHECK_THROWS_AS(Learner(s, cfg), std::invalid_argument);
  cfg = {};
  cfg.alpha = {0.1, 0.2, 0.3};
  CHECK_THROWS_AS(Learner(s, cfg), std::invalid_argument);
  cfg = {};
  cfg.max_queries = -1;
  CHECK_THROWS_AS(Learner(s, cfg), std::invalid_argument);
  cfg = {};
  cfg.q_optimistic = 1.0;
  CHECK_FALSE(cfg.validate(s).empty());
  UpdateMode mode{};
  int paths = 0;
  parse_update_mode("sampled:4", mode, paths);
  CHECK(mode == UpdateMode::kMultipathSampled);
  CHECK(paths == 4);
  CHECK(update_mode_name(mode, paths) == "sampled:4");
  CHECK_THROWS_AS(parse_update_mode("sampled:0", mode, paths), std::invalid_argument);
  CHECK_THROWS_AS(parse_update_mode("both", mode, paths), std::invalid_argument);
}
