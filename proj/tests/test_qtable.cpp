#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "rldt/qtable.hpp"
#include "rldt/random.hpp"
#include "helpers.hpp"

using namespace rldt;

namespace {
QTable fresh(int d = 3, int k = 2, int max_queries = 3) {
  return QTable(QTableLayout{d, k, max_queries, 8.0, 0.0});
}
}  // namespace

TEST_CASE("defaults: optimistic queries, zero reports") {
  const auto q = fresh();
  CHECK(q.get(State(), Action::query(1)) == 8.0);
  CHECK(q.get(State(), Action::report(0)) == 0.0);
  CHECK(q.materialized_entries() == 0);
}

TEST_CASE("update arithmetic") {
  auto q = fresh();
  CHECK(q.update(State(), Action::query(0), 5.0, 0.1) == doctest::Approx(7.7));
  CHECK(q.update(State(), Action::report(1), 5.0, 1.0) == 5.0);
  CHECK(q.update_count(State(), Action::query(0)) == 1);
  CHECK(q.version() == 2);
  CHECK(q.contains(State()));
}

TEST_CASE("max prefers the optimistic query below the limit") {
  const auto q = fresh();
  const auto [a, v] = q.best(State());
  CHECK(a == Action::query(0));
  CHECK(v == 8.0);
}

TEST_CASE("max at the limit breaks report ties by index") {
  const auto q = fresh(3, 2, 1);
  const auto [a, v] = q.best(State({{2, 1}}));
  CHECK(a == Action::report(0));
  CHECK(v == 0.0);
}

TEST_CASE("max over given values") {
  auto q = fresh(2, 2, 3);
  const State s({{0, 1}});
  q.update(s, Action::query(1), 2.0, 1.0);
  q.update(s, Action::report(0), 3.0, 1.0);
  q.update(s, Action::report(1), -5.0, 1.0);
  const auto [a, v] = q.best(s);
  CHECK(a == Action::report(0));
  CHECK(v == 3.0);
}

TEST_CASE("disallowed actions throw") {
  auto q = fresh(3, 2, 1);
  CHECK_THROWS_AS(q.get(State({{0, 0}}), Action::query(0)), std::logic_error);
  CHECK_THROWS_AS(q.update(State({{0, 0}}), Action::query(1), 1.0, 0.1), std::logic_error);
  CHECK_THROWS_AS(q.get(State(), Action::report(2)), std::logic_error);
}

TEST_CASE("constant-alpha average tracks the target mean") {
  auto q = fresh();
  Rng rng(5);
  double sum = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double target = uniform01(rng) < 0.7 ? 5.0 : -5.0;
    sum += target;
    q.update(State(), Action::report(0), target, 0.01);
  }
  // Stationary sd of the estimate is sd(target) * sqrt(alpha / (2 - alpha)), about 0.33.
  CHECK(std::abs(q.get(State(), Action::report(0)) - sum / n) < 1.0);
}

TEST_CASE("dump round trip") {
  auto q = fresh();
  q.update(State(), Action::query(2), 1.25, 0.5);
  q.update(State({{2, 1}}), Action::report(1), 5.0, 0.1);
  q.update(State({{0, 0}, {2, 1}}), Action::report(0), -5.0, 0.3);
  std::ostringstream a;
  q.write(a);
  std::istringstream in(a.str());
  const auto back = QTable::read(in);
  std::ostringstream b;
  back.write(b);
  CHECK(a.str() == b.str());
  CHECK(back.layout() == q.layout());
  CHECK(back.get(State({{2, 1}}), Action::report(1)) == q.get(State({{2, 1}}), Action::report(1)));
  CHECK(back.update_count(State(), Action::query(2)) == 1);
}

TEST_CASE("empty table dumps only the layout line") {
  std::ostringstream out;
  fresh().write(out);
  const std::string text = out.str();
  CHECK(text.front() == '#');
  CHECK(text.find('\n') == text.size() - 1);
}

TEST_CASE("corrupt dumps are rejected") {
  std::istringstream none("F0\t1\t1\n");
  CHECK_THROWS(QTable::read(none));
  std::istringstream bad_action(
      "# rldt-qtable features=2 classes=2 max_queries=3 q_optimistic=8 r_init=0\n\tZ0\t1\t1\n");
  CHECK_THROWS(QTable::read(bad_action));
}
