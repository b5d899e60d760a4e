#include <doctest.h>

#include <stdexcept>

#include <numeric>

#include "rldt/baseline.hpp"
#include "rldt/random.hpp"
#include "helpers.hpp"

using namespace rldt;

namespace {

std::vector<LabeledInstance> xor_data() {
  return {{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

std::vector<LabeledInstance> fuzz_data(const FeatureSchema& s, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledInstance> out;
  for (int i = 0; i < n; ++i) {
    LabeledInstance x;
    for (int j = 0; j < s.num_features(); ++j) {
      x.values.push_back(static_cast<int>(uniform_index(rng, s.arity(j))));
    }
    x.label = static_cast<int>(uniform_index(rng, s.num_classes()));
    out.push_back(x);
  }
  return out;
}

// Checks gain optimality at every split by recomputing on the rows that reach it.
void check_gains(const DecisionTree& tree, int node, const std::vector<LabeledInstance>& data,
                 const std::vector<std::size_t>& rows, const FeatureSchema& s,
                 std::vector<bool>& used) {
  const auto& n = tree.node(node);
  if (n.is_leaf() || rows.empty()) return;
  const double chosen = information_gain(data, rows, n.feature, s);
  CHECK(chosen >= -1e-12);
  for (int j = 0; j < s.num_features(); ++j) {
    if (!used[j]) CHECK(chosen >= information_gain(data, rows, j, s) - 1e-12);
  }
  used[n.feature] = true;
  for (int v = 0; v < s.arity(n.feature); ++v) {
    std::vector<std::size_t> sub;
    for (auto i : rows) {
      if (data[i].values[n.feature] == v) sub.push_back(i);
    }
    check_gains(tree, n.children[v], data, sub, s, used);
  }
  used[n.feature] = false;
}

}  // namespace

TEST_CASE("entropy in bits") {
  const std::vector<long> even{2, 2};
  const std::vector<long> pure{4, 0};
  CHECK(entropy(even) == doctest::Approx(1.0));
  CHECK(entropy(pure) == 0.0);
}

TEST_CASE("label = x0 splits on feature 0") {
  const auto s = test::binary_schema(3);
  std::vector<LabeledInstance> data;
  for (int i = 0; i < 8; ++i) data.push_back({{i & 1, (i >> 1) & 1, (i >> 2) & 1}, i & 1});
  const auto tree = greedy_train(data, s, 1);
  CHECK(tree.root().feature == 0);
  CHECK(tree_accuracy(tree, data, all_rows(data.size())) == 1.0);
}

TEST_CASE("xor needs depth 2") {
  const auto s = test::binary_schema(2);
  const auto data = xor_data();
  const auto rows = all_rows(4);
  CHECK(tree_accuracy(greedy_train(data, s, 1), data, rows) == 0.5);
  const auto deep = greedy_train(data, s, 2);
  CHECK(tree_accuracy(deep, data, rows) == 1.0);
  for (const auto& x : data) CHECK(tree_predict(deep, x) == x.label);
}

TEST_CASE("pure data gives one leaf") {
  const auto s = test::binary_schema(2);
  const std::vector<LabeledInstance> data{{{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 1}};
  for (int depth : {0, 1, 5}) {
    const auto tree = greedy_train(data, s, depth);
    CHECK(tree.size() == 1);
    CHECK(tree.root().label == 1);
  }
}

TEST_CASE("depth 0 is the majority class") {
  const auto s = test::binary_schema(2);
  const auto data = fuzz_data(s, 101, 4);
  const auto rows = all_rows(data.size());
  const auto tree = greedy_train(data, s, 0);
  CHECK(tree.root().is_leaf());
  CHECK(tree.root().label == majority_class(data, rows, 2));
}

TEST_CASE("unseen values fall back to the node majority") {
  std::vector<Feature> fs{{"a", 3, {}}};
  const FeatureSchema s(fs, 2);
  const std::vector<LabeledInstance> data{{{0}, 1}, {{0}, 1}, {{1}, 0}};
  const auto tree = greedy_train(data, s, 1);
  CHECK(tree_predict(tree, {{2}, 0}) == 1);
  CHECK_THROWS_AS(greedy_train({}, s, 1), std::invalid_argument);
}

TEST_CASE("fuzzed trees respect depth and gain order") {
  std::vector<Feature> fs{{"a", 3, {}}, {"b", 2, {}}, {"c", 4, {}}, {"d", 2, {}}};
  const FeatureSchema s(fs, 3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = fuzz_data(s, 60, seed);
    const auto rows = all_rows(data.size());
    double previous = 0.0;
    for (int depth = 0; depth <= 4; ++depth) {
      const auto tree = greedy_train(data, s, depth);
      CHECK(tree.depth() <= depth);
      CHECK(tree.paths_have_unique_features());
      std::vector<bool> used(4, false);
      check_gains(tree, 0, data, rows, s, used);
      const double acc = tree_accuracy(tree, data, rows);
      CHECK(acc >= previous - 1e-12);
      previous = acc;
    }
  }
}

TEST_CASE("cross-validated baseline report") {
  const auto s = test::binary_schema(3);
  std::vector<LabeledInstance> data;
  for (int i = 0; i < 40; ++i) data.push_back({{i & 1, (i >> 1) & 1, (i >> 2) & 1}, i & 1});
  const auto r = cross_validate_greedy(data, s, 1, 5, 3);
  CHECK(r.fold_accuracy.size() == 5);
  CHECK(r.accuracy.mean == 1.0);
  CHECK(r.accuracy.half_width == 0.0);
}
