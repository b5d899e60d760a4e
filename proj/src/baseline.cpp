#include "rldt/baseline.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rldt/stream.hpp"

namespace rldt {

double entropy(std::span<const long> counts) {
  long total = 0;
  for (long c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (long c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

std::vector<long> class_counts(const std::vector<LabeledInstance>& data,
                               std::span<const std::size_t> rows, int num_classes) {
  std::vector<long> counts(num_classes, 0);
  for (auto i : rows) ++counts.at(data[i].label);
  return counts;
}

int argmax(const std::vector<long>& counts) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(counts.size()); ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return best;
}

struct Builder {
  const std::vector<LabeledInstance>& data;
  const FeatureSchema& schema;
  int max_depth;
  DecisionTree tree;

  int build(const std::vector<std::size_t>& rows, std::vector<bool>& used, int depth,
            int parent_majority) {
    if (rows.empty()) return tree.add_leaf(parent_majority);
    const auto counts = class_counts(data, rows, schema.num_classes());
    const int majority = argmax(counts);
    const bool pure = counts[majority] == static_cast<long>(rows.size());
    if (pure || depth >= max_depth) return tree.add_leaf(majority);

    int best = -1;
    double best_gain = 0.0;
    for (int j = 0; j < schema.num_features(); ++j) {
      if (used[j]) continue;
      const double g = information_gain(data, rows, j, schema);
      if (best < 0 || g > best_gain) {
        best = j;
        best_gain = g;
      }
    }
    if (best < 0) return tree.add_leaf(majority);

    const int arity = schema.arity(best);
    std::vector<std::vector<std::size_t>> parts(arity);
    for (auto i : rows) parts.at(data[i].values[best]).push_back(i);
    const int node = tree.add_split(best, majority, arity);
    used[best] = true;
    for (int v = 0; v < arity; ++v) {
      const int child = build(parts[v], used, depth + 1, majority);
      tree.set_child(node, v, child);
    }
    used[best] = false;
    return node;
  }
};

}  // namespace

double information_gain(const std::vector<LabeledInstance>& data,
                        std::span<const std::size_t> rows, int j, const FeatureSchema& schema) {
  if (rows.empty()) return 0.0;
  const int K = schema.num_classes();
  const auto parent = class_counts(data, rows, K);
  std::vector<std::vector<long>> split(schema.arity(j), std::vector<long>(K, 0));
  for (auto i : rows) ++split.at(data[i].values[j]).at(data[i].label);
  double remainder = 0.0;
  const auto n = static_cast<double>(rows.size());
  for (const auto& part : split) {
    const long size = std::accumulate(part.begin(), part.end(), 0L);
    if (size) remainder += static_cast<double>(size) / n * entropy(part);
  }
  return entropy(parent) - remainder;
}

DecisionTree greedy_train(const std::vector<LabeledInstance>& data,
                          std::span<const std::size_t> rows, const FeatureSchema& schema,
                          int max_depth) {
  if (rows.empty()) throw std::invalid_argument("greedy_train: empty training set");
  if (max_depth < 0) throw std::invalid_argument("greedy_train: max_depth must be >= 0");
  for (auto i : rows) check_instance(schema, data.at(i));
  Builder b{data, schema, max_depth, {}};
  std::vector<bool> used(schema.num_features(), false);
  std::vector<std::size_t> all(rows.begin(), rows.end());
  b.build(all, used, 0, 0);
  return std::move(b.tree);
}

DecisionTree greedy_train(const std::vector<LabeledInstance>& data, const FeatureSchema& schema,
                          int max_depth) {
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return greedy_train(data, rows, schema, max_depth);
}

int tree_predict(const DecisionTree& tree, const LabeledInstance& x) {
  return tree.predict(x.values);
}

int majority_class(const std::vector<LabeledInstance>& data, std::span<const std::size_t> rows,
                   int num_classes) {
  return argmax(class_counts(data, rows, num_classes));
}

double tree_accuracy(const DecisionTree& tree, const std::vector<LabeledInstance>& data,
                     std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("tree_accuracy: no rows");
  long correct = 0;
  for (auto i : rows) correct += tree_predict(tree, data.at(i)) == data[i].label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(rows.size());
}

BaselineReport cross_validate_greedy(const std::vector<LabeledInstance>& data,
                                     const FeatureSchema& schema, int max_depth, int folds,
                                     std::uint64_t fold_seed) {
  const auto split = kfold_indices(data.size(), folds, fold_seed);
  BaselineReport report;
  report.max_depth = max_depth;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    for (int g = 0; g < folds; ++g) {
      if (g != f) train.insert(train.end(), split[g].begin(), split[g].end());
    }
    const auto tree = greedy_train(data, train, schema, max_depth);
    report.fold_accuracy.push_back(tree_accuracy(tree, data, split[f]));
  }
  report.accuracy = confidence_interval(report.fold_accuracy);
  return report;
}

}  // namespace rldt
