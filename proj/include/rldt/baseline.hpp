#pragma once

// Batch greedy information-gain tree with a hard depth limit, and a
// majority-class predictor. Used as the comparison baseline.

#include <cstdint>
#include <span>
#include <vector>

#include "rldt/eval.hpp"
#include "rldt/schema.hpp"
#include "rldt/tree.hpp"

namespace rldt {

/// Entropy (bits) of a class histogram.
double entropy(std::span<const long> counts);

/// Information gain of splitting `rows` on feature j.
double information_gain(const std::vector<LabeledInstance>& data,
                        std::span<const std::size_t> rows, int j, const FeatureSchema& schema);

/// Splits on the highest-gain unused feature (lowest index wins ties) until a
/// node is pure, out of features or out of depth. A zero-gain split is still
/// taken (XOR needs one at the root).
/// Children for values that no training row reaches are parent-majority leaves.
/// Throws std::invalid_argument on empty data or negative depth.
DecisionTree greedy_train(const std::vector<LabeledInstance>& data, const FeatureSchema& schema,
                          int max_depth);
DecisionTree greedy_train(const std::vector<LabeledInstance>& data,
                          std::span<const std::size_t> rows, const FeatureSchema& schema,
                          int max_depth);

int tree_predict(const DecisionTree& tree, const LabeledInstance& x);

/// Most frequent class, lowest index on ties.
int majority_class(const std::vector<LabeledInstance>& data, std::span<const std::size_t> rows,
                   int num_classes);

double tree_accuracy(const DecisionTree& tree, const std::vector<LabeledInstance>& data,
                     std::span<const std::size_t> rows);

struct BaselineReport {
  int max_depth = 0;
  std::vector<double> fold_accuracy;
  Interval accuracy;
};

/// k-fold accuracy of greedy_train at max_depth, folds from kfold_indices.
BaselineReport cross_validate_greedy(const std::vector<LabeledInstance>& data,
                                     const FeatureSchema& schema, int max_depth, int folds,
                                     std::uint64_t fold_seed);

}  // namespace rldt
