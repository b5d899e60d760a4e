#pragma once

#include <span>
#include <string>
#include <vector>

#include "rldt/schema.hpp"

namespace rldt {

/// A categorical decision tree: split nodes have one child per feature value.
/// Used both for policies read out of a Q-table and for the greedy baseline.
class DecisionTree {
 public:
  struct Node {
    int feature = -1;  // -1 for a leaf
    int label = 0;     // leaf class, or the fallback class of a split node
    std::vector<int> children;
    bool is_leaf() const { return feature < 0; }
  };

  DecisionTree() = default;

  int add_leaf(int label);
  /// Children are filled in later via set_child.
  int add_split(int feature, int fallback_label, int arity);
  void set_child(int node, int value, int child) { nodes_.at(node).children.at(value) = child; }

  const Node& node(int i) const { return nodes_.at(i); }
  const Node& root() const { return nodes_.at(0); }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// Walks the splits; a value with no child falls back to the node's label.
  int predict(std::span<const int> values) const;
  /// Number of split nodes on the longest root-to-leaf path.
  int depth() const;
  /// True when no feature is split on twice along any path.
  bool paths_have_unique_features() const;

  /// Indented text, one node per line.
  std::string to_text(const FeatureSchema& schema) const;
  /// Graphviz digraph: nodes are feature names or class labels, edges are values.
  std::string to_dot(const FeatureSchema& schema) const;

 private:
  std::vector<Node> nodes_;
};

}  // namespace rldt
