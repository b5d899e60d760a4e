#include "rldt/tree.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rldt {

int DecisionTree::add_leaf(int label) {
  nodes_.push_back(Node{-1, label, {}});
  return static_cast<int>(nodes_.size()) - 1;
}

int DecisionTree::add_split(int feature, int fallback_label, int arity) {
  nodes_.push_back(Node{feature, fallback_label, std::vector<int>(arity, -1)});
  return static_cast<int>(nodes_.size()) - 1;
}

int DecisionTree::predict(std::span<const int> values) const {
  if (nodes_.empty()) throw std::logic_error("tree: predict on an empty tree");
  int i = 0;
  for (;;) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) return n.label;
    const int v = values[n.feature];
    if (v < 0 || v >= static_cast<int>(n.children.size()) || n.children[v] < 0) return n.label;
    i = n.children[v];
  }
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::function<int(int)> walk = [&](int i) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) return 0;
    int deepest = 0;
    for (int c : n.children) {
      if (c >= 0) deepest = std::max(deepest, walk(c));
    }
    return deepest + 1;
  };
  return walk(0);
}

bool DecisionTree::paths_have_unique_features() const {
  if (nodes_.empty()) return true;
  std::set<int> on_path;
  std::function<bool(int)> walk = [&](int i) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) return true;
    if (!on_path.insert(n.feature).second) return false;
    for (int c : n.children) {
      if (c >= 0 && !walk(c)) return false;
    }
    on_path.erase(n.feature);
    return true;
  };
  return walk(0);
}

std::string DecisionTree::to_text(const FeatureSchema& schema) const {
  std::ostringstream out;
  if (nodes_.empty()) return "";
  std::function<void(int, int)> walk = [&](int i, int indent) {
    const Node& n = nodes_[i];
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (n.is_leaf()) {
      out << pad << "report " << schema.class_labels()[n.label] << '\n';
      return;
    }
    const Feature& f = schema.feature(n.feature);
    out << pad << "query " << f.name << '\n';
    for (std::size_t v = 0; v < n.children.size(); ++v) {
      out << pad << "  " << f.name << " = " << f.labels[v] << ":\n";
      if (n.children[v] >= 0) {
        walk(n.children[v], indent + 2);
      } else {
        out << pad << "    report " << schema.class_labels()[n.label] << '\n';
      }
    }
  };
  walk(0, 0);
  return out.str();
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string DecisionTree::to_dot(const FeatureSchema& schema) const {
  std::ostringstream out;
  out << "digraph policy {\n";
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.is_leaf()) {
      out << "  n" << i << " [shape=box,label=\"" << dot_escape(schema.class_labels()[n.label])
          << "\"];\n";
    } else {
      out << "  n" << i << " [shape=ellipse,label=\"" << dot_escape(schema.feature(n.feature).name)
          << "\"];\n";
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    for (std::size_t v = 0; v < n.children.size(); ++v) {
      if (n.children[v] < 0) continue;
      out << "  n" << i << " -> n" << n.children[v] << " [label=\""
          << dot_escape(schema.feature(n.feature).labels[v]) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace rldt
