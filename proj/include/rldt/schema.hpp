#pragma once

// Data model for labeled categorical instances.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rldt {

/// One discrete input feature. `labels[v]` is the human-readable name of code v.
struct Feature {
  std::string name;
  int arity = 0;
  std::vector<std::string> labels;
};

struct LabeledInstance {
  std::vector<int> values;
  int label = 0;

  bool operator==(const LabeledInstance&) const = default;
};

/// Feature names and arities, the class count K and per-feature query costs.
///
/// Construction validates every invariant and throws std::invalid_argument
/// on violation; a constructed schema is immutable apart from its costs.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<Feature> features, int num_classes,
                std::vector<double> query_costs = {},
                std::vector<std::string> class_labels = {});

  int num_features() const { return static_cast<int>(features_.size()); }
  int num_classes() const { return num_classes_; }

  const Feature& feature(int j) const { return features_.at(j); }
  const std::vector<Feature>& features() const { return features_; }
  int arity(int j) const { return features_.at(j).arity; }
  std::optional<int> index_of(std::string_view name) const;

  double query_cost(int j) const { return query_costs_.at(j); }
  std::span<const double> query_costs() const { return query_costs_; }
  void set_query_costs(std::vector<double> costs);

  const std::vector<std::string>& class_labels() const { return class_labels_; }

  /// True when every value lies inside its feature's arity and the label inside K.
  bool accepts(const LabeledInstance& x) const;

 private:
  std::vector<Feature> features_;
  int num_classes_ = 0;
  std::vector<double> query_costs_;
  std::vector<std::string> class_labels_;
};

/// Throws std::invalid_argument naming the offending field.
void check_instance(const FeatureSchema& schema, const LabeledInstance& x);

}  // namespace rldt
