#include "rldt/schema.hpp"

#include <stdexcept>
#include <unordered_set>

namespace rldt {

FeatureSchema::FeatureSchema(std::vector<Feature> features, int num_classes,
                             std::vector<double> query_costs,
                             std::vector<std::string> class_labels)
    : features_(std::move(features)),
      num_classes_(num_classes),
      class_labels_(std::move(class_labels)) {
  if (num_classes_ < 2) {
    throw std::invalid_argument("schema: need at least 2 classes, got " +
                                std::to_string(num_classes_));
  }
  std::unordered_set<std::string> names;
  for (auto& f : features_) {
    if (f.arity < 2) {
      throw std::invalid_argument("schema: feature '" + f.name + "' has arity " +
                                  std::to_string(f.arity) + " (need >= 2)");
    }
    if (!names.insert(f.name).second) {
      throw std::invalid_argument("schema: duplicate feature name '" + f.name + "'");
    }
    if (f.labels.empty()) {
      for (int v = 0; v < f.arity; ++v) f.labels.push_back(std::to_string(v));
    } else if (static_cast<int>(f.labels.size()) != f.arity) {
      throw std::invalid_argument("schema: feature '" + f.name + "' label count != arity");
    }
  }
  if (class_labels_.empty()) {
    for (int k = 0; k < num_classes_; ++k) class_labels_.push_back(std::to_string(k));
  } else if (static_cast<int>(class_labels_.size()) != num_classes_) {
    throw std::invalid_argument("schema: class label count != num_classes");
  }
  if (query_costs.empty()) query_costs.assign(features_.size(), 0.0);
  set_query_costs(std::move(query_costs));
}

std::optional<int> FeatureSchema::index_of(std::string_view name) const {
  for (int j = 0; j < num_features(); ++j) {
    if (features_[j].name == name) return j;
  }
  return std::nullopt;
}

void FeatureSchema::set_query_costs(std::vector<double> costs) {
  if (costs.size() != features_.size()) {
    throw std::invalid_argument("schema: " + std::to_string(costs.size()) +
                                " query costs for " + std::to_string(features_.size()) +
                                " features");
  }
  for (double c : costs) {
    if (!(c >= 0.0)) throw std::invalid_argument("schema: query costs must be >= 0");
  }
  query_costs_ = std::move(costs);
}

bool FeatureSchema::accepts(const LabeledInstance& x) const {
  if (static_cast<int>(x.values.size()) != num_features()) return false;
  if (x.label < 0 || x.label >= num_classes_) return false;
  for (int j = 0; j < num_features(); ++j) {
    if (x.values[j] < 0 || x.values[j] >= features_[j].arity) return false;
  }
  return true;
}

void check_instance(const FeatureSchema& schema, const LabeledInstance& x) {
  if (static_cast<int>(x.values.size()) != schema.num_features()) {
    throw std::invalid_argument("instance has " + std::to_string(x.values.size()) +
                                " values, schema has " +
                                std::to_string(schema.num_features()) + " features");
  }
  if (x.label < 0 || x.label >= schema.num_classes()) {
    throw std::invalid_argument("instance label " + std::to_string(x.label) +
                                " outside [0, K)");
  }
  for (int j = 0; j < schema.num_features(); ++j) {
    if (x.values[j] < 0 || x.values[j] >= schema.arity(j)) {
      throw std::invalid_argument("instance value " + std::to_string(x.values[j]) +
                                  " outside arity of feature '" + schema.feature(j).name +
                                  "'");
    }
  }
}

}  // namespace rldt
