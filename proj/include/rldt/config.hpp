#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rldt/mdp.hpp"
#include "rldt/schema.hpp"

namespace rldt {

enum class UpdateMode { kSinglePath, kMultipathFull, kMultipathSampled };

/// Learner hyper-parameters. Vector-valued fields hold either one entry
/// (broadcast) or one entry per class / feature.
struct AgentConfig {
  double gamma = 0.8;
  std::vector<double> r_plus{5.0};
  std::vector<double> r_minus{-5.0};
  // Empty: take the schema's costs. One entry: uniform cost. Otherwise one per feature.
  std::vector<double> query_costs;
  double epsilon = 0.01;
  // Learning rate, scalar or per class. 0 freezes the table.
  std::vector<double> alpha{0.1};
  double q_optimistic = 8.0;
  double r_init = 0.0;
  int max_queries = 3;
  UpdateMode update_mode = UpdateMode::kMultipathFull;
  int num_paths = 1;
  bool truncated_exploration = true;
  std::uint64_t seed = 1;

  RewardParams reward_params(const FeatureSchema& schema) const;
  std::vector<double> alpha_per_class(int num_classes) const;

  /// Throws std::invalid_argument on an invalid setting; returns soft warnings
  /// (e.g. q_optimistic below the largest report reward).
  std::vector<std::string> validate(const FeatureSchema& schema) const;
};

/// "single", "multipath" or "sampled:N".
std::string update_mode_name(UpdateMode mode, int num_paths);
/// Parses the names above into mode and path count; throws std::invalid_argument.
void parse_update_mode(std::string_view text, UpdateMode& mode, int& num_paths);

}  // namespace rldt
