#include "rldt/config.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace rldt {

namespace {

std::vector<double> broadcast(const std::vector<double>& v, int n, const char* what) {
  if (v.size() == 1) return std::vector<double>(n, v.front());
  if (static_cast<int>(v.size()) == n) return v;
  throw std::invalid_argument(std::string(what) + ": expected 1 or " + std::to_string(n) +
                              " values, got " + std::to_string(v.size()));
}

}  // namespace

RewardParams AgentConfig::reward_params(const FeatureSchema& schema) const {
  RewardParams p;
  p.gamma = gamma;
  p.r_plus = broadcast(r_plus, schema.num_classes(), "r_plus");
  p.r_minus = broadcast(r_minus, schema.num_classes(), "r_minus");
  if (query_costs.empty()) {
    p.query_costs.assign(schema.query_costs().begin(), schema.query_costs().end());
  } else {
    p.query_costs = broadcast(query_costs, schema.num_features(), "query_costs");
  }
  return p;
}

std::vector<double> AgentConfig::alpha_per_class(int num_classes) const {
  return broadcast(alpha, num_classes, "alpha");
}

std::vector<std::string> AgentConfig::validate(const FeatureSchema& schema) const {
  const auto params = reward_params(schema);
  params.check(schema);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
  for (double a : alpha_per_class(schema.num_classes())) {
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
  }
  if (max_queries < 0) throw std::invalid_argument("max_queries must be >= 0");
  if (num_paths < 1) throw std::invalid_argument("num_paths must be >= 1");

  std::vector<std::string> warnings;
  const double top = *std::max_element(params.r_plus.begin(), params.r_plus.end());
  if (q_optimistic < top) {
    warnings.push_back("q_optimistic " + std::to_string(q_optimistic) +
                       " is below the largest report reward " + std::to_string(top) +
                       "; query actions are not optimistic");
  }
  return warnings;
}

std::string update_mode_name(UpdateMode mode, int num_paths) {
  switch (mode) {
    case UpdateMode::kSinglePath: return "single";
    case UpdateMode::kMultipathFull: return "multipath";
    case UpdateMode::kMultipathSampled: return "sampled:" + std::to_string(num_paths);
  }
  return "?";
}

void parse_update_mode(std::string_view text, UpdateMode& mode, int& num_paths) {
  if (text == "single") {
    mode = UpdateMode::kSinglePath;
    return;
  }
  if (text == "multipath") {
    mode = UpdateMode::kMultipathFull;
    return;
  }
  constexpr std::string_view prefix = "sampled:";
  if (text.substr(0, prefix.size()) == prefix) {
    auto digits = text.substr(prefix.size());
    int n = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && n >= 1) {
      mode = UpdateMode::kMultipathSampled;
      num_paths = n;
      return;
    }
  }
  throw std::invalid_argument("unknown update mode '" + std::string(text) +
                              "' (expected single, multipath or sampled:N)");
}

}  // namespace rldt
