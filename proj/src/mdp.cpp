#include "rldt/mdp.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace rldt {

State::State(std::vector<Observation> known) : known_(std::move(known)) {
  std::sort(known_.begin(), known_.end());
  for (std::size_t i = 1; i < known_.size(); ++i) {
    if (known_[i].feature == known_[i - 1].feature) {
      throw std::invalid_argument("state: feature " + std::to_string(known_[i].feature) +
                                  " observed twice");
    }
  }
}

bool State::knows(int feature) const {
  auto it = std::lower_bound(known_.begin(), known_.end(), feature,
                             [](const Observation& o, int f) { return o.feature < f; });
  return it != known_.end() && it->feature == feature;
}

State State::with(Observation obs) const {
  auto it = std::lower_bound(known_.begin(), known_.end(), obs.feature,
                             [](const Observation& o, int f) { return o.feature < f; });
  if (it != known_.end() && it->feature == obs.feature) {
    throw std::logic_error("state: feature " + std::to_string(obs.feature) + " already known");
  }
  State next;
  next.known_.reserve(known_.size() + 1);
  next.known_.insert(next.known_.end(), known_.begin(), it);
  next.known_.push_back(obs);
  next.known_.insert(next.known_.end(), it, known_.end());
  return next;
}

std::string State::key() const {
  std::string out;
  for (std::size_t i = 0; i < known_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(known_[i].feature);
    out += '=';
    out += std::to_string(known_[i].value);
  }
  return out;
}

State State::parse(std::string_view key) {
  std::vector<Observation> known;
  auto number = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) {
      throw std::invalid_argument("state key: bad number '" + std::string(s) + "'");
    }
    return v;
  };
  if (key.empty()) return State();
  for (;;) {
    auto comma = key.find(',');
    auto pair = key.substr(0, comma);
    auto eq = pair.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("state key: missing '=' in '" + std::string(pair) + "'");
    }
    known.push_back({number(pair.substr(0, eq)), number(pair.substr(eq + 1))});
    if (comma == std::string_view::npos) break;
    key = key.substr(comma + 1);
  }
  return State(std::move(known));
}

void State::check(const FeatureSchema& schema) const {
  for (auto [j, v] : known_) {
    if (j < 0 || j >= schema.num_features() || v < 0 || v >= schema.arity(j)) {
      throw std::invalid_argument("state: (" + std::to_string(j) + "," + std::to_string(v) +
                                  ") outside schema");
    }
  }
}

std::size_t State::hash() const {
  // FNV-1a over the packed pairs.
  std::uint64_t h = 1469598103934665603ull;
  for (auto [j, v] : known_) {
    const std::uint64_t word = (static_cast<std::uint64_t>(j) << 32) | static_cast<std::uint32_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return static_cast<std::size_t>(h);
}

std::string Action::to_string() const {
  return (is_query() ? "F" : "R") + std::to_string(index_);
}

Action Action::parse(std::string_view text) {
  if (text.size() < 2 || (text[0] != 'F' && text[0] != 'R')) {
    throw std::invalid_argument("action: bad text '" + std::string(text) + "'");
  }
  int idx = 0;
  auto [ptr, ec] = std::from_chars(text.data() + 1, text.data() + text.size(), idx);
  if (ec != std::errc{} || ptr != text.data() + text.size() || idx < 0) {
    throw std::invalid_argument("action: bad index in '" + std::string(text) + "'");
  }
  return text[0] == 'F' ? query(idx) : report(idx);
}

RewardParams RewardParams::uniform(const FeatureSchema& schema, double gamma, double r_plus,
                                   double r_minus) {
  RewardParams p;
  p.gamma = gamma;
  p.r_plus.assign(schema.num_classes(), r_plus);
  p.r_minus.assign(schema.num_classes(), r_minus);
  p.query_costs.assign(schema.query_costs().begin(), schema.query_costs().end());
  return p;
}

void RewardParams::check(const FeatureSchema& schema) const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("reward: gamma must be in (0, 1]");
  const auto k = static_cast<std::size_t>(schema.num_classes());
  if (r_plus.size() != k || r_minus.size() != k) {
    throw std::invalid_argument("reward: r_plus/r_minus must have one entry per class");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(r_plus[i] > r_minus[i])) throw std::invalid_argument("reward: need r_plus > r_minus");
  }
  if (query_costs.size() != static_cast<std::size_t>(schema.num_features())) {
    throw std::invalid_argument("reward: one query cost per feature required");
  }
  for (double c : query_costs) {
    if (!(c >= 0.0)) throw std::invalid_argument("reward: query costs must be >= 0");
  }
}

std::vector<Action> allowed_actions(const State& s, const FeatureSchema& schema, int max_queries) {
  std::vector<Action> out;
  if (static_cast<int>(s.depth()) < max_queries) {
    for (int j = 0; j < schema.num_features(); ++j) {
      if (!s.knows(j)) out.push_back(Action::query(j));
    }
  }
  for (int k = 0; k < schema.num_classes(); ++k) out.push_back(Action::report(k));
  return out;
}

bool is_allowed(const State& s, Action a, const FeatureSchema& schema, int max_queries) {
  if (a.is_report()) return a.index() >= 0 && a.index() < schema.num_classes();
  return a.index() >= 0 && a.index() < schema.num_features() &&
         static_cast<int>(s.depth()) < max_queries && !s.knows(a.index());
}

State transition(const State& s, Action a, const LabeledInstance& x) {
  if (!a.is_query()) throw std::logic_error("transition: report actions are terminal");
  if (a.index() < 0 || a.index() >= static_cast<int>(x.values.size())) {
    throw std::logic_error("transition: feature index out of range");
  }
  return s.with({a.index(), x.values[a.index()]});
}

double query_reward(int feature, const RewardParams& params) {
  return -params.query_costs.at(feature);
}

double report_reward(int reported, int y_true, const RewardParams& params) {
  return reported == y_true ? params.r_plus.at(y_true) : params.r_minus.at(reported);
}

}  // namespace rldt
