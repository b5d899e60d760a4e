#include "rldt/stream.hpp"

#include <charconv>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "rldt/random.hpp"

namespace rldt {

DataStream::DataStream(std::shared_ptr<const std::vector<LabeledInstance>> points,
                       std::vector<std::size_t> order, std::uint64_t seed)
    : points_(std::move(points)), order_(std::move(order)), seed_(seed) {
  for (auto i : order_) {
    if (!points_ || i >= points_->size()) throw std::out_of_range("stream order index");
  }
}

DataStream ordered_stream(std::shared_ptr<const std::vector<LabeledInstance>> points) {
  std::vector<std::size_t> order(points ? points->size() : 0);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return DataStream(std::move(points), std::move(order), 0);
}

DataStream shuffle_stream(std::shared_ptr<const std::vector<LabeledInstance>> points,
                          std::uint64_t seed) {
  if (!points || points->empty()) throw std::invalid_argument("shuffle_stream: empty dataset");
  std::vector<std::size_t> order(points->size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle_in_place(std::span<std::size_t>(order), rng);
  return DataStream(std::move(points), std::move(order), seed);
}

LabelRule::LabelRule(std::vector<Clause> clauses, int fallback)
    : clauses_(std::move(clauses)), fallback_(fallback) {}

LabelRule LabelRule::copy_feature(const FeatureSchema& schema, int j) {
  std::vector<Clause> clauses;
  for (int v = 0; v < schema.arity(j); ++v) clauses.push_back({{{j, v}}, v});
  LabelRule rule(std::move(clauses), 0);
  rule.check(schema);
  return rule;
}

LabelRule LabelRule::flip_feature(const FeatureSchema& schema, int j) {
  std::vector<Clause> clauses;
  const int top = schema.arity(j) - 1;
  for (int v = 0; v <= top; ++v) clauses.push_back({{{j, v}}, top - v});
  LabelRule rule(std::move(clauses), 0);
  rule.check(schema);
  return rule;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("label rule: bad " + std::string(what) + " '" +
                                std::string(s) + "'");
  }
  return out;
}

}  // namespace

LabelRule LabelRule::parse(std::string_view text) {
  std::vector<Clause> clauses;
  std::optional<int> fallback;
  while (!text.empty()) {
    auto semi = text.find(';');
    auto clause_text = trim(text.substr(0, semi));
    text = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
    if (clause_text.empty()) continue;
    auto colon = clause_text.rfind(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("label rule: clause without ':' label");
    }
    const int label = parse_int(clause_text.substr(colon + 1), "label");
    auto lhs = trim(clause_text.substr(0, colon));
    if (lhs == "*") {
      fallback = label;
      break;
    }
    Clause clause{{}, label};
    while (!lhs.empty()) {
      auto amp = lhs.find('&');
      auto cond = trim(lhs.substr(0, amp));
      lhs = amp == std::string_view::npos ? std::string_view{} : lhs.substr(amp + 1);
      auto eq = cond.find('=');
      if (cond.size() < 2 || cond.front() != 'x' || eq == std::string_view::npos) {
        throw std::invalid_argument("label rule: bad condition '" + std::string(cond) + "'");
      }
      clause.conditions.emplace_back(parse_int(cond.substr(1, eq - 1), "feature"),
                                     parse_int(cond.substr(eq + 1), "value"));
    }
    clauses.push_back(std::move(clause));
  }
  return LabelRule(std::move(clauses), fallback.value_or(0));
}

int LabelRule::operator()(const std::vector<int>& values) const {
  for (const auto& c : clauses_) {
    bool match = true;
    for (auto [j, v] : c.conditions) {
      if (values.at(j) != v) {
        match = false;
        break;
      }
    }
    if (match) return c.label;
  }
  return fallback_;
}

std::string LabelRule::to_string() const {
  std::string out;
  for (const auto& c : clauses_) {
    for (std::size_t i = 0; i < c.conditions.size(); ++i) {
      if (i) out += '&';
      out += 'x' + std::to_string(c.conditions[i].first) + '=' +
             std::to_string(c.conditions[i].second);
    }
    out += ':' + std::to_string(c.label) + ';';
  }
  out += "*:" + std::to_string(fallback_);
  return out;
}

void LabelRule::check(const FeatureSchema& schema) const {
  auto check_label = [&](int k) {
    if (k < 0 || k >= schema.num_classes()) {
      throw std::invalid_argument("label rule: label " + std::to_string(k) + " outside [0, K)");
    }
  };
  check_label(fallback_);
  for (const auto& c : clauses_) {
    check_label(c.label);
    for (auto [j, v] : c.conditions) {
      if (j < 0 || j >= schema.num_features() || v < 0 || v >= schema.arity(j)) {
        throw std::invalid_argument("label rule: condition x" + std::to_string(j) + "=" +
                                    std::to_string(v) + " outside schema");
      }
    }
  }
}

DataStream synth_drift_stream(const FeatureSchema& schema, const LabelRule& before,
                              const LabelRule& after, std::size_t switch_at,
                              std::size_t length, std::uint64_t seed) {
  if (switch_at >= length) throw std::invalid_argument("synth_drift_stream: switch_at >= length");
  before.check(schema);
  after.check(schema);
  Rng rng(seed);
  auto points = std::make_shared<std::vector<LabeledInstance>>();
  points->reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    LabeledInstance x;
    x.values.resize(schema.num_features());
    for (int j = 0; j < schema.num_features(); ++j) {
      x.values[j] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(schema.arity(j))));
    }
    x.label = t < switch_at ? before(x.values) : after(x.values);
    points->push_back(std::move(x));
  }
  std::vector<std::size_t> order(length);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return DataStream(std::move(points), std::move(order), seed);
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2 || static_cast<std::size_t>(folds) > n) {
    throw std::invalid_argument("kfold: need 2 <= folds <= n");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  shuffle_in_place(std::span<std::size_t>(order), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t begin = 0;
  for (int f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (static_cast<std::size_t>(f) < n % folds ? 1 : 0);
    out[f].assign(order.begin() + begin, order.begin() + begin + size);
    begin += size;
  }
  return out;
}

}  // namespace rldt
