#include "rldt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace rldt {

MetricsSeries::MetricsSeries(int window) : window_(window) {
  if (window_ < 1) throw std::invalid_argument("metrics: window must be >= 1");
}

Averages MetricsSeries::moving(std::size_t t) const {
  if (t >= records_.size()) throw std::out_of_range("metrics: index past end");
  const std::size_t span = std::min<std::size_t>(t + 1, static_cast<std::size_t>(window_));
  return mean(t + 1 - span, t + 1);
}

Averages MetricsSeries::mean(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > records_.size()) throw std::out_of_range("metrics: bad range");
  long correct = 0;
  long queries = 0;
  double ret = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    correct += records_[i].correct ? 1 : 0;
    queries += records_[i].n_queries;
    ret += records_[i].return_;
  }
  const auto n = static_cast<double>(end - begin);
  return {static_cast<double>(correct) / n, static_cast<double>(queries) / n, ret / n};
}

MetricsSeries prequential_run(const DataStream& stream, Learner& learner,
                              const PrequentialOptions& options) {
  MetricsSeries series(options.window);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    if (options.freeze_at && t == *options.freeze_at) learner.set_alpha({0.0});
    const auto& x = stream[t];
    const auto version = learner.table().version();
    const EpisodeTrace trace = learner.run_episode(x);
    if (learner.table().version() != version) {
      throw std::logic_error("prequential: table changed before the prediction was scored");
    }
    series.push({trace.correct(), trace.n_queries, trace.return_});
    learner.learn(trace);
  }
  return series;
}

MetricsSeries prequential_run(const DataStream& stream, const FeatureSchema& schema,
                              const AgentConfig& cfg, const PrequentialOptions& options) {
  Learner learner(schema, cfg);
  return prequential_run(stream, learner, options);
}

Interval confidence_interval(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("confidence interval needs >= 2 values");
  const auto n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

RunSummary aggregate_range(std::span<const MetricsSeries> series, std::size_t begin,
                           std::size_t end) {
  if (series.size() < 2) throw std::invalid_argument("aggregate: need at least 2 runs");
  for (const auto& s : series) {
    if (s.size() != series.front().size()) throw std::invalid_argument("aggregate: run lengths differ");
  }
  RunSummary out;
  out.terminal_begin = begin;
  out.terminal_end = end;
  std::vector<double> acc, queries, ret;
  for (const auto& s : series) {
    const Averages a = s.mean(begin, end);
    out.per_run.push_back(a);
    acc.push_back(a.accuracy);
    queries.push_back(a.queries);
    ret.push_back(a.return_);
  }
  out.accuracy = confidence_interval(acc);
  out.queries = confidence_interval(queries);
  out.return_ = confidence_interval(ret);
  return out;
}

RunSummary aggregate_runs(std::span<const MetricsSeries> series, std::size_t terminal_window) {
  if (series.empty()) throw std::invalid_argument("aggregate: need at least 2 runs");
  const std::size_t n = series.front().size();
  if (terminal_window == 0 || terminal_window > n) {
    throw std::invalid_argument("aggregate: terminal window must be in [1, run length]");
  }
  return aggregate_range(series, n - terminal_window, n);
}

std::size_t default_terminal_window(std::size_t n) { return std::max<std::size_t>(1, n / 5); }

std::vector<MetricsSeries> run_batch(const FeatureSchema& schema, const AgentConfig& base,
                                     const StreamFactory& streams, int runs, int jobs,
                                     const PrequentialOptions& options,
                                     const RunInspector& inspect) {
  if (runs < 1) throw std::invalid_argument("run_batch: runs must be >= 1");
  std::vector<std::optional<MetricsSeries>> results(runs);
  std::vector<std::exception_ptr> errors(runs);
  auto one = [&](int r) {
    try {
      AgentConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(r);
      Learner learner(schema, cfg);
      results[r] = prequential_run(streams(r), learner, options);
      if (inspect) inspect(r, learner);
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };
  jobs = std::clamp(jobs, 1, runs);
  if (jobs == 1) {
    for (int r = 0; r < runs; ++r) one(r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < runs; r += jobs) one(r);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<MetricsSeries> out;
  for (int r = 0; r < runs; ++r) {
    if (errors[r]) std::rethrow_exception(errors[r]);
    out.push_back(std::move(*results[r]));
  }
  return out;
}

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names{"query_cost_uniform", "gamma",        "alpha",
                                              "epsilon",            "max_queries",  "update_mode",
                                              "num_paths"};
  return names;
}

namespace {

double to_double(const std::string& name, const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty()) {
    throw std::invalid_argument("sweep: bad value '" + text + "' for " + name);
  }
  return v;
}

}  // namespace

AgentConfig with_parameter(AgentConfig cfg, const std::string& name, const std::string& value,
                           const FeatureSchema& schema) {
  if (name == "query_cost_uniform") {
    cfg.query_costs.assign(schema.num_features(), to_double(name, value));
  } else if (name == "gamma") {
    cfg.gamma = to_double(name, value);
  } else if (name == "alpha") {
    cfg.alpha = {to_double(name, value)};
  } else if (name == "epsilon") {
    cfg.epsilon = to_double(name, value);
  } else if (name == "max_queries") {
    const double v = to_double(name, value);
    if (v != std::floor(v)) throw std::invalid_argument("sweep: max_queries must be an integer");
    cfg.max_queries = static_cast<int>(v);
  } else if (name == "update_mode") {
    parse_update_mode(value, cfg.update_mode, cfg.num_paths);
  } else if (name == "num_paths") {
    const double v = to_double(name, value);
    if (v != std::floor(v)) throw std::invalid_argument("sweep: num_paths must be an integer");
    cfg.update_mode = UpdateMode::kMultipathSampled;
    cfg.num_paths = static_cast<int>(v);
  } else {
    throw std::invalid_argument("sweep: unknown parameter '" + name + "'");
  }
  cfg.validate(schema);
  return cfg;
}

std::vector<SweepRow> sweep(const std::string& param, const std::vector<std::string>& values,
                            const FeatureSchema& schema, const AgentConfig& base,
                            const StreamFactory& streams, int runs,
                            std::size_t terminal_window, int jobs,
                            const PrequentialOptions& options) {
  if (std::find(sweep_parameters().begin(), sweep_parameters().end(), param) ==
      sweep_parameters().end()) {
    throw std::invalid_argument("sweep: unknown parameter '" + param + "'");
  }
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  // Validate every value before spending time on runs.
  std::vector<AgentConfig> configs;
  for (const auto& v : values) configs.push_back(with_parameter(base, param, v, schema));
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepRow row;
    row.value = values[i];
    row.series = run_batch(schema, configs[i], streams, runs, jobs, options);
    row.summary = aggregate_runs(row.series, terminal_window);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DriftRow> drift_experiment(const DataStream& stream, const FeatureSchema& schema,
                                       const AgentConfig& base, std::span<const double> alphas,
                                       const PrequentialOptions& options) {
  if (stream.empty()) throw std::invalid_argument("drift: empty stream");
  std::vector<DriftRow> rows;
  for (double alpha : alphas) {
    AgentConfig cfg = base;
    cfg.alpha = {alpha};
    DriftRow row;
    row.alpha = alpha;
    row.series = prequential_run(stream, schema, cfg, options);
    row.final_accuracy = row.series.moving(row.series.size() - 1).accuracy;
    row.mean_accuracy = row.series.mean(0, row.series.size()).accuracy;
    rows.push_back(std::move(row));
  }
  return rows;
}

FrozenScore evaluate_frozen(const Learner& learner, const std::vector<LabeledInstance>& points,
                            std::span<const std::size_t> indices) {
  if (indices.empty()) throw std::invalid_argument("evaluate_frozen: no points");
  long correct = 0;
  long queries = 0;
  for (auto i : indices) {
    const auto trace = learner.predict(points.at(i));
    correct += trace.correct() ? 1 : 0;
    queries += trace.n_queries;
  }
  const auto n = static_cast<double>(indices.size());
  return {static_cast<double>(correct) / n, static_cast<double>(queries) / n};
}

std::vector<FoldResult> cross_validate_learner(const std::vector<LabeledInstance>& points,
                                               const FeatureSchema& schema,
                                               const AgentConfig& cfg, int folds,
                                               std::uint64_t fold_seed, int passes) {
  if (passes < 1) throw std::invalid_argument("cross_validate: passes must be >= 1");
  const auto split = kfold_indices(points.size(), folds, fold_seed);
  auto shared = std::make_shared<const std::vector<LabeledInstance>>(points);
  std::vector<FoldResult> out;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train;
    for (int g = 0; g < folds; ++g) {
      if (g != f) train.insert(train.end(), split[g].begin(), split[g].end());
    }
    AgentConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + static_cast<std::uint64_t>(f);
    Learner learner(schema, fold_cfg);
    Rng order_rng(fold_seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(f + 1)));
    FoldResult result{{}, MetricsSeries{}};
    for (int p = 0; p < passes; ++p) {
      shuffle_in_place(std::span<std::size_t>(train), order_rng);
      DataStream stream(shared, train, fold_seed);
      auto series = prequential_run(stream, learner);
      if (p == passes - 1) result.training = std::move(series);
    }
    result.test = evaluate_frozen(learner, points, split[f]);
    out.push_back(std::move(result));
  }
  return out;
}

void write_metrics_csv(std::ostream& out, const MetricsSeries& series,
                       std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "t,correct,n_queries,return,mov_acc,mov_queries,mov_return\n";
  char buf[160];
  const auto& rec = series.records();
  for (std::size_t t = 0; t < rec.size(); ++t) {
    const Averages m = series.moving(t);
    std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.6f,%.6f,%.6f,%.6f\n", t, rec[t].correct ? 1 : 0,
                  rec[t].n_queries, rec[t].return_, m.accuracy, m.queries, m.return_);
    out << buf;
  }
}

}  // namespace rldt
