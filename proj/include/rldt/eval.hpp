#pragma once

// Prequential (test-then-train) evaluation, moving averages, multi-run
// confidence intervals, parameter sweeps and drift runs.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rldt/config.hpp"
#include "rldt/learner.hpp"
#include "rldt/schema.hpp"
#include "rldt/stream.hpp"

namespace rldt {

struct PointRecord {
  bool correct = false;
  int n_queries = 0;
  double return_ = 0.0;

  bool operator==(const PointRecord&) const = default;
};

struct Averages {
  double accuracy = 0.0;
  double queries = 0.0;
  double return_ = 0.0;
};

/// Per-point outcomes of one run plus moving averages over a window.
class MetricsSeries {
 public:
  explicit MetricsSeries(int window = 200);

  void push(PointRecord r) { records_.push_back(r); }
  std::size_t size() const { return records_.size(); }
  int window() const { return window_; }
  const std::vector<PointRecord>& records() const { return records_; }

  /// Mean of the trailing min(t + 1, window) records ending at index t (0-based).
  Averages moving(std::size_t t) const;
  /// Mean over records [begin, end).
  Averages mean(std::size_t begin, std::size_t end) const;

  bool operator==(const MetricsSeries&) const = default;

 private:
  int window_;
  std::vector<PointRecord> records_;
};

struct PrequentialOptions {
  int window = 200;
  // From this index on the learner stops updating (alpha = 0).
  std::optional<std::size_t> freeze_at;
};

/// Each point is predicted by a fresh episode before that episode's updates
/// are applied. Throws std::logic_error if acting ever wrote to the table.
MetricsSeries prequential_run(const DataStream& stream, Learner& learner,
                              const PrequentialOptions& options = {});
MetricsSeries prequential_run(const DataStream& stream, const FeatureSchema& schema,
                              const AgentConfig& cfg, const PrequentialOptions& options = {});

struct Interval {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample sd / sqrt(runs)
};

/// Mean and 95% normal half-width of `values`, sample sd with n - 1.
Interval confidence_interval(std::span<const double> values);

struct RunSummary {
  std::size_t terminal_begin = 0;
  std::size_t terminal_end = 0;
  std::vector<Averages> per_run;
  Interval accuracy;
  Interval queries;
  Interval return_;
};

/// Terminal-window statistics over the last `terminal_window` points of each
/// run, then the cross-run mean +- CI. Needs >= 2 runs of equal length.
RunSummary aggregate_runs(std::span<const MetricsSeries> series, std::size_t terminal_window);
/// Same, over points [begin, end) of each run.
RunSummary aggregate_range(std::span<const MetricsSeries> series, std::size_t begin,
                           std::size_t end);

/// The last 20% of a stream of length n (at least one point).
std::size_t default_terminal_window(std::size_t n);

/// Stream for run r; runs in a batch use agent seeds base_seed + r.
using StreamFactory = std::function<DataStream(int run)>;

/// Called with each finished run's learner, possibly from a worker thread.
using RunInspector = std::function<void(int run, const Learner& learner)>;

/// Executes `runs` prequential runs, up to `jobs` at a time. Results are in
/// run order and do not depend on `jobs`.
std::vector<MetricsSeries> run_batch(const FeatureSchema& schema, const AgentConfig& base,
                                     const StreamFactory& streams, int runs, int jobs,
                                     const PrequentialOptions& options = {},
                                     const RunInspector& inspect = {});

/// Names accepted by sweep().
const std::vector<std::string>& sweep_parameters();
/// Copy of `cfg` with one parameter set from text. Throws std::invalid_argument
/// for an unknown name or a malformed value.
AgentConfig with_parameter(AgentConfig cfg, const std::string& name, const std::string& value,
                           const FeatureSchema& schema);

struct SweepRow {
  std::string value;
  RunSummary summary;
  std::vector<MetricsSeries> series;
};

/// One aggregated row per value. Every value sees the same streams and agent
/// seeds, so rows are paired comparisons.
std::vector<SweepRow> sweep(const std::string& param, const std::vector<std::string>& values,
                            const FeatureSchema& schema, const AgentConfig& base,
                            const StreamFactory& streams, int runs,
                            std::size_t terminal_window, int jobs = 1,
                            const PrequentialOptions& options = {});

struct DriftRow {
  double alpha = 0.0;
  MetricsSeries series;
  double final_accuracy = 0.0;  // moving accuracy at the last point
  double mean_accuracy = 0.0;   // over every point
};

/// Runs the ordered stream once per learning rate.
std::vector<DriftRow> drift_experiment(const DataStream& stream, const FeatureSchema& schema,
                                       const AgentConfig& base, std::span<const double> alphas,
                                       const PrequentialOptions& options = {});

/// Greedy accuracy and mean queries of a learner on a set of points, no learning.
struct FrozenScore {
  double accuracy = 0.0;
  double mean_queries = 0.0;
};
FrozenScore evaluate_frozen(const Learner& learner, const std::vector<LabeledInstance>& points,
                            std::span<const std::size_t> indices);

struct FoldResult {
  FrozenScore test;
  MetricsSeries training;
};

/// k-fold protocol for the online learner: prequential training on the other
/// folds (in a seed-shuffled order, `passes` times), then frozen scoring on
/// the held-out fold.
std::vector<FoldResult> cross_validate_learner(const std::vector<LabeledInstance>& points,
                                               const FeatureSchema& schema,
                                               const AgentConfig& cfg, int folds,
                                               std::uint64_t fold_seed, int passes = 1);

/// `t, correct, n_queries, return, mov_acc, mov_queries, mov_return`, one row
/// per point, preceded by `#` comment lines.
void write_metrics_csv(std::ostream& out, const MetricsSeries& series,
                       std::span<const std::string> comments = {});

}  // namespace rldt
