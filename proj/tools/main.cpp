// rldt: command-line front end for runs, sweeps, drift experiments, the
// greedy baseline, tree export and the closed-form query analysis.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rldt/analysis.hpp"
#include "rldt/baseline.hpp"
#include "rldt/eval.hpp"
#include "rldt/ingest.hpp"
#include "rldt/learner.hpp"
#include "rldt/random.hpp"
#include "rldt/stream.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace rldt::cli {
namespace {

// A failure with a stable category for the one-line error message.
struct CliError : std::runtime_error {
  CliError(std::string kind, const std::string& msg) : std::runtime_error(msg), kind(std::move(kind)) {}
  std::string kind;
};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  for (const auto& v : out) {
    if (v.empty()) throw CliError("usage", "empty entry in list '" + text + "'");
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw CliError("usage", "bad number '" + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

// Collects output files and writes them only once every result is ready.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) {
    files_.emplace_back(name, std::move(content));
  }

  void commit() {
    std::vector<fs::path> written;
    try {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw CliError("io", "cannot create output directory " + dir_.string());
      for (const auto& [name, content] : files_) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw CliError("io", "cannot write " + p.string());
        written.push_back(p);
        out << content;
        out.close();
        if (!out) throw CliError("io", "write failed for " + p.string());
      }
    } catch (...) {
      for (const auto& p : written) {
        std::error_code ec;
        fs::remove(p, ec);
      }
      throw;
    }
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json interval_json(const Interval& iv, bool with_ci) {
  ordered_json j;
  j["mean"] = round6(iv.mean);
  if (with_ci) {
    j["ci95"] = round6(iv.half_width);
  } else {
    j["ci95"] = nullptr;
  }
  return j;
}

ordered_json averages_json(const Averages& a) {
  ordered_json j;
  j["accuracy"] = round6(a.accuracy);
  j["queries"] = round6(a.queries);
  j["return"] = round6(a.return_);
  return j;
}

// Range statistics that also work for a single run (no interval then).
ordered_json range_json(const std::vector<MetricsSeries>& series, std::size_t begin,
                        std::size_t end) {
  ordered_json j;
  j["begin"] = begin;
  j["end"] = end;
  if (series.size() >= 2) {
    const RunSummary s = aggregate_range(series, begin, end);
    j["accuracy"] = interval_json(s.accuracy, true);
    j["queries"] = interval_json(s.queries, true);
    j["return"] = interval_json(s.return_, true);
  } else {
    const Averages a = series.front().mean(begin, end);
    j["accuracy"] = interval_json({a.accuracy, 0.0}, false);
    j["queries"] = interval_json({a.queries, 0.0}, false);
    j["return"] = interval_json({a.return_, 0.0}, false);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Shared flag handling.

struct AgentFlags {
  double gamma = 0;
  std::string rplus, rminus, alpha, qcosts, update_mode;
  double epsilon = 0, qcost = 0, qopt = 0;
  int max_queries = 0;
  bool no_truncated = false;
  std::uint64_t seed = 0;
  std::map<std::string, CLI::Option*> opt;

  void attach(CLI::App* app) {
    opt["gamma"] = app->add_option("--gamma", gamma, "Discount factor");
    opt["rplus"] = app->add_option("--rplus", rplus, "Correct-report reward, scalar or per class (comma list)");
    opt["rminus"] = app->add_option("--rminus", rminus, "Wrong-report reward, scalar or per class");
    opt["epsilon"] = app->add_option("--epsilon", epsilon, "Exploration rate");
    opt["alpha"] = app->add_option("--alpha", alpha, "Learning rate, scalar or per class");
    opt["qcost"] = app->add_option("--qcost", qcost, "Uniform query cost");
    opt["qcosts"] = app->add_option("--qcosts", qcosts, "Per-feature query costs (comma list)");
    opt["qopt"] = app->add_option("--qopt", qopt, "Optimistic initial value of query actions");
    opt["max_queries"] = app->add_option("--max-queries", max_queries, "Queries allowed per point");
    opt["update_mode"] =
        app->add_option("--update-mode", update_mode, "single | multipath | sampled:N");
    opt["no_truncated"] = app->add_flag("--no-truncated-exploration", no_truncated,
                                        "Explore over reports as well as queries");
    opt["seed"] = app->add_option("--seed", seed, "Base seed; run r uses seed + r");
    opt["qcost"]->excludes(opt["qcosts"]);
  }

  bool given(const std::string& name) const { return opt.at(name)->count() > 0; }

  void apply(AgentConfig& cfg) const {
    if (given("gamma")) cfg.gamma = gamma;
    if (given("rplus")) cfg.r_plus = parse_doubles(rplus, "--rplus");
    if (given("rminus")) cfg.r_minus = parse_doubles(rminus, "--rminus");
    if (given("epsilon")) cfg.epsilon = epsilon;
    if (given("alpha")) cfg.alpha = parse_doubles(alpha, "--alpha");
    if (given("qcost")) cfg.query_costs = {qcost};
    if (given("qcosts")) cfg.query_costs = parse_doubles(qcosts, "--qcosts");
    if (given("qopt")) cfg.q_optimistic = qopt;
    if (given("max_queries")) cfg.max_queries = max_queries;
    if (given("update_mode")) parse_update_mode(update_mode, cfg.update_mode, cfg.num_paths);
    if (given("no_truncated")) cfg.truncated_exploration = false;
    if (given("seed")) cfg.seed = seed;
  }
};

struct CommonFlags {
  std::string data, schema, config, out = "out";
  int runs = 0, window = 0, jobs = 1;
  std::size_t skip = 0, terminal = 0;
  bool ordered = false;
  std::map<std::string, CLI::Option*> opt;
  AgentFlags agent;

  void attach(CLI::App* app, bool with_runs) {
    opt["data"] = app->add_option("--data", data, "CSV dataset");
    opt["schema"] = app->add_option("--schema", schema, "Schema sidecar (JSON)");
    opt["config"] = app->add_option("--config", config,
                                    "JSON config, or a summary.json to re-run; flags override it");
    opt["out"] = app->add_option("--out", out, "Output directory")->capture_default_str();
    opt["jobs"] = app->add_option("--jobs", jobs, "Concurrent runs")->capture_default_str();
    opt["window"] = app->add_option("--window", window, "Moving-average window");
    if (with_runs) {
      opt["runs"] = app->add_option("--runs", runs, "Independent runs");
      opt["skip"] = app->add_option("--skip", skip, "Warm-up points left out of the after-skip summary");
      opt["terminal"] = app->add_option("--terminal", terminal, "Terminal window length (default: last 20%)");
      opt["ordered"] = app->add_flag("--ordered", ordered, "Keep file order instead of shuffling");
    }
    agent.attach(app);
  }

  bool given(const std::string& name) const {
    auto it = opt.find(name);
    return it != opt.end() && it->second->count() > 0;
  }

  RunConfig resolve() const {
    RunConfig rc;
    if (given("config")) {
      std::ifstream in(config);
      if (!in) throw CliError("io", "cannot read config " + config);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw CliError("config", std::string("bad config JSON: ") + e.what());
      }
      // Accept a summary.json produced by an earlier run.
      if (j.contains("config") && j.at("config").is_object()) j = j.at("config");
      try {
        run_config_from_json(j, rc);
      } catch (const std::exception& e) {
        throw CliError("config", e.what());
      }
    }
    if (given("data")) rc.data = data;
    if (given("schema")) rc.schema = schema;
    if (given("runs")) rc.runs = runs;
    if (given("window")) rc.window = window;
    if (given("skip")) rc.skip = skip;
    if (given("terminal")) rc.terminal = terminal;
    if (given("ordered")) rc.ordered = true;
    agent.apply(rc.agent);
    if (rc.runs < 1) throw CliError("usage", "--runs must be >= 1");
    if (rc.window < 1) throw CliError("usage", "--window must be >= 1");
    return rc;
  }
};

LoadedDataset load_dataset(const RunConfig& rc) {
  if (rc.data.empty()) throw CliError("usage", "--data is required");
  if (rc.schema.empty()) throw CliError("usage", "--schema is required");
  if (!fs::exists(rc.data)) throw CliError("io", "no such file: " + rc.data);
  if (!fs::exists(rc.schema)) throw CliError("io", "no such file: " + rc.schema);
  try {
    auto spec = load_sidecar(rc.schema);
    auto data = load_csv(rc.data, spec);
    if (data.instances.empty()) throw CliError("data", "no usable rows in " + rc.data);
    return data;
  } catch (const CliError&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError("data", e.what());
  }
}

std::vector<std::string> validate_agent(const AgentConfig& cfg, const FeatureSchema& schema) {
  try {
    return cfg.validate(schema);
  } catch (const std::exception& e) {
    throw CliError("config", e.what());
  }
}

ordered_json dataset_json(const RunConfig& rc, const LoadedDataset& d) {
  ordered_json j;
  j["path"] = rc.data;
  j["rows_read"] = d.rows_read;
  j["points"] = d.instances.size();
  j["dropped_missing"] = d.dropped_missing;
  j["dropped_malformed"] = d.dropped_malformed;
  j["features"] = d.schema.num_features();
  j["classes"] = d.schema.class_labels();
  return j;
}

std::uint64_t stream_seed(std::uint64_t seed, int run) {
  return mix_seed(seed + static_cast<std::uint64_t>(run));
}

StreamFactory make_streams(const RunConfig& rc, const LoadedDataset& d) {
  auto points = std::make_shared<const std::vector<LabeledInstance>>(d.instances);
  const bool ordered = rc.ordered;
  const std::uint64_t seed = rc.agent.seed;
  return [points, ordered, seed](int run) {
    return ordered ? ordered_stream(points) : shuffle_stream(points, stream_seed(seed, run));
  };
}

std::size_t terminal_window(const RunConfig& rc, std::size_t n) {
  if (rc.terminal == 0) return default_terminal_window(n);
  if (rc.terminal > n) throw CliError("usage", "--terminal exceeds the stream length");
  return rc.terminal;
}

std::string metrics_csv(const MetricsSeries& series, const std::string& config_line, int run,
                        std::uint64_t agent_seed, std::optional<std::uint64_t> shuffle_seed) {
  std::vector<std::string> comments{
      "config " + config_line,
      "run " + std::to_string(run) + " agent_seed " + std::to_string(agent_seed) +
          " stream_seed " + (shuffle_seed ? std::to_string(*shuffle_seed) : "ordered")};
  std::ostringstream out;
  write_metrics_csv(out, series, comments);
  return out.str();
}

// ---------------------------------------------------------------------------
// Commands.

int cmd_run(const CommonFlags& flags) {
  const RunConfig rc = flags.resolve();
  const LoadedDataset d = load_dataset(rc);
  const auto warnings = validate_agent(rc.agent, d.schema);
  const std::size_t n = d.instances.size();
  if (rc.skip >= n) throw CliError("usage", "--skip must be smaller than the stream length");
  const std::size_t tw = terminal_window(rc, n);

  std::string qtable_dump, tree_text, tree_dot;
  std::mutex mu;
  PrequentialOptions popts;
  popts.window = rc.window;
  const auto series =
      run_batch(d.schema, rc.agent, make_streams(rc, d), rc.runs, flags.jobs, popts,
                [&](int run, const Learner& learner) {
                  if (run != 0) return;
                  std::ostringstream q;
                  learner.table().write(q);
                  const auto tree =
                      extract_policy_tree(learner.table(), d.schema, rc.agent.max_queries);
                  std::lock_guard lock(mu);
                  qtable_dump = q.str();
                  tree_text = tree.to_text(d.schema);
                  tree_dot = tree.to_dot(d.schema);
                });

  const ordered_json config = run_config_to_json(rc);
  const std::string config_line = config.dump();
  OutputSet out(flags.out);
  for (int r = 0; r < rc.runs; ++r) {
    const auto seed = rc.agent.seed + static_cast<std::uint64_t>(r);
    std::optional<std::uint64_t> sseed;
    if (!rc.ordered) sseed = stream_seed(rc.agent.seed, r);
    out.add("metrics_run" + std::to_string(r) + ".csv",
            metrics_csv(series[r], config_line, r, seed, sseed));
  }

  ordered_json summary;
  summary["command"] = "run";
  summary["config"] = config;
  summary["dataset"] = dataset_json(rc, d);
  summary["warnings"] = warnings;
  ordered_json seeds = ordered_json::array();
  for (int r = 0; r < rc.runs; ++r) seeds.push_back(rc.agent.seed + static_cast<std::uint64_t>(r));
  summary["agent_seeds"] = seeds;
  summary["terminal"] = range_json(series, n - tw, n);
  summary["after_skip"] = range_json(series, rc.skip, n);
  ordered_json per_run = ordered_json::array();
  for (const auto& s : series) per_run.push_back(averages_json(s.mean(n - tw, n)));
  summary["terminal_per_run"] = per_run;
  out.add("summary.json", dump(summary));
  out.add("qtable_run0.tsv", qtable_dump);
  out.add("tree.txt", tree_text);
  out.add("tree.dot", tree_dot);
  out.add("cuts.json", cut_points_to_json(d) + "\n");
  out.commit();

  const auto& t = summary["terminal"];
  std::cout << "terminal accuracy " << fixed(t["accuracy"]["mean"].get<double>(), 4)
            << " queries " << fixed(t["queries"]["mean"].get<double>(), 3) << " ("
            << rc.runs << " runs, " << n << " points) -> " << out.dir().string() << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& param, const std::string& values_text) {
  const RunConfig rc = flags.resolve();
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), param) == names.end()) {
    throw CliError("usage", "unsupported sweep parameter '" + param + "'");
  }
  if (values_text.empty()) throw CliError("usage", "--values must list at least one value");
  const auto values = split_list(values_text);
  const LoadedDataset d = load_dataset(rc);
  validate_agent(rc.agent, d.schema);
  const std::size_t n = d.instances.size();
  if (rc.runs < 2) throw CliError("usage", "sweep needs --runs >= 2 for intervals");
  PrequentialOptions popts;
  popts.window = rc.window;
  std::vector<SweepRow> rows;
  try {
    rows = sweep(param, values, d.schema, rc.agent, make_streams(rc, d), rc.runs,
                 terminal_window(rc, n), flags.jobs, popts);
  } catch (const std::invalid_argument& e) {
    throw CliError("config", e.what());
  }

  std::ostringstream table;
  table << "# config " << run_config_to_json(rc).dump() << "\n";
  table << "value,runs,acc_mean,acc_ci95,queries_mean,queries_ci95,return_mean,return_ci95\n";
  for (const auto& row : rows) {
    const auto& s = row.summary;
    table << row.value << ',' << rc.runs << ',' << fixed(s.accuracy.mean) << ','
          << fixed(s.accuracy.half_width) << ',' << fixed(s.queries.mean) << ','
          << fixed(s.queries.half_width) << ',' << fixed(s.return_.mean) << ','
          << fixed(s.return_.half_width) << "\n";
  }

  // Cross-run mean of the moving averages, one column pair per value.
  std::ostringstream curves;
  curves << "t";
  for (const auto& row : rows) curves << ",acc[" << row.value << "],queries[" << row.value << "]";
  curves << "\n";
  for (std::size_t t = 0; t < n; ++t) {
    curves << t;
    for (const auto& row : rows) {
      double acc = 0, q = 0;
      for (const auto& s : row.series) {
        const Averages m = s.moving(t);
        acc += m.accuracy;
        q += m.queries;
      }
      const auto runs = static_cast<double>(row.series.size());
      curves << ',' << fixed(acc / runs) << ',' << fixed(q / runs);
    }
    curves << "\n";
  }

  ordered_json summary;
  summary["command"] = "sweep";
  summary["config"] = run_config_to_json(rc);
  summary["param"] = param;
  summary["values"] = values;
  summary["dataset"] = dataset_json(rc, d);
  ordered_json jrows = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json jr;
    jr["value"] = row.value;
    jr["terminal"] = range_json(row.series, row.summary.terminal_begin, row.summary.terminal_end);
    jrows.push_back(jr);
  }
  summary["rows"] = jrows;

  OutputSet out(flags.out);
  out.add("sweep.csv", table.str());
  out.add("sweep_curves.csv", curves.str());
  out.add("summary.json", dump(summary));
  out.commit();
  std::cout << table.str().substr(table.str().find('\n') + 1);
  return 0;
}

struct SynthFlags {
  bool enabled = false;
  int features = 4;
  int arity = 2;
  int classes = 2;
  std::size_t length = 10000;
  std::size_t switch_at = 5000;
  std::string before = "x0=0:0;x0=1:1;*:0";
  std::string after = "x0=0:1;x0=1:0;*:0";
  std::uint64_t data_seed = 1;
};

int cmd_drift(const CommonFlags& flags, const SynthFlags& synth, const std::string& alphas_text,
              std::optional<std::size_t> freeze_at) {
  RunConfig rc = flags.resolve();
  rc.runs = 1;
  rc.ordered = true;
  const auto alphas = parse_doubles(alphas_text, "--alphas");
  if (alphas.empty()) throw CliError("usage", "--alphas must list at least one value");

  std::optional<LoadedDataset> loaded;
  FeatureSchema schema;
  DataStream stream;
  ordered_json source;
  if (synth.enabled) {
    if (synth.features < 1 || synth.arity < 2 || synth.classes < 2) {
      throw CliError("usage", "synthetic stream needs features >= 1, arity >= 2, classes >= 2");
    }
    std::vector<Feature> features;
    for (int j = 0; j < synth.features; ++j) features.push_back({"x" + std::to_string(j), synth.arity, {}});
    try {
      schema = FeatureSchema(features, synth.classes);
      stream = synth_drift_stream(schema, LabelRule::parse(synth.before),
                                  LabelRule::parse(synth.after), synth.switch_at, synth.length,
                                  synth.data_seed);
    } catch (const std::exception& e) {
      throw CliError("config", e.what());
    }
    source["synthetic"] = true;
    source["features"] = synth.features;
    source["arity"] = synth.arity;
    source["classes"] = synth.classes;
    source["length"] = synth.length;
    source["switch_at"] = synth.switch_at;
    source["before"] = LabelRule::parse(synth.before).to_string();
    source["after"] = LabelRule::parse(synth.after).to_string();
    source["data_seed"] = synth.data_seed;
  } else {
    loaded = load_dataset(rc);
    schema = loaded->schema;
    stream = ordered_stream(std::make_shared<const std::vector<LabeledInstance>>(loaded->instances));
    source = dataset_json(rc, *loaded);
  }
  for (double a : alphas) {
    AgentConfig probe = rc.agent;
    probe.alpha = {a};
    validate_agent(probe, schema);
  }
  PrequentialOptions popts;
  popts.window = rc.window;
  popts.freeze_at = freeze_at;
  const auto rows = drift_experiment(stream, schema, rc.agent, alphas, popts);

  std::ostringstream table;
  table << "alpha,final_accuracy,mean_accuracy,mean_queries\n";
  for (const auto& row : rows) {
    table << fixed(row.alpha) << ',' << fixed(row.final_accuracy) << ','
          << fixed(row.mean_accuracy) << ','
          << fixed(row.series.mean(0, row.series.size()).queries) << "\n";
  }
  std::ostringstream curves;
  curves << "t";
  for (const auto& row : rows) curves << ",acc[" << fixed(row.alpha) << "]";
  curves << "\n";
  for (std::size_t t = 0; t < stream.size(); ++t) {
    curves << t;
    for (const auto& row : rows) curves << ',' << fixed(row.series.moving(t).accuracy);
    curves << "\n";
  }

  ordered_json summary;
  summary["command"] = "drift";
  summary["config"] = run_config_to_json(rc);
  summary["source"] = source;
  summary["alphas"] = alphas;
  if (freeze_at) {
    summary["freeze_at"] = *freeze_at;
  } else {
    summary["freeze_at"] = nullptr;
  }
  ordered_json jrows = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json jr;
    jr["alpha"] = row.alpha;
    jr["final_accuracy"] = round6(row.final_accuracy);
    jr["mean_accuracy"] = round6(row.mean_accuracy);
    jrows.push_back(jr);
  }
  summary["rows"] = jrows;

  OutputSet out(flags.out);
  out.add("drift.csv", table.str());
  out.add("drift_curves.csv", curves.str());
  out.add("summary.json", dump(summary));
  out.commit();
  std::cout << table.str();
  return 0;
}

int cmd_baseline(const CommonFlags& flags, int max_depth, int folds, bool with_rldt, int passes) {
  const RunConfig rc = flags.resolve();
  const LoadedDataset d = load_dataset(rc);
  if (max_depth < 0) throw CliError("usage", "--max-depth must be >= 0");
  if (folds < 2 || static_cast<std::size_t>(folds) > d.instances.size()) {
    throw CliError("usage", "--folds must be in [2, number of points]");
  }
  const std::uint64_t fold_seed = rc.agent.seed;
  const BaselineReport report = cross_validate_greedy(d.instances, d.schema, max_depth, folds, fold_seed);

  std::vector<std::size_t> all(d.instances.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const int majority = majority_class(d.instances, all, d.schema.num_classes());
  long majority_hits = 0;
  for (const auto& x : d.instances) majority_hits += x.label == majority ? 1 : 0;
  const auto full_tree = greedy_train(d.instances, d.schema, max_depth);

  ordered_json summary;
  summary["command"] = "baseline";
  summary["config"] = run_config_to_json(rc);
  summary["dataset"] = dataset_json(rc, d);
  summary["max_depth"] = max_depth;
  summary["folds"] = folds;
  summary["fold_seed"] = fold_seed;
  ordered_json fa = ordered_json::array();
  for (double a : report.fold_accuracy) fa.push_back(round6(a));
  summary["greedy"]["fold_accuracy"] = fa;
  summary["greedy"]["accuracy"] = interval_json(report.accuracy, true);
  summary["majority"]["class"] = d.schema.class_labels().at(majority);
  summary["majority"]["accuracy"] =
      round6(static_cast<double>(majority_hits) / static_cast<double>(d.instances.size()));

  std::cout << "greedy depth " << max_depth << ": " << fixed(report.accuracy.mean, 4) << " +- "
            << fixed(report.accuracy.half_width, 4) << " (" << folds << "-fold)\n";
  if (with_rldt) {
    validate_agent(rc.agent, d.schema);
    const auto results =
        cross_validate_learner(d.instances, d.schema, rc.agent, folds, fold_seed, passes);
    std::vector<double> acc, q;
    for (const auto& r : results) {
      acc.push_back(r.test.accuracy);
      q.push_back(r.test.mean_queries);
    }
    ordered_json jr;
    jr["passes"] = passes;
    ordered_json ja = ordered_json::array();
    for (double a : acc) ja.push_back(round6(a));
    jr["fold_accuracy"] = ja;
    jr["accuracy"] = interval_json(confidence_interval(acc), true);
    jr["queries"] = interval_json(confidence_interval(q), true);
    summary["rldt"] = jr;
    std::cout << "rldt frozen: " << fixed(confidence_interval(acc).mean, 4) << " +- "
              << fixed(confidence_interval(acc).half_width, 4) << ", queries "
              << fixed(confidence_interval(q).mean, 3) << "\n";
  }

  OutputSet out(flags.out);
  out.add("baseline.json", dump(summary));
  out.add("baseline_tree.txt", full_tree.to_text(d.schema));
  out.add("baseline_tree.dot", full_tree.to_dot(d.schema));
  out.commit();
  return 0;
}

int cmd_export_tree(const CommonFlags& flags, const std::string& qtable_path, int max_depth) {
  const RunConfig rc = flags.resolve();
  const LoadedDataset d = load_dataset(rc);
  std::ifstream in(qtable_path);
  if (!in) throw CliError("io", "cannot read " + qtable_path);
  QTable q;
  try {
    q = QTable::read(in);
  } catch (const std::exception& e) {
    throw CliError("data", e.what());
  }
  const auto& layout = q.layout();
  if (layout.num_features != d.schema.num_features() || layout.num_classes != d.schema.num_classes()) {
    throw CliError("data", "qtable layout does not match the dataset schema");
  }
  const int depth = max_depth < 0 ? layout.max_queries : max_depth;
  const auto tree = extract_policy_tree(q, d.schema, depth);
  std::ostringstream normalized;
  q.write(normalized);
  OutputSet out(flags.out);
  out.add("tree.txt", tree.to_text(d.schema));
  out.add("tree.dot", tree.to_dot(d.schema));
  out.add("qtable.tsv", normalized.str());
  out.commit();
  std::cout << "tree with " << tree.size() << " nodes, depth " << tree.depth() << "\n";
  return 0;
}

struct AnalyzeFlags {
  double p = 0.5, p_prime = 1.0, gamma = 0.8, cost = 0.0, r_plus = 5.0, r_minus = -5.0;
  int fuzz = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_analyze(const AnalyzeFlags& a) {
  ordered_json j;
  try {
    j["p"] = a.p;
    j["p_prime"] = a.p_prime;
    j["gamma"] = a.gamma;
    j["query_cost"] = a.cost;
    j["r_plus"] = a.r_plus;
    j["r_minus"] = a.r_minus;
    j["report_return"] = round6(expected_report_return(a.p, a.r_plus, a.r_minus));
    j["report_return_after_query"] = round6(expected_report_return(a.p_prime, a.r_plus, a.r_minus));
    j["query_advantage"] =
        round6(query_advantage({a.p, a.p_prime}, a.gamma, a.cost, a.r_plus, a.r_minus));
    advantage_consistency_check({a.p, a.p_prime}, a.gamma, a.cost, a.r_plus, a.r_minus);
  } catch (const std::invalid_argument& e) {
    throw CliError("usage", e.what());
  }
  if (a.fuzz > 0) {
    Rng rng(a.seed);
    double worst = 0;
    for (int i = 0; i < a.fuzz; ++i) {
      const DensityPair pair{uniform01(rng), uniform01(rng)};
      const double g = uniform01(rng);
      const double c = 10 * uniform01(rng);
      const double rp = 10 * uniform01(rng);
      const double rm = -10 * uniform01(rng);
      worst = std::max(worst, std::abs(advantage_consistency_check(pair, g, c, rp, rm)));
    }
    j["fuzz"]["tuples"] = a.fuzz;
    j["fuzz"]["max_abs_diff"] = worst;
  }
  const std::string text = dump(j);
  if (!a.out.empty()) {
    OutputSet out(a.out);
    out.add("analyze.json", text);
    out.commit();
  }
  std::cout << text;
  return 0;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace
}  // namespace rldt::cli

int main(int argc, char** argv) {
  using namespace rldt::cli;
  CLI::App app{"Online decision trees learned with tabular Q-learning", "rldt"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Prequential runs on a dataset");
  run_flags.attach(run, true);

  CommonFlags sweep_flags;
  std::string sweep_param, sweep_values;
  auto* sw = app.add_subcommand("sweep", "Repeat runs over values of one parameter");
  sweep_flags.attach(sw, true);
  sw->add_option("--param", sweep_param, "query_cost_uniform | gamma | alpha | epsilon | max_queries | update_mode | num_paths")
      ->required();
  sw->add_option("--values", sweep_values, "Comma-separated values")->required();

  CommonFlags drift_flags;
  SynthFlags synth;
  std::string alphas = "0.01,0.05,0.1,0.2,0.5";
  std::size_t freeze_at = 0;
  auto* dr = app.add_subcommand("drift", "Ordered-stream runs, one per learning rate");
  drift_flags.attach(dr, false);
  dr->add_option("--alphas", alphas, "Learning rates to compare")->capture_default_str();
  auto* freeze_opt = dr->add_option("--freeze-at", freeze_at, "Stop learning from this point on");
  dr->add_flag("--synth", synth.enabled, "Use a synthetic stream instead of --data");
  dr->add_option("--synth-features", synth.features)->capture_default_str();
  dr->add_option("--synth-arity", synth.arity)->capture_default_str();
  dr->add_option("--synth-classes", synth.classes)->capture_default_str();
  dr->add_option("--length", synth.length)->capture_default_str();
  dr->add_option("--switch-at", synth.switch_at)->capture_default_str();
  dr->add_option("--rule-before", synth.before)->capture_default_str();
  dr->add_option("--rule-after", synth.after)->capture_default_str();
  dr->add_option("--data-seed", synth.data_seed)->capture_default_str();

  CommonFlags base_flags;
  int max_depth = 2, folds = 5, passes = 1;
  bool with_rldt = false;
  auto* bl = app.add_subcommand("baseline", "Cross-validated depth-limited greedy tree");
  base_flags.attach(bl, false);
  bl->add_option("--max-depth", max_depth)->capture_default_str();
  bl->add_option("--folds", folds)->capture_default_str();
  bl->add_flag("--with-rldt", with_rldt, "Also score the frozen learner on the same folds");
  bl->add_option("--passes", passes, "Training passes per fold for --with-rldt")->capture_default_str();

  CommonFlags export_flags;
  std::string qtable_path;
  int export_depth = -1;
  auto* ex = app.add_subcommand("export-tree", "Policy tree from a Q-table dump");
  export_flags.attach(ex, false);
  ex->add_option("--qtable", qtable_path, "Dump written by run (qtable_run0.tsv)")->required();
  ex->add_option("--max-depth", export_depth, "Default: the table's query limit");

  AnalyzeFlags an;
  auto* az = app.add_subcommand("analyze", "Closed-form query advantage");
  az->add_option("--p", an.p, "Class density before the query")->capture_default_str();
  az->add_option("--p-prime", an.p_prime, "Class density after the query")->capture_default_str();
  az->add_option("--gamma", an.gamma)->capture_default_str();
  az->add_option("--qcost", an.cost)->capture_default_str();
  az->add_option("--rplus", an.r_plus)->capture_default_str();
  az->add_option("--rminus", an.r_minus)->capture_default_str();
  az->add_option("--fuzz", an.fuzz, "Also check the identity on N random tuples");
  az->add_option("--seed", an.seed)->capture_default_str();
  az->add_option("--out", an.out, "Also write analyze.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*sw) return cmd_sweep(sweep_flags, sweep_param, sweep_values);
    if (*dr) {
      std::optional<std::size_t> freeze;
      if (freeze_opt->count()) freeze = freeze_at;
      return cmd_drift(drift_flags, synth, alphas, freeze);
    }
    if (*bl) return cmd_baseline(base_flags, max_depth, folds, with_rldt, passes);
    if (*ex) return cmd_export_tree(export_flags, qtable_path, export_depth);
    if (*az) return cmd_analyze(an);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.kind << ": " << one_line(e.what()) << "\n";
    return e.kind == "usage" ? 2 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
