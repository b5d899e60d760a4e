#include "rldt/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace rldt {

using nlohmann::json;

const ColumnSpec* DiscretizationSpec::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

ColumnKind kind_from(const std::string& s) {
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "ignore") return ColumnKind::kIgnore;
  throw std::invalid_argument("sidecar: unknown column kind '" + s + "'");
}

const char* kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kIgnore: return "ignore";
  }
  return "?";
}

BinStrategy strategy_from(const std::string& s) {
  if (s == "equal_frequency") return BinStrategy::kEqualFrequency;
  if (s == "equal_width") return BinStrategy::kEqualWidth;
  throw std::invalid_argument("sidecar: unknown binning strategy '" + s + "'");
}

const char* strategy_name(BinStrategy s) {
  return s == BinStrategy::kEqualFrequency ? "equal_frequency" : "equal_width";
}

ColumnSpec column_from(const json& j, ColumnSpec base) {
  if (j.contains("name")) base.name = j.at("name").get<std::string>();
  if (j.contains("kind")) base.kind = kind_from(j.at("kind").get<std::string>());
  if (j.contains("strategy")) base.strategy = strategy_from(j.at("strategy").get<std::string>());
  if (j.contains("bins")) base.bins = j.at("bins").get<int>();
  if (j.contains("query_cost")) base.query_cost = j.at("query_cost").get<double>();
  if (j.contains("values")) base.values = j.at("values").get<std::vector<std::string>>();
  if (base.kind == ColumnKind::kNumeric && base.bins < 2) {
    throw std::invalid_argument("sidecar: column '" + base.name + "' needs bins >= 2");
  }
  if (base.query_cost < 0) {
    throw std::invalid_argument("sidecar: column '" + base.name + "' has negative query_cost");
  }
  return base;
}

json column_to_json(const ColumnSpec& c) {
  json j;
  if (!c.name.empty()) j["name"] = c.name;
  j["kind"] = kind_name(c.kind);
  if (c.kind == ColumnKind::kNumeric) {
    j["strategy"] = strategy_name(c.strategy);
    j["bins"] = c.bins;
  }
  j["query_cost"] = c.query_cost;
  if (!c.values.empty()) j["values"] = c.values;
  return j;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "?"; }

std::optional<double> parse_double(std::string_view s) {
  // from_chars for double is available in libstdc++ 11.
  double out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(out)) return std::nullopt;
  return out;
}

std::string format_cut(double c) {
  std::ostringstream os;
  os << std::setprecision(6) << c;
  return os.str();
}

std::vector<std::string> bin_labels(const std::vector<double>& cuts) {
  std::vector<std::string> labels;
  for (std::size_t b = 0; b <= cuts.size(); ++b) {
    std::string lo = b == 0 ? "-inf" : format_cut(cuts[b - 1]);
    std::string hi = b == cuts.size() ? "inf" : format_cut(cuts[b]);
    labels.push_back("[" + lo + "," + hi + ")");
  }
  return labels;
}

/// Dense codes in first-seen order, optionally preceded by a declared vocabulary.
class Codebook {
 public:
  explicit Codebook(const std::vector<std::string>& declared) : closed_(!declared.empty()) {
    for (const auto& v : declared) intern(v);
  }
  std::optional<int> code(const std::string& v) {
    auto it = index_.find(v);
    if (it != index_.end()) return it->second;
    if (closed_) return std::nullopt;
    return intern(v);
  }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  int intern(const std::string& v) {
    auto [it, inserted] = index_.emplace(v, static_cast<int>(labels_.size()));
    if (inserted) labels_.push_back(v);
    return it->second;
  }
  bool closed_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> labels_;
};

}  // namespace

DiscretizationSpec parse_sidecar(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sidecar: ") + e.what());
  }
  DiscretizationSpec spec;
  if (!j.contains("class_column")) throw std::invalid_argument("sidecar: class_column missing");
  const auto& cc = j.at("class_column");
  spec.class_column = cc.is_number_integer() ? std::to_string(cc.get<int>()) : cc.get<std::string>();
  if (j.contains("class_values")) spec.class_values = j.at("class_values").get<std::vector<std::string>>();
  if (j.contains("missing")) {
    auto m = j.at("missing").get<std::string>();
    if (m == "drop") {
      spec.missing = MissingPolicy::kDropRow;
    } else if (m == "category") {
      spec.missing = MissingPolicy::kAsCategory;
    } else {
      throw std::invalid_argument("sidecar: missing must be 'drop' or 'category'");
    }
  }
  if (j.contains("header")) spec.header = j.at("header").get<std::vector<std::string>>();
  if (j.contains("default")) spec.fallback = column_from(j.at("default"), ColumnSpec{});
  if (j.contains("columns")) {
    for (const auto& c : j.at("columns")) {
      if (!c.contains("name")) throw std::invalid_argument("sidecar: column entry without name");
      spec.columns.push_back(column_from(c, spec.fallback));
    }
  }
  return spec;
}

DiscretizationSpec load_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read schema sidecar " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_sidecar(buf.str());
}

std::string sidecar_to_json(const DiscretizationSpec& spec) {
  json j;
  j["class_column"] = spec.class_column;
  if (!spec.class_values.empty()) j["class_values"] = spec.class_values;
  j["missing"] = spec.missing == MissingPolicy::kDropRow ? "drop" : "category";
  if (!spec.header.empty()) j["header"] = spec.header;
  j["default"] = column_to_json(spec.fallback);
  j["columns"] = json::array();
  for (const auto& c : spec.columns) j["columns"].push_back(column_to_json(c));
  return j.dump(2);
}

std::vector<double> discretize_fit(std::span<const double> column, BinStrategy strategy,
                                   int bins) {
  if (bins < 2) throw std::invalid_argument("discretize: bins must be >= 2");
  if (column.empty()) throw std::invalid_argument("discretize: empty column");
  std::vector<double> sorted(column.begin(), column.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  if (lo == hi) throw std::invalid_argument("discretize: constant column");

  std::vector<double> cuts;
  if (strategy == BinStrategy::kEqualWidth) {
    for (int k = 1; k < bins; ++k) cuts.push_back(lo + (hi - lo) * k / bins);
    return cuts;
  }

  const auto n = sorted.size();
  for (int k = 1; k < bins; ++k) {
    const double pos = static_cast<double>(n - 1) * k / bins;
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    double q = i + 1 < n ? sorted[i] + frac * (sorted[i + 1] - sorted[i]) : sorted[i];
    if (std::binary_search(sorted.begin(), sorted.end(), q)) {
      auto next = std::upper_bound(sorted.begin(), sorted.end(), q);
      if (next == sorted.end()) continue;
      q = q + (*next - q) / 2;
    }
    cuts.push_back(q);
  }
  // Keep a cut only if the bin it closes contains at least one value.
  std::vector<double> kept;
  double lower = -INFINITY;
  for (double c : cuts) {
    auto first = std::lower_bound(sorted.begin(), sorted.end(), lower);
    if (first != sorted.end() && *first < c && c > lower) {
      kept.push_back(c);
      lower = c;
    }
  }
  return kept;
}

int discretize_code(std::span<const double> cuts, double value) {
  return static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  out.push_back(std::move(cell));
  for (auto& c : out) {
    while (!c.empty() && (c.back() == ' ' || c.back() == '\r')) c.pop_back();
    std::size_t lead = 0;
    while (lead < c.size() && c[lead] == ' ') ++lead;
    c.erase(0, lead);
  }
  return out;
}

LoadedDataset load_csv(const std::filesystem::path& path, const DiscretizationSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), spec);
}

LoadedDataset parse_csv(std::string_view text, const DiscretizationSpec& spec) {
  std::vector<std::vector<std::string>> rows;
  if (!spec.header.empty()) rows.push_back(spec.header);
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::invalid_argument("csv: no header row");
  const auto header = rows.front();
  const auto width = header.size();

  // Resolve the class column: header name first, then a numeric index.
  std::optional<std::size_t> class_idx;
  for (std::size_t c = 0; c < width; ++c) {
    if (header[c] == spec.class_column) class_idx = c;
  }
  if (!class_idx) {
    int idx = 0;
    const auto& s = spec.class_column;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (!s.empty() && ec == std::errc{} && ptr == s.data() + s.size()) {
      if (idx < 0) idx += static_cast<int>(width);
      if (idx >= 0 && idx < static_cast<int>(width)) class_idx = static_cast<std::size_t>(idx);
    }
  }
  if (!class_idx) throw std::invalid_argument("csv: class column '" + spec.class_column + "' not found");

  struct Column {
    std::size_t index;
    ColumnSpec spec;
  };
  std::vector<Column> columns;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == *class_idx) continue;
    ColumnSpec cs = spec.fallback;
    if (const auto* found = spec.find(header[c])) cs = *found;
    cs.name = header[c];
    if (cs.kind != ColumnKind::kIgnore) columns.push_back({c, cs});
  }

  LoadedDataset out;
  std::vector<const std::vector<std::string>*> kept;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++out.rows_read;
    if (row.size() != width) {
      ++out.dropped_malformed;
      continue;
    }
    bool missing = is_missing(row[*class_idx]);
    bool malformed = false;
    for (const auto& col : columns) {
      const auto& cell = row[col.index];
      if (col.spec.kind == ColumnKind::kNumeric) {
        if (is_missing(cell)) {
          missing = true;
        } else if (!parse_double(cell)) {
          malformed = true;
        }
      } else if (is_missing(cell) && spec.missing == MissingPolicy::kDropRow) {
        missing = true;
      }
    }
    if (malformed) {
      ++out.dropped_malformed;
    } else if (missing) {
      ++out.dropped_missing;
    } else {
      kept.push_back(&row);
    }
  }

  std::vector<Feature> features;
  std::vector<double> costs;
  std::vector<std::vector<int>> codes(columns.size(), std::vector<int>(kept.size()));
  for (std::size_t ci = 0; ci < columns.size(); ++ci) {
    const auto& col = columns[ci];
    Feature f{col.spec.name, 0, {}};
    if (col.spec.kind == ColumnKind::kNumeric) {
      std::vector<double> values;
      values.reserve(kept.size());
      for (const auto* row : kept) values.push_back(*parse_double((*row)[col.index]));
      std::vector<double> cuts;
      try {
        cuts = discretize_fit(values, col.spec.strategy, col.spec.bins);
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument("csv: column '" + col.spec.name +
                                    "' has fewer than 2 distinct values");
      }
      for (std::size_t r = 0; r < kept.size(); ++r) codes[ci][r] = discretize_code(cuts, values[r]);
      f.labels = bin_labels(cuts);
      out.cut_points[col.spec.name] = cuts;
    } else {
      Codebook book(col.spec.values);
      for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto& cell = (*kept[r])[col.index];
        auto code = book.code(cell);
        if (!code) {
          throw std::invalid_argument("csv: value '" + cell + "' not in declared values of '" +
                                      col.spec.name + "'");
        }
        codes[ci][r] = *code;
      }
      f.labels = book.labels();
    }
    f.arity = static_cast<int>(f.labels.size());
    if (f.arity < 2) {
      throw std::invalid_argument("csv: column '" + col.spec.name +
                                  "' has fewer than 2 distinct values");
    }
    features.push_back(std::move(f));
    costs.push_back(col.spec.query_cost);
    out.column_names.push_back(col.spec.name);
  }

  Codebook classes(spec.class_values);
  std::vector<int> labels(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    const auto& cell = (*kept[r])[*class_idx];
    auto code = classes.code(cell);
    if (!code) throw std::invalid_argument("csv: class '" + cell + "' not in declared class_values");
    labels[r] = *code;
  }
  if (classes.labels().size() < 2) throw std::invalid_argument("csv: fewer than 2 classes");

  out.schema = FeatureSchema(std::move(features), static_cast<int>(classes.labels().size()),
                             std::move(costs), classes.labels());
  out.instances.resize(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    auto& x = out.instances[r];
    x.values.resize(columns.size());
    for (std::size_t ci = 0; ci < columns.size(); ++ci) x.values[ci] = codes[ci][r];
    x.label = labels[r];
  }
  return out;
}

std::vector<std::string> decode_instance(const FeatureSchema& schema, const LabeledInstance& x) {
  check_instance(schema, x);
  std::vector<std::string> out;
  for (int j = 0; j < schema.num_features(); ++j) out.push_back(schema.feature(j).labels[x.values[j]]);
  out.push_back(schema.class_labels()[x.label]);
  return out;
}

LabeledInstance encode_instance(const FeatureSchema& schema, std::span<const std::string> tokens) {
  if (static_cast<int>(tokens.size()) != schema.num_features() + 1) {
    throw std::invalid_argument("encode: token count does not match schema");
  }
  auto lookup = [](const std::vector<std::string>& labels, const std::string& t) {
    auto it = std::find(labels.begin(), labels.end(), t);
    if (it == labels.end()) throw std::invalid_argument("encode: unknown label '" + t + "'");
    return static_cast<int>(it - labels.begin());
  };
  LabeledInstance x;
  for (int j = 0; j < schema.num_features(); ++j) {
    x.values.push_back(lookup(schema.feature(j).labels, tokens[j]));
  }
  x.label = lookup(schema.class_labels(), tokens.back());
  return x;
}

std::string cut_points_to_json(const LoadedDataset& data) {
  json j = json::object();
  for (const auto& [name, cuts] : data.cut_points) j[name] = cuts;
  return j.dump(2);
}

}  // namespace rldt
