#pragma once

// CSV ingestion: categorical coding, binning of numeric columns, and the
// schema sidecar that describes how each column is treated.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rldt/schema.hpp"

namespace rldt {

enum class ColumnKind { kCategorical, kNumeric, kIgnore };
enum class BinStrategy { kEqualFrequency, kEqualWidth };
enum class MissingPolicy { kDropRow, kAsCategory };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kCategorical;
  BinStrategy strategy = BinStrategy::kEqualFrequency;
  int bins = 10;
  double query_cost = 0.0;
  // Declared vocabulary for a categorical column; codes follow this order and
  // values outside it are rejected. Empty means first-seen coding.
  std::vector<std::string> values;
};

/// Per-column ingestion rules, read from the schema sidecar.
struct DiscretizationSpec {
  std::string class_column;  // header name, or a column index ("0", "-1" = last)
  std::vector<std::string> class_values;  // optional declared class order
  std::vector<ColumnSpec> columns;        // columns not listed use `fallback`
  ColumnSpec fallback;
  MissingPolicy missing = MissingPolicy::kDropRow;
  // Column names for a file without a header row; empty means the first row is the header.
  std::vector<std::string> header;

  const ColumnSpec* find(std::string_view name) const;
};

DiscretizationSpec parse_sidecar(std::string_view json_text);
DiscretizationSpec load_sidecar(const std::filesystem::path& path);
std::string sidecar_to_json(const DiscretizationSpec& spec);

/// Cut points for one numeric column. Throws std::invalid_argument for
/// bins < 2, an empty column or a constant column.
///
/// Equal-frequency cuts sit at the linear-interpolated quantiles k/bins. A
/// quantile landing exactly on an observed value moves up to the midpoint
/// between that value and the next distinct one, so the value stays in the
/// lower bin. Cuts that would leave a bin empty are dropped, hence the
/// resulting arity may be smaller than `bins`.
std::vector<double> discretize_fit(std::span<const double> column, BinStrategy strategy,
                                   int bins);

/// Index of the first cut strictly greater than `value` (== cuts.size() if none).
int discretize_code(std::span<const double> cuts, double value);

struct LoadedDataset {
  FeatureSchema schema;
  std::vector<LabeledInstance> instances;
  std::vector<std::string> column_names;   // kept feature columns, schema order
  std::map<std::string, std::vector<double>> cut_points;
  std::size_t rows_read = 0;
  std::size_t dropped_missing = 0;
  std::size_t dropped_malformed = 0;
};

/// Throws std::runtime_error for an unreadable file and std::invalid_argument
/// for a missing class column or a feature with fewer than 2 distinct values.
LoadedDataset load_csv(const std::filesystem::path& path, const DiscretizationSpec& spec);
LoadedDataset parse_csv(std::string_view text, const DiscretizationSpec& spec);

/// Codes back to their text labels (categories, or bin ranges for numeric columns).
std::vector<std::string> decode_instance(const FeatureSchema& schema, const LabeledInstance& x);
/// Inverse of decode_instance; throws on an unknown label.
LabeledInstance encode_instance(const FeatureSchema& schema, std::span<const std::string> tokens);

std::string cut_points_to_json(const LoadedDataset& data);

/// One CSV record split on commas; double-quoted fields may contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace rldt
