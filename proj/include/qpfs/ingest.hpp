#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qpfs {

enum class ColumnKind { categorical, continuous, binary };
enum class ColumnRole { feature, target };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(ColumnRole role);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  ColumnRole role = ColumnRole::feature;
  // Target only: the raw symbol coded as label 1. Empty means "the larger of
  // the two observed symbols" (numeric order when both parse as numbers).
  std::string positive_label;
};

// An ordered column list with exactly one binary target.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  std::size_t target_column() const { return target_; }
  // Column positions of the features, in file order.
  const std::vector<std::size_t>& feature_columns() const { return features_; }

 private:
  std::vector<ColumnSpec> columns_;
  std::size_t target_ = 0;
  std::vector<std::size_t> features_;
};

// One declaration per line: `name kind role [positive=<symbol>]`.
// Blank lines and `#` comments are ignored. Errors name the offending line.
Schema parse_schema(std::string_view text, std::string_view source_name = "<schema>");
Schema load_schema(const std::filesystem::path& path);

struct Missing {
  bool operator==(const Missing&) const = default;
};
// Continuous cells hold numbers, other kinds keep the raw symbol.
using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

struct ParseOptions {
  // ' ' means "runs of blanks/tabs separate cells" (the UCI layout).
  char delimiter = ',';
  bool has_header = false;
  std::vector<std::string> missing_markers{"?", ""};
};

class Dataset {
 public:
  Dataset(Schema schema, std::vector<std::vector<Cell>> rows,
          std::vector<std::size_t> row_keys = {});

  const Schema& schema() const { return schema_; }
  const std::vector<ColumnSpec>& columns() const { return schema_.columns(); }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  // Stable per-row key; the 0-based source line order for loaded files.
  const std::vector<std::size_t>& row_keys() const { return row_keys_; }

  std::size_t n_samples() const { return rows_.size(); }
  std::size_t n_features() const { return schema_.feature_columns().size(); }

  // Feature j (0-based over features only).
  const ColumnSpec& feature_spec(std::size_t j) const;
  const Cell& feature_cell(std::size_t row, std::size_t j) const;
  std::vector<std::string> feature_names() const;

  // Target as {0,1}; throws DataError on missing or non-binary targets.
  std::vector<int> target_labels() const;

  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  Schema schema_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::size_t> row_keys_;
};

Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 const ParseOptions& options = {});
Dataset parse_csv(std::string_view text, const Schema& schema,
                  const ParseOptions& options = {},
                  std::string_view source_name = "<input>");

enum class BinningMethod { equal_frequency, equal_width };
enum class MissingPolicy {
  impute_mode,    // most frequent value for every column kind
  impute_median,  // median for continuous, most frequent value otherwise
  drop_row,
};

std::string_view to_string(BinningMethod m);
std::string_view to_string(MissingPolicy m);
BinningMethod parse_binning_method(std::string_view s);
MissingPolicy parse_missing_policy(std::string_view s);

struct DiscretizationPolicy {
  BinningMethod method = BinningMethod::equal_frequency;
  int n_bins = 10;
  MissingPolicy missing_policy = MissingPolicy::impute_median;
};

using Code = std::uint32_t;

struct DiscretizedDataset {
  std::vector<std::string> feature_names;
  // Column-major: feature_codes[j][i] is the bin of sample i in feature j.
  std::vector<std::vector<Code>> feature_codes;
  std::vector<int> target;
  std::vector<Code> bin_counts;
  DiscretizationPolicy provenance;
  // Dataset row index for each sample; identity unless rows were dropped.
  std::vector<std::size_t> source_rows;
  // Non-fatal diagnostics (constant columns and the like).
  std::vector<std::string> warnings;

  std::size_t n_samples() const { return target.size(); }
  std::size_t n_features() const { return feature_codes.size(); }
  std::span<const Code> column(std::size_t j) const { return feature_codes[j]; }
};

DiscretizedDataset discretize(const Dataset& data, const DiscretizationPolicy& policy = {});

// Single-column binning, exposed for reuse and testing. Codes are gap-free.
std::vector<Code> equal_frequency_bins(std::span<const double> values, int n_bins);
std::vector<Code> equal_width_bins(std::span<const double> values, int n_bins);
// First-appearance coding of symbols.
std::vector<Code> first_appearance_codes(std::span<const std::string> symbols);

}  // namespace qpfs
