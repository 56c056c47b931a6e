#include "qpfs/ingest.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::binary: return "binary";
  }
  return "?";
}

std::string_view to_string(ColumnRole role) {
  return role == ColumnRole::target ? "target" : "feature";
}

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::size_t n_targets = 0;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].role == ColumnRole::target) {
      ++n_targets;
      target_ = c;
    } else {
      features_.push_back(c);
    }
  }
  if (n_targets != 1) {
    throw ConfigError(fmt::format("schema must declare exactly one target column, found {}",
                                  n_targets));
  }
  if (columns_[target_].kind != ColumnKind::binary) {
    throw ConfigError(fmt::format("target column '{}' must be binary", columns_[target_].name));
  }
}

Schema parse_schema(std::string_view text, std::string_view source_name) {
  std::vector<ColumnSpec> columns;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = detail::split_blanks(line);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& msg) {
      return ConfigError(fmt::format("{}:{}: {}", source_name, line_no, msg));
    };
    if (tokens.size() < 3) throw fail("expected `name kind role [positive=<symbol>]`");

    ColumnSpec spec;
    spec.name = std::string(tokens[0]);
    if (tokens[1] == "categorical") spec.kind = ColumnKind::categorical;
    else if (tokens[1] == "continuous") spec.kind = ColumnKind::continuous;
    else if (tokens[1] == "binary") spec.kind = ColumnKind::binary;
    else throw fail(fmt::format("unknown column kind '{}'", tokens[1]));

    if (tokens[2] == "feature") spec.role = ColumnRole::feature;
    else if (tokens[2] == "target") spec.role = ColumnRole::target;
    else throw fail(fmt::format("unknown column role '{}'", tokens[2]));

    for (std::size_t t = 3; t < tokens.size(); ++t) {
      constexpr std::string_view key = "positive=";
      if (tokens[t].starts_with(key) && spec.role == ColumnRole::target) {
        spec.positive_label = std::string(tokens[t].substr(key.size()));
      } else {
        throw fail(fmt::format("unexpected option '{}'", tokens[t]));
      }
    }
    columns.push_back(std::move(spec));
  }
  if (columns.empty()) throw ConfigError(fmt::format("{}: schema declares no columns", source_name));
  try {
    return Schema(std::move(columns));
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source_name, e.what()));
  }
}

Schema load_schema(const std::filesystem::path& path) {
  return parse_schema(detail::read_file(path, ErrorKind::config), path.string());
}

Dataset::Dataset(Schema schema, std::vector<std::vector<Cell>> rows,
                 std::vector<std::size_t> row_keys)
    : schema_(std::move(schema)), rows_(std::move(rows)), row_keys_(std::move(row_keys)) {
  if (row_keys_.empty()) {
    row_keys_.resize(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) row_keys_[i] = i;
  }
  if (row_keys_.size() != rows_.size()) throw DataError("row key count does not match row count");
  for (const auto& row : rows_) {
    if (row.size() != schema_.size()) throw DataError("row arity does not match schema");
  }
}

const ColumnSpec& Dataset::feature_spec(std::size_t j) const {
  return schema_.columns()[schema_.feature_columns().at(j)];
}

const Cell& Dataset::feature_cell(std::size_t row, std::size_t j) const {
  return rows_[row][schema_.feature_columns()[j]];
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> names;
  for (auto c : schema_.feature_columns()) names.push_back(schema_.columns()[c].name);
  return names;
}

std::vector<int> Dataset::target_labels() const {
  const auto t = schema_.target_column();
  const auto& spec = schema_.columns()[t];
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto* sym = std::get_if<std::string>(&rows_[i][t]);
    if (!sym) throw DataError(fmt::format("row {}: target '{}' is missing", i + 1, spec.name));
    if (std::find(seen.begin(), seen.end(), *sym) == seen.end()) seen.push_back(*sym);
  }
  if (seen.size() > 2) {
    throw DataError(fmt::format("target '{}' has {} distinct values, expected 2", spec.name,
                                seen.size()));
  }
  std::string positive = spec.positive_label;
  if (positive.empty()) {
    positive = seen.empty() ? std::string() : seen.front();
    for (const auto& s : seen) {
      if (detail::symbol_less(positive, s)) positive = s;
    }
    // A single observed symbol is label 0 unless declared positive.
    if (seen.size() < 2) positive.clear();
  } else if (std::find(seen.begin(), seen.end(), positive) == seen.end() && seen.size() == 2) {
    throw DataError(fmt::format("target '{}': declared positive label '{}' not present",
                                spec.name, positive));
  }
  std::vector<int> labels(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    labels[i] = std::get<std::string>(rows_[i][t]) == positive ? 1 : 0;
  }
  return labels;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<std::vector<Cell>> out;
  std::vector<std::size_t> keys;
  out.reserve(rows.size());
  keys.reserve(rows.size());
  for (auto r : rows) {
    out.push_back(rows_.at(r));
    keys.push_back(row_keys_[r]);
  }
  return Dataset(schema_, std::move(out), std::move(keys));
}

namespace {

std::vector<std::string_view> split_cells(std::string_view line, char delim) {
  if (delim == ' ') return detail::split_blanks(line);
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find(delim, pos);
    auto cell = detail::trim(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') {
      cell = cell.substr(1, cell.size() - 2);
    }
    cells.push_back(cell);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return cells;
}

}  // namespace

Dataset parse_csv(std::string_view text, const Schema& schema, const ParseOptions& options,
                  std::string_view source_name) {
  std::vector<std::vector<Cell>> rows;
  std::size_t line_no = 0;
  bool header_pending = options.has_header;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = split_cells(line, options.delimiter);
    if (cells.size() != schema.size()) {
      throw DataError(fmt::format("{}:{}: expected {} cells, found {}", source_name, line_no,
                                  schema.size(), cells.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<Cell> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& spec = schema.columns()[c];
      const auto cell = cells[c];
      if (std::find(options.missing_markers.begin(), options.missing_markers.end(), cell) !=
          options.missing_markers.end()) {
        row.emplace_back(Missing{});
      } else if (spec.kind == ColumnKind::continuous) {
        auto value = detail::parse_double(cell);
        if (!value) {
          throw DataError(fmt::format("{}:{}: column '{}' is continuous but holds '{}'",
                                      source_name, line_no, spec.name, cell));
        }
        row.emplace_back(*value);
      } else {
        row.emplace_back(std::string(cell));
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(fmt::format("{}: zero data rows", source_name));
  return Dataset(schema, std::move(rows));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 const ParseOptions& options) {
  return parse_csv(detail::read_file(path, ErrorKind::data), schema, options, path.string());
}

}  // namespace qpfs
