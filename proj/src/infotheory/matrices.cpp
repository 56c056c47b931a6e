#include <algorithm>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/infotheory.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(QDiagonal d) { return d == QDiagonal::entropy ? "entropy" : "zero"; }

QDiagonal parse_q_diagonal(std::string_view s) {
  if (s == "entropy") return QDiagonal::entropy;
  if (s == "zero") return QDiagonal::zero;
  throw ConfigError(fmt::format("unknown q-diagonal convention '{}' (expected entropy|zero)", s));
}

RedundancyMatrix build_redundancy_matrix(const DiscretizedDataset& data, QDiagonal diagonal) {
  const auto m = data.n_features();
  if (m == 0) throw DataError("redundancy matrix needs at least one feature");
  RedundancyMatrix q;
  q.feature_names = data.feature_names;
  q.diagonal = diagonal;
  q.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    q.values(ii, ii) = diagonal == QDiagonal::entropy ? entropy(data.column(i)) : 0.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double v = mutual_information(contingency(data.column(i), data.column(j)));
      q.values(ii, jj) = v;
      q.values(jj, ii) = v;
    }
  }
  return q;
}

RelevanceVector build_relevance_vector(const DiscretizedDataset& data) {
  const auto ones = std::count(data.target.begin(), data.target.end(), 1);
  if (ones == 0 || ones == static_cast<long>(data.target.size())) {
    throw DataError("relevance needs both target labels present");
  }
  RelevanceVector f;
  f.feature_names = data.feature_names;
  f.values.resize(static_cast<Eigen::Index>(data.n_features()));
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    f.values(static_cast<Eigen::Index>(j)) =
        mutual_information(contingency(data.column(j), std::span<const int>(data.target)));
  }
  return f;
}

std::string format_redundancy(const RedundancyMatrix& q) {
  std::string out = fmt::format("# redundancy (bits) diagonal={}\nfeature", to_string(q.diagonal));
  for (const auto& n : q.feature_names) out += "\t" + n;
  out += "\n";
  for (Eigen::Index i = 0; i < q.values.rows(); ++i) {
    out += q.feature_names[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < q.values.cols(); ++j) {
      out += "\t" + detail::format_double(q.values(i, j));
    }
    out += "\n";
  }
  return out;
}

std::string format_relevance(const RelevanceVector& f) {
  std::string out = "# relevance (bits)\nfeature\trelevance\n";
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    out += fmt::format("{}\t{}\n", f.feature_names[static_cast<std::size_t>(i)],
                       detail::format_double(f.values(i)));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    auto next = line.find('\t', pos);
    cells.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return cells;
}

double cell_value(std::string_view s) {
  auto v = detail::parse_double(s);
  if (!v) throw DataError(fmt::format("not a number: '{}'", s));
  return *v;
}

}  // namespace

RedundancyMatrix parse_redundancy(std::string_view text) {
  RedundancyMatrix q;
  std::vector<std::vector<double>> rows;
  bool header = true;
  for (auto line : detail::split_lines(text)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.find("diagonal=zero") != std::string_view::npos) q.diagonal = QDiagonal::zero;
      continue;
    }
    auto cells = split_tabs(line);
    if (header) {
      for (std::size_t c = 1; c < cells.size(); ++c) q.feature_names.emplace_back(cells[c]);
      header = false;
      continue;
    }
    if (cells.size() != q.feature_names.size() + 1) throw DataError("ragged redundancy matrix row");
    std::vector<double> row;
    for (std::size_t c = 1; c < cells.size(); ++c) row.push_back(cell_value(cells[c]));
    rows.push_back(std::move(row));
  }
  const auto m = static_cast<Eigen::Index>(q.feature_names.size());
  if (static_cast<Eigen::Index>(rows.size()) != m) throw DataError("redundancy matrix is not square");
  q.values.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) q.values(i, j) = rows[i][j];
  return q;
}

RelevanceVector parse_relevance(std::string_view text) {
  RelevanceVector f;
  std::vector<double> vals;
  bool header = true;
  for (auto line : detail::split_lines(text)) {
    if (line.empty() || line.front() == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = split_tabs(line);
    if (cells.size() != 2) throw DataError("relevance rows need two cells");
    f.feature_names.emplace_back(cells[0]);
    vals.push_back(cell_value(cells[1]));
  }
  f.values = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return f;
}

}  // namespace qpfs
