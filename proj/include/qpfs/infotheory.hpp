#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qpfs/ingest.hpp"

namespace qpfs {

// Joint counts over the observed values of two code vectors. Row u is the
// u-th smallest distinct value of the first vector, column v likewise.
class ContingencyTable {
 public:
  ContingencyTable() = default;
  // Direct construction, row-major; every count must be non-negative.
  ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::size_t> counts);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t total() const { return total_; }
  std::size_t at(std::size_t u, std::size_t v) const { return counts_[u * cols_ + v]; }
  std::vector<std::size_t> row_sums() const;
  std::vector<std::size_t> col_sums() const;
  ContingencyTable transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t total_ = 0;
  std::vector<std::size_t> counts_;
};

ContingencyTable contingency(std::span<const Code> a, std::span<const Code> b);
ContingencyTable contingency(std::span<const Code> a, std::span<const int> b);

// Plug-in estimates, in bits.
double mutual_information(const ContingencyTable& table);
double entropy(std::span<const Code> codes);
double entropy(std::span<const int> labels);
double entropy_of_counts(std::span<const std::size_t> counts);

// 2 I(a;b) / (H(a) + H(b)), 0 when both entropies vanish.
double symmetric_uncertainty(const ContingencyTable& table);

enum class QDiagonal { entropy, zero };
std::string_view to_string(QDiagonal d);
QDiagonal parse_q_diagonal(std::string_view s);

struct RedundancyMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;
  QDiagonal diagonal = QDiagonal::entropy;

  std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
};

struct RelevanceVector {
  Eigen::VectorXd values;
  std::vector<std::string> feature_names;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

RedundancyMatrix build_redundancy_matrix(const DiscretizedDataset& data,
                                         QDiagonal diagonal = QDiagonal::entropy);
RelevanceVector build_relevance_vector(const DiscretizedDataset& data);

// Tab-separated text. Matrix: a header row of names, then one row per
// feature starting with its name. Vector: `feature<TAB>relevance` rows.
std::string format_redundancy(const RedundancyMatrix& q);
std::string format_relevance(const RelevanceVector& f);
RedundancyMatrix parse_redundancy(std::string_view text);
RelevanceVector parse_relevance(std::string_view text);

}  // namespace qpfs
