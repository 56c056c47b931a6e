#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/infotheory.hpp"

namespace qpfs {

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols,
                                   std::vector<std::size_t> counts)
    : rows_(rows), cols_(cols), counts_(std::move(counts)) {
  if (counts_.size() != rows_ * cols_) {
    throw DataError(fmt::format("contingency table is {}x{} but holds {} counts", rows_, cols_,
                                counts_.size()));
  }
  for (auto c : counts_) total_ += c;
}

std::vector<std::size_t> ContingencyTable::row_sums() const {
  std::vector<std::size_t> s(rows_, 0);
  for (std::size_t u = 0; u < rows_; ++u)
    for (std::size_t v = 0; v < cols_; ++v) s[u] += at(u, v);
  return s;
}

std::vector<std::size_t> ContingencyTable::col_sums() const {
  std::vector<std::size_t> s(cols_, 0);
  for (std::size_t u = 0; u < rows_; ++u)
    for (std::size_t v = 0; v < cols_; ++v) s[v] += at(u, v);
  return s;
}

ContingencyTable ContingencyTable::transposed() const {
  std::vector<std::size_t> t(counts_.size());
  for (std::size_t u = 0; u < rows_; ++u)
    for (std::size_t v = 0; v < cols_; ++v) t[v * rows_ + u] = at(u, v);
  return ContingencyTable(cols_, rows_, std::move(t));
}

namespace {

// Dense index of each value among the sorted distinct values.
template <class T>
std::vector<std::size_t> dense(std::span<const T> xs, std::size_t& n_levels) {
  std::vector<T> levels(xs.begin(), xs.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  n_levels = levels.size();
  std::vector<std::size_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), xs[i]) -
                                      levels.begin());
  }
  return out;
}

template <class A, class B>
ContingencyTable tabulate(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    throw DataError(fmt::format("contingency: length mismatch ({} vs {})", a.size(), b.size()));
  }
  if (a.empty()) throw DataError("contingency: empty input");
  std::size_t ra = 0, cb = 0;
  const auto ia = dense(a, ra);
  const auto ib = dense(b, cb);
  std::vector<std::size_t> counts(ra * cb, 0);
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[ia[i] * cb + ib[i]];
  return ContingencyTable(ra, cb, std::move(counts));
}

template <class T>
double entropy_impl(std::span<const T> xs) {
  if (xs.empty()) throw DataError("entropy: empty input");
  std::size_t n_levels = 0;
  const auto idx = dense(xs, n_levels);
  std::vector<std::size_t> counts(n_levels, 0);
  for (auto u : idx) ++counts[u];
  return entropy_of_counts(counts);
}

}  // namespace

ContingencyTable contingency(std::span<const Code> a, std::span<const Code> b) {
  return tabulate(a, b);
}

ContingencyTable contingency(std::span<const Code> a, std::span<const int> b) {
  return tabulate(a, b);
}

double entropy_of_counts(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw DataError("entropy: no observations");
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double k = static_cast<double>(c);
    h += (k / n) * std::log2(n / k);
  }
  return std::max(h, 0.0);
}

double entropy(std::span<const Code> codes) { return entropy_impl(codes); }
double entropy(std::span<const int> labels) { return entropy_impl(labels); }

double mutual_information(const ContingencyTable& t) {
  if (t.total() == 0) throw DataError("mutual information of an empty table");
  const auto ru = t.row_sums();
  const auto cv = t.col_sums();
  const double n = static_cast<double>(t.total());
  double mi = 0.0;
  for (std::size_t u = 0; u < t.rows(); ++u) {
    for (std::size_t v = 0; v < t.cols(); ++v) {
      const auto c = t.at(u, v);
      if (c == 0) continue;
      const double k = static_cast<double>(c);
      // p(u,v) / (p(u) p(v)) = k n / (n_u n_v); the products are exact integers in a double.
      const double ratio = (k * n) / (static_cast<double>(ru[u]) * static_cast<double>(cv[v]));
      mi += (k / n) * std::log2(ratio);
    }
  }
  return std::max(mi, 0.0);
}

double symmetric_uncertainty(const ContingencyTable& t) {
  const double ha = entropy_of_counts(t.row_sums());
  const double hb = entropy_of_counts(t.col_sums());
  if (ha + hb <= 0.0) return 0.0;
  return 2.0 * mutual_information(t) / (ha + hb);
}

}  // namespace qpfs
