#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "qpfs/baselines.hpp"
#include "qpfs/error.hpp"
#include "text_util.hpp"

namespace qpfs {

namespace {

void check_k(std::size_t k, std::size_t m) {
  if (k == 0 || k > m) throw ConfigError(fmt::format("k must be in [1, {}], got {}", m, k));
}

}  // namespace

std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k) {
  check_k(k, scores.size());
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(k);
  return idx;
}

SelectionResult max_rel(const RelevanceVector& f, std::size_t k) {
  SelectionResult r;
  r.method = "maxrel";
  r.scores.assign(f.values.data(), f.values.data() + f.values.size());
  r.selected = top_k(r.scores, k);
  r.k = k;
  return r;
}

SelectionResult information_gain(const DiscretizedDataset& data, std::size_t k) {
  // Same estimator as the relevance vector, scored here one feature at a time.
  SelectionResult r;
  r.method = "infogain";
  const std::span<const int> y(data.target);
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    r.scores.push_back(mutual_information(contingency(data.column(j), y)));
  }
  r.selected = top_k(r.scores, k);
  r.k = k;
  return r;
}

SelectionResult mrmr_greedy(const RedundancyMatrix& q, const RelevanceVector& f, std::size_t k) {
  const auto m = f.size();
  if (q.size() != m) throw DataError("mrmr: Q and F dimensions differ");
  check_k(k, m);
  SelectionResult r;
  r.method = "mrmr";
  r.k = k;
  std::vector<char> taken(m, 0);
  // Running sum of Q[j][s] over the selected s, per candidate j.
  std::vector<double> redundancy(m, 0.0);
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = m;
    double best_gain = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (taken[j]) continue;
      double gain = f.values(static_cast<Eigen::Index>(j));
      if (step > 0) gain -= redundancy[j] / static_cast<double>(step);
      if (best == m || gain > best_gain) {
        best = j;
        best_gain = gain;
      }
    }
    taken[best] = 1;
    r.selected.push_back(best);
    r.scores.push_back(best_gain);
    for (std::size_t j = 0; j < m; ++j) {
      redundancy[j] += q.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(best));
    }
  }
  return r;
}

SelectionResult truncate_selection(SelectionResult r, std::size_t k) {
  if (r.selected.size() > k) {
    r.selected.resize(k);
    r.truncated = true;
  }
  r.k = r.selected.size();
  return r;
}

std::string format_selection(const SelectionResult& r, const std::vector<std::string>& names) {
  std::string out = fmt::format("# method={} k={}{}\nfeature\tscore\trank\n", r.method, r.k,
                                r.truncated ? " truncated" : "");
  for (std::size_t pos = 0; pos < r.selected.size(); ++pos) {
    const auto j = r.selected[pos];
    std::string score = "-";
    if (r.method == "mrmr") {
      if (pos < r.scores.size()) score = detail::format_double(r.scores[pos]);
    } else if (j < r.scores.size()) {
      score = detail::format_double(r.scores[j]);
    }
    out += fmt::format("{}\t{}\t{}\n", j < names.size() ? names[j] : fmt::format("x{}", j), score,
                       pos + 1);
  }
  return out;
}

}  // namespace qpfs
