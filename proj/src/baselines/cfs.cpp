#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qpfs/baselines.hpp"

namespace qpfs {

double cfs_merit(const std::vector<double>& r_cf, const std::vector<std::vector<double>>& r_ff,
                 const std::vector<std::size_t>& subset) {
  if (subset.empty()) return 0.0;
  double num = 0.0;
  double pairs = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    num += r_cf[subset[a]];
    for (std::size_t b = a + 1; b < subset.size(); ++b) pairs += r_ff[subset[a]][subset[b]];
  }
  return num / std::sqrt(static_cast<double>(subset.size()) + 2.0 * pairs);
}

namespace {

struct Node {
  std::vector<std::size_t> sorted;
  std::vector<std::size_t> entry;  // order the features were added along this path
  double merit = 0.0;
};

// Best candidate first: higher merit, then smaller, then lexicographically smaller.
bool before(const Node& a, const Node& b) {
  if (a.merit != b.merit) return a.merit > b.merit;
  if (a.sorted.size() != b.sorted.size()) return a.sorted.size() < b.sorted.size();
  return a.sorted < b.sorted;
}

}  // namespace

SelectionResult cfs(const DiscretizedDataset& data, const CfsOptions& opt) {
  const auto m = data.n_features();
  std::vector<double> r_cf(m);
  std::vector<std::vector<double>> r_ff(m, std::vector<double>(m, 1.0));
  const std::span<const int> y(data.target);
  for (std::size_t i = 0; i < m; ++i) {
    r_cf[i] = symmetric_uncertainty(contingency(data.column(i), y));
    for (std::size_t j = i + 1; j < m; ++j) {
      r_ff[i][j] = r_ff[j][i] = symmetric_uncertainty(contingency(data.column(i), data.column(j)));
    }
  }

  std::vector<Node> open{Node{}};
  std::set<std::vector<std::size_t>> visited{{}};
  Node best;
  best.merit = -std::numeric_limits<double>::infinity();
  std::size_t stall = 0;
  while (!open.empty() && stall < opt.stall_limit) {
    auto it = std::min_element(open.begin(), open.end(), before);
    Node node = std::move(*it);
    open.erase(it);
    bool improved = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (std::binary_search(node.sorted.begin(), node.sorted.end(), j)) continue;
      Node child;
      child.sorted = node.sorted;
      child.sorted.insert(std::upper_bound(child.sorted.begin(), child.sorted.end(), j), j);
      if (!visited.insert(child.sorted).second) continue;
      child.entry = node.entry;
      child.entry.push_back(j);
      child.merit = cfs_merit(r_cf, r_ff, child.sorted);
      if (child.merit > best.merit) {
        best = child;
        improved = true;
      }
      open.push_back(std::move(child));
    }
    stall = improved ? 0 : stall + 1;
  }

  SelectionResult r;
  r.method = "cfs";
  r.selected = best.entry;
  r.scores = r_cf;
  r.merit = best.merit;
  r.k = r.selected.size();
  return r;
}

}  // namespace qpfs
