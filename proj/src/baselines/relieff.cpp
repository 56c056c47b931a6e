#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "qpfs/baselines.hpp"
#include "qpfs/error.hpp"

namespace qpfs {

namespace {

// Uniform on [0, n) by rejection; std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries.
std::uint64_t bounded(std::mt19937_64& gen, std::uint64_t n) {
  constexpr auto top = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = top - top % n;
  std::uint64_t v;
  do v = gen(); while (v >= limit);
  return v % n;
}

}  // namespace

std::vector<double> relieff_weights(const DiscretizedDataset& data, const ReliefOptions& opt) {
  const auto n = data.n_samples();
  const auto m = data.n_features();
  if (opt.n_neighbors == 0) throw ConfigError("relieff: n_neighbors must be positive");
  std::size_t count[2] = {0, 0};
  for (int y : data.target) ++count[y];
  if (count[0] < opt.n_neighbors || count[1] < opt.n_neighbors) {
    throw DataError(fmt::format("relieff: classes have {} and {} members, need {} neighbours each",
                                count[0], count[1], opt.n_neighbors));
  }

  // Row-major copy for the distance loop.
  std::vector<Code> rows(n * m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) rows[i * m + j] = data.feature_codes[j][i];

  const std::size_t iters = opt.n_iterations == 0 ? n : opt.n_iterations;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(opt.seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[bounded(gen, i + 1)]);

  std::vector<double> w(m, 0.0);
  std::vector<std::pair<std::size_t, std::size_t>> hits, misses;  // (distance, index)
  std::vector<double> hit_diff(m), miss_diff(m);
  for (std::size_t it = 0; it < iters; ++it) {
    const auto r = order[it % n];
    const Code* xr = &rows[r * m];
    hits.clear();
    misses.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r) continue;
      const Code* xi = &rows[i * m];
      std::size_t d = 0;
      for (std::size_t j = 0; j < m; ++j) d += xr[j] != xi[j];
      (data.target[i] == data.target[r] ? hits : misses).emplace_back(d, i);
    }
    // Nearest first, lower index on equal distance.
    const auto k_hit = std::min(opt.n_neighbors, hits.size());
    const auto k_miss = std::min(opt.n_neighbors, misses.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k_hit), hits.end());
    std::partial_sort(misses.begin(), misses.begin() + static_cast<std::ptrdiff_t>(k_miss),
                      misses.end());
    std::fill(hit_diff.begin(), hit_diff.end(), 0.0);
    std::fill(miss_diff.begin(), miss_diff.end(), 0.0);
    for (std::size_t h = 0; h < k_hit; ++h) {
      const Code* xi = &rows[hits[h].second * m];
      for (std::size_t j = 0; j < m; ++j) hit_diff[j] += xr[j] != xi[j];
    }
    for (std::size_t h = 0; h < k_miss; ++h) {
      const Code* xi = &rows[misses[h].second * m];
      for (std::size_t j = 0; j < m; ++j) miss_diff[j] += xr[j] != xi[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (k_hit > 0) w[j] -= hit_diff[j] / static_cast<double>(k_hit * iters);
      w[j] += miss_diff[j] / static_cast<double>(k_miss * iters);
    }
  }
  return w;
}

SelectionResult relieff(const DiscretizedDataset& data, std::size_t k, const ReliefOptions& opt) {
  SelectionResult r;
  r.method = "relieff";
  r.scores = relieff_weights(data, opt);
  r.selected = top_k(r.scores, k);
  r.k = k;
  return r;
}

}  // namespace qpfs
