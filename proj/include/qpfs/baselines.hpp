#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qpfs/infotheory.hpp"
#include "qpfs/ingest.hpp"

namespace qpfs {

struct SelectionResult {
  std::string method;
  std::vector<std::size_t> selected;  // in selection order
  // Method specific. Length m (relevance, Relief weight, CFS class
  // correlation) except for mrmr, which keeps the greedy gain of each step.
  std::vector<double> scores;
  std::size_t k = 0;
  double merit = 0.0;  // cfs only: merit of the returned subset
  bool truncated = false;  // set by truncate_selection
};

SelectionResult mrmr_greedy(const RedundancyMatrix& q, const RelevanceVector& f, std::size_t k);
SelectionResult max_rel(const RelevanceVector& f, std::size_t k);
SelectionResult information_gain(const DiscretizedDataset& data, std::size_t k);

struct ReliefOptions {
  std::size_t n_neighbors = 10;
  std::size_t n_iterations = 0;  // 0 means one pass over every sample
  std::uint64_t seed = 20130101;
};
// Raw ReliefF weights for every feature.
std::vector<double> relieff_weights(const DiscretizedDataset& data, const ReliefOptions& opt);
SelectionResult relieff(const DiscretizedDataset& data, std::size_t k,
                        const ReliefOptions& opt = {});

// Best-first forward search over CFS merit. `selected` lists the best subset in
// the order its features entered; k is whatever the search found.
struct CfsOptions {
  std::size_t stall_limit = 5;
};
SelectionResult cfs(const DiscretizedDataset& data, const CfsOptions& opt = {});
// merit of a subset given feature-class and feature-feature correlations
double cfs_merit(const std::vector<double>& r_cf, const std::vector<std::vector<double>>& r_ff,
                 const std::vector<std::size_t>& subset);

// Keep the first k entries of `selected`; records whether anything was cut.
SelectionResult truncate_selection(SelectionResult r, std::size_t k);

// Top-k indices by descending score, ascending index on ties.
std::vector<std::size_t> top_k(const std::vector<double>& scores, std::size_t k);

// `feature<TAB>score<TAB>rank` for the selected features, in selection order.
std::string format_selection(const SelectionResult& r, const std::vector<std::string>& names);

}  // namespace qpfs
