#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/ingest.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(BinningMethod m) {
  return m == BinningMethod::equal_frequency ? "equal-frequency" : "equal-width";
}

std::string_view to_string(MissingPolicy m) {
  switch (m) {
    case MissingPolicy::impute_mode: return "impute-mode";
    case MissingPolicy::impute_median: return "impute-median";
    case MissingPolicy::drop_row: return "drop-row";
  }
  return "?";
}

BinningMethod parse_binning_method(std::string_view s) {
  if (s == "equal-frequency") return BinningMethod::equal_frequency;
  if (s == "equal-width") return BinningMethod::equal_width;
  throw ConfigError(fmt::format("unknown discretization method '{}'", s));
}

MissingPolicy parse_missing_policy(std::string_view s) {
  if (s == "impute-mode") return MissingPolicy::impute_mode;
  if (s == "impute-median") return MissingPolicy::impute_median;
  if (s == "drop-row") return MissingPolicy::drop_row;
  throw ConfigError(fmt::format("unknown missing-value policy '{}'", s));
}

namespace {

// Relabel to 0..k-1 preserving order of the raw bin indices.
std::vector<Code> compress(const std::vector<Code>& raw) {
  std::vector<Code> present(raw);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  std::vector<Code> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    out[i] = static_cast<Code>(std::lower_bound(present.begin(), present.end(), raw[i]) -
                               present.begin());
  }
  return out;
}

void check_bins(int n_bins) {
  if (n_bins < 2) throw ConfigError(fmt::format("n_bins must be >= 2, got {}", n_bins));
}

}  // namespace

std::vector<Code> equal_frequency_bins(std::span<const double> values, int n_bins) {
  check_bins(n_bins);
  const std::size_t n = values.size();
  if (n == 0) return {};
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Upper-inclusive cut points at the order statistics ceil(b*n/k); a value
  // equal to a cut point stays in the lower bin.
  std::vector<double> cuts;
  for (int b = 1; b < n_bins; ++b) {
    const auto rank = (static_cast<std::size_t>(b) * n + n_bins - 1) / n_bins;
    if (rank == 0) continue;
    cuts.push_back(sorted[rank - 1]);
  }
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Code> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = static_cast<Code>(std::lower_bound(cuts.begin(), cuts.end(), values[i]) -
                               cuts.begin());
  }
  return compress(raw);
}

std::vector<Code> equal_width_bins(std::span<const double> values, int n_bins) {
  check_bins(n_bins);
  if (values.empty()) return {};
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<Code> raw(values.size(), 0);
  if (hi > lo) {
    const double width = (hi - lo) / n_bins;
    for (std::size_t i = 0; i < values.size(); ++i) {
      // Bin b covers (lo + b*w, lo + (b+1)*w]; the minimum joins bin 0.
      int b = 0;
      while (b + 1 < n_bins && values[i] > lo + (b + 1) * width) ++b;
      raw[i] = static_cast<Code>(b);
    }
  }
  return compress(raw);
}

std::vector<Code> first_appearance_codes(std::span<const std::string> symbols) {
  std::unordered_map<std::string, Code> index;
  std::vector<Code> out(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    auto [it, inserted] = index.try_emplace(symbols[i], static_cast<Code>(index.size()));
    out[i] = it->second;
  }
  return out;
}

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double numeric_mode(const std::vector<double>& v) {
  std::map<double, std::size_t> counts;
  for (double x : v) ++counts[x];
  double best = counts.begin()->first;
  std::size_t best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best = value;
      best_count = count;
    }
  }
  return best;
}

std::string symbol_mode(const std::vector<std::string>& v) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& s : v) {
    if (counts[s]++ == 0) order.push_back(s);
  }
  std::string best = order.front();
  for (const auto& s : order) {
    if (counts[s] > counts[best]) best = s;
  }
  return best;
}

}  // namespace

DiscretizedDataset discretize(const Dataset& data, const DiscretizationPolicy& policy) {
  check_bins(policy.n_bins);
  if (data.n_samples() < 2) throw DataError("discretize needs at least 2 rows");

  const auto m = data.n_features();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < data.n_samples(); ++i) {
    bool complete = true;
    if (policy.missing_policy == MissingPolicy::drop_row) {
      for (std::size_t j = 0; j < m && complete; ++j) complete = !is_missing(data.feature_cell(i, j));
    }
    if (complete) keep.push_back(i);
  }
  if (keep.size() < 2) throw DataError("fewer than 2 complete rows remain after dropping missing values");

  DiscretizedDataset out;
  out.feature_names = data.feature_names();
  out.provenance = policy;
  out.source_rows = keep;
  {
    const auto labels = data.target_labels();
    out.target.reserve(keep.size());
    for (auto i : keep) out.target.push_back(labels[i]);
    const auto ones = std::count(out.target.begin(), out.target.end(), 1);
    if (ones == 0 || ones == static_cast<long>(out.target.size())) {
      throw DataError("target needs both labels present");
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    const auto& spec = data.feature_spec(j);
    std::vector<Code> codes;
    if (spec.kind == ColumnKind::continuous) {
      std::vector<double> observed;
      for (auto i : keep) {
        if (auto* v = std::get_if<double>(&data.feature_cell(i, j))) observed.push_back(*v);
      }
      if (observed.empty()) throw DataError(fmt::format("column '{}' is entirely missing", spec.name));
      const double fill = policy.missing_policy == MissingPolicy::impute_mode ? numeric_mode(observed)
                                                                              : median_of(observed);
      std::vector<double> values;
      values.reserve(keep.size());
      for (auto i : keep) {
        const auto* v = std::get_if<double>(&data.feature_cell(i, j));
        values.push_back(v ? *v : fill);
      }
      if (std::all_of(values.begin(), values.end(), [&](double x) { return x == values.front(); })) {
        out.warnings.push_back(
            fmt::format("column '{}' is constant; coded as a single bin", spec.name));
      }
      codes = policy.method == BinningMethod::equal_frequency
                  ? equal_frequency_bins(values, policy.n_bins)
                  : equal_width_bins(values, policy.n_bins);
    } else {
      std::vector<std::string> observed;
      for (auto i : keep) {
        const auto& cell = data.feature_cell(i, j);
        if (auto* s = std::get_if<std::string>(&cell)) observed.push_back(*s);
        else if (auto* d = std::get_if<double>(&cell)) observed.push_back(detail::format_double(*d));
      }
      if (observed.empty()) throw DataError(fmt::format("column '{}' is entirely missing", spec.name));
      const std::string fill = symbol_mode(observed);
      std::vector<std::string> symbols;
      symbols.reserve(keep.size());
      std::size_t next = 0;
      for (auto i : keep) {
        symbols.push_back(is_missing(data.feature_cell(i, j)) ? fill : observed[next++]);
      }
      codes = first_appearance_codes(symbols);
      if (spec.kind == ColumnKind::binary) {
        std::vector<std::string> distinct;
        for (const auto& s : symbols) {
          if (std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
        }
        if (distinct.size() > 2) {
          throw DataError(fmt::format("binary column '{}' has {} distinct values", spec.name,
                                      distinct.size()));
        }
        if (distinct.size() == 2 && detail::parse_double(distinct[0]) &&
            detail::parse_double(distinct[1]) && detail::symbol_less(distinct[1], distinct[0])) {
          for (auto& c : codes) c = 1 - c;
        }
      }
    }
    out.bin_counts.push_back(codes.empty() ? 0 : *std::max_element(codes.begin(), codes.end()) + 1);
    out.feature_codes.push_back(std::move(codes));
  }
  return out;
}

}  // namespace qpfs
