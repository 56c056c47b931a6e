#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/eval.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(CategoricalEncoding e) {
  return e == CategoricalEncoding::one_hot ? "one-hot" : "ordinal";
}

CategoricalEncoding parse_encoding(std::string_view s) {
  if (s == "one-hot") return CategoricalEncoding::one_hot;
  if (s == "ordinal") return CategoricalEncoding::ordinal;
  throw ConfigError(fmt::format("unknown encoding '{}' (expected one-hot|ordinal)", s));
}

namespace {

std::string symbol(const Cell& c) {
  if (auto* s = std::get_if<std::string>(&c)) return *s;
  return detail::format_double(std::get<double>(c));
}

struct SymbolLess {
  bool operator()(const std::string& a, const std::string& b) const {
    return detail::symbol_less(a, b) || (!detail::symbol_less(b, a) && a < b);
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void standardise(const std::vector<double>& v, double& mean, double& scale) {
  mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  scale = sd > 0.0 ? sd : 1.0;
}

}  // namespace

DesignEncoder::DesignEncoder(const Dataset& data, std::span<const std::size_t> train_rows,
                             std::span<const std::size_t> features, CategoricalEncoding encoding)
    : encoding_(encoding) {
  if (train_rows.empty()) throw DataError("encoder: no training rows");
  for (auto j : features) {
    if (j >= data.n_features()) throw ConfigError(fmt::format("feature index {} out of range", j));
    const auto& spec = data.feature_spec(j);
    Feature f;
    f.index = j;
    f.kind = spec.kind;
    f.first_column = names_.size();
    if (spec.kind == ColumnKind::continuous) {
      std::vector<double> vals;
      for (auto r : train_rows)
        if (auto* v = std::get_if<double>(&data.feature_cell(r, j))) vals.push_back(*v);
      if (vals.empty()) throw DataError(fmt::format("column '{}' has no training values", spec.name));
      f.fill = median(vals);
      vals.clear();
      for (auto r : train_rows) {
        const auto* v = std::get_if<double>(&data.feature_cell(r, j));
        vals.push_back(v ? *v : f.fill);
      }
      standardise(vals, f.mean, f.scale);
      f.width = 1;
      names_.push_back(spec.name);
    } else {
      std::map<std::string, std::size_t, SymbolLess> counts;
      for (auto r : train_rows) {
        const auto& c = data.feature_cell(r, j);
        if (!is_missing(c)) ++counts[symbol(c)];
      }
      if (counts.empty()) throw DataError(fmt::format("column '{}' has no training values", spec.name));
      std::size_t best = 0;
      for (const auto& [level, n] : counts) {
        f.levels.push_back(level);
        if (n > best) {
          best = n;
          f.fill_level = level;
        }
      }
      if (encoding == CategoricalEncoding::one_hot) {
        f.width = f.levels.size() - 1;
        for (std::size_t l = 1; l < f.levels.size(); ++l)
          names_.push_back(fmt::format("{}={}", spec.name, f.levels[l]));
      } else {
        std::vector<double> ranks;
        for (auto r : train_rows) {
          const auto& c = data.feature_cell(r, j);
          const auto s = is_missing(c) ? f.fill_level : symbol(c);
          ranks.push_back(static_cast<double>(
              std::lower_bound(f.levels.begin(), f.levels.end(), s, SymbolLess{}) -
              f.levels.begin()));
        }
        standardise(ranks, f.mean, f.scale);
        f.width = 1;
        names_.push_back(spec.name);
      }
    }
    features_.push_back(std::move(f));
  }
}

Eigen::MatrixXd DesignEncoder::transform(const Dataset& data,
                                         std::span<const std::size_t> rows) const {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(names_.size()));
  for (const auto& f : features_) {
    const auto col = static_cast<Eigen::Index>(f.first_column);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto& c = data.feature_cell(rows[i], f.index);
      if (f.kind == ColumnKind::continuous) {
        const auto* v = std::get_if<double>(&c);
        x(ii, col) = ((v ? *v : f.fill) - f.mean) / f.scale;
        continue;
      }
      const auto s = is_missing(c) ? f.fill_level : symbol(c);
      const auto it = std::lower_bound(f.levels.begin(), f.levels.end(), s, SymbolLess{});
      const bool known = it != f.levels.end() && *it == s;
      const auto level = known ? static_cast<std::size_t>(it - f.levels.begin()) : 0;
      if (encoding_ == CategoricalEncoding::one_hot) {
        if (level > 0) x(ii, col + static_cast<Eigen::Index>(level) - 1) = 1.0;
      } else {
        x(ii, col) = (static_cast<double>(level) - f.mean) / f.scale;
      }
    }
  }
  return x;
}

}  // namespace qpfs
