#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "qpfs/error.hpp"
#include "qpfs/eval.hpp"
#include "text_util.hpp"

namespace qpfs {

std::string_view to_string(ErrorConvention c) {
  return c == ErrorConvention::standard ? "standard" : "swapped";
}

ErrorConvention parse_error_convention(std::string_view s) {
  if (s == "standard") return ErrorConvention::standard;
  if (s == "swapped") return ErrorConvention::swapped;
  throw ConfigError(fmt::format("unknown error convention '{}' (expected standard|swapped)", s));
}

namespace {

// splitmix64 finaliser
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

using FeaturePicker = std::function<std::vector<std::size_t>(std::span<const std::size_t> train)>;

EvaluationReport run_cv(const Dataset& data, const CvProtocol& protocol,
                        const FeaturePicker& pick) {
  if (protocol.n_folds < 2) throw ConfigError("n_folds must be at least 2");
  const auto labels = data.target_labels();
  const auto n = labels.size();
  const auto ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (protocol.stratified && (ones < protocol.n_folds || n - ones < protocol.n_folds)) {
    throw DataError(fmt::format("stratified {}-fold CV needs at least {} rows per class (have {} "
                                "and {})",
                                protocol.n_folds, protocol.n_folds, n - ones, ones));
  }
  const auto folds =
      assign_folds(labels, data.row_keys(), protocol.n_folds, protocol.seed, protocol.stratified);

  EvaluationReport report;
  LogisticOptions lopt;
  lopt.ridge = protocol.ridge;
  for (std::size_t fold = 0; fold < protocol.n_folds; ++fold) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < n; ++i) (folds[i] == fold ? test : train).push_back(i);

    FoldResult fr;
    fr.fold = fold;
    fr.n_test = test.size();
    for (auto i : test) (labels[i] == 1 ? fr.n_class1 : fr.n_class0)++;
    if (fr.n_class0 == 0 || fr.n_class1 == 0) {
      throw DataError(fmt::format("fold {} lacks one of the classes", fold));
    }

    const auto features = pick(train);
    report.k = features.size();
    DesignEncoder enc(data, train, features, protocol.encoding);
    const Eigen::MatrixXd xtr = enc.transform(data, train);
    Eigen::VectorXd ytr(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) ytr(static_cast<Eigen::Index>(i)) = labels[train[i]];
    const auto fit = train_logistic(xtr, ytr, lopt);
    const Eigen::VectorXd p = predict_proba(enc.transform(data, test), fit.beta);

    std::size_t good_as_bad = 0, bad_as_good = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const int pred = p(static_cast<Eigen::Index>(i)) > protocol.threshold ? 1 : 0;
      if (labels[test[i]] == 0 && pred == 1) ++good_as_bad;
      if (labels[test[i]] == 1 && pred == 0) ++bad_as_good;
    }
    fr.test_error = static_cast<double>(good_as_bad + bad_as_good) / static_cast<double>(fr.n_test);
    const double e0 = static_cast<double>(good_as_bad) / static_cast<double>(fr.n_class0);
    const double e1 = static_cast<double>(bad_as_good) / static_cast<double>(fr.n_class1);
    fr.type1_error = protocol.convention == ErrorConvention::standard ? e0 : e1;
    fr.type2_error = protocol.convention == ErrorConvention::standard ? e1 : e0;
    report.per_fold.push_back(fr);
  }
  const double nf = static_cast<double>(protocol.n_folds);
  for (const auto& fr : report.per_fold) {
    report.test_error += fr.test_error / nf;
    report.type1_error += fr.type1_error / nf;
    report.type2_error += fr.type2_error / nf;
  }
  return report;
}

}  // namespace

std::vector<std::size_t> assign_folds(std::span<const int> labels,
                                      std::span<const std::size_t> keys, std::size_t n_folds,
                                      std::uint64_t seed, bool stratified) {
  if (labels.size() != keys.size()) throw DataError("assign_folds: labels and keys differ in length");
  if (n_folds < 2) throw ConfigError("n_folds must be at least 2");
  std::vector<std::size_t> fold(labels.size(), 0);
  auto deal = [&](std::vector<std::size_t> rows) {
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    for (auto r : rows) order.emplace_back(mix(seed ^ mix(keys[r])), keys[r]);
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
    for (std::size_t pos = 0; pos < idx.size(); ++pos) fold[rows[idx[pos]]] = pos % n_folds;
  };
  if (stratified) {
    for (int cls : {0, 1}) {
      std::vector<std::size_t> rows;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == cls) rows.push_back(i);
      deal(std::move(rows));
    }
  } else {
    std::vector<std::size_t> rows(labels.size());
    std::iota(rows.begin(), rows.end(), 0);
    deal(std::move(rows));
  }
  return fold;
}

EvaluationReport evaluate(const Dataset& data, const std::vector<std::size_t>& selected,
                          const CvProtocol& protocol) {
  if (selected.empty()) throw ConfigError("evaluate: no features selected");
  return run_cv(data, protocol, [&](std::span<const std::size_t>) { return selected; });
}

EvaluationReport evaluate_intercept_only(const Dataset& data, const CvProtocol& protocol) {
  auto r = run_cv(data, protocol,
                  [](std::span<const std::size_t>) { return std::vector<std::size_t>{}; });
  r.method = "intercept-only";
  return r;
}

EvaluationReport evaluate_strict(const Dataset& data, const FoldSelector& selector,
                                 const CvProtocol& protocol) {
  auto r = run_cv(data, protocol, [&](std::span<const std::size_t> train) {
    auto sel = selector(data.subset(train));
    if (sel.empty()) throw ConfigError("strict evaluation: selector returned no features");
    return sel;
  });
  r.notes.push_back("strict: features reselected on every training split");
  return r;
}

std::string format_report(const EvaluationReport& r) {
  std::string out = "dataset\tmethod\tk\tfold\tn_test\ttest_error\ttype1_error\ttype2_error\n";
  for (const auto& f : r.per_fold) {
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n", r.dataset, r.method, r.k, f.fold, f.n_test,
                       detail::format_double(f.test_error), detail::format_double(f.type1_error),
                       detail::format_double(f.type2_error));
  }
  out += fmt::format("{}\t{}\t{}\tmean\t-\t{}\t{}\t{}\n", r.dataset, r.method, r.k,
                     detail::format_double(r.test_error), detail::format_double(r.type1_error),
                     detail::format_double(r.type2_error));
  for (const auto& note : r.notes) out += "# " + note + "\n";
  return out;
}

}  // namespace qpfs
