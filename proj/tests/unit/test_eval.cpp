#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qpfs/error.hpp"
#include "qpfs/eval.hpp"

using namespace qpfs;

namespace {

Dataset german() {
  ParseOptions opt;
  opt.delimiter = ' ';
  return load_csv(oracle::data_path("german.data"), load_schema(oracle::data_path("german.schema")), opt);
}

Dataset with_positive(const Dataset& d, const std::string& positive) {
  auto cols = d.columns();
  cols[d.schema().target_column()].positive_label = positive;
  return Dataset(Schema(cols), d.rows(), d.row_keys());
}

// Continuous x0, x1, a categorical c and a copy of x0; y from a logistic model.
Dataset desk_synthetic(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Schema s = parse_schema(
      "x0 continuous feature\nx1 continuous feature\nc categorical feature\n"
      "x0copy continuous feature\ny binary target\n");
  std::vector<std::vector<Cell>> rows;
  const char* levels[] = {"a", "b", "c"};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = z(gen), b = z(gen);
    const int c = static_cast<int>(u(gen) * 3);
    const double eta = 0.3 + 1.2 * a - 0.8 * b + (c == 2 ? 0.7 : 0.0);
    const int y = u(gen) < 1.0 / (1.0 + std::exp(-eta));
    rows.push_back({a, b, std::string(levels[c]), a, std::to_string(y)});
  }
  return Dataset(s, std::move(rows));
}

}  // namespace

TEST(Logistic, SeparableCaseStaysFinite) {
  Eigen::MatrixXd x(8, 1);
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) x(i, 0) = y(i) = i % 2;
  LogisticOptions opt;
  opt.ridge = 1e-4;
  const auto fit = train_logistic(x, y, opt);
  EXPECT_TRUE(fit.beta.allFinite());
  const auto p = predict_proba(x, fit.beta);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(p(i) > 0.5, y(i) == 1.0);
}

TEST(Logistic, ZeroDesignIsInterceptOnly) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(10, 2);
  Eigen::VectorXd y(10);
  y << 1, 1, 1, 0, 0, 0, 0, 0, 0, 0;
  const auto fit = train_logistic(x, y);
  const auto p = predict_proba(x, fit.beta);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(p(i), 0.3, 1e-9);
  EXPECT_LE(fit.gradient_norm, 1e-8);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(30, 3);
  Eigen::VectorXd y(30), beta(4);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = z(gen);
    y(i) = z(gen) > 0;
  }
  for (int j = 0; j < 4; ++j) beta(j) = z(gen);
  const double ridge = 0.3;
  const auto g = penalized_gradient(x, y, beta, ridge);
  for (int j = 0; j < 4; ++j) {
    Eigen::VectorXd hi = beta, lo = beta;
    const double h = 1e-6;
    hi(j) += h;
    lo(j) -= h;
    const double fd = (penalized_log_likelihood(x, y, hi, ridge) - penalized_log_likelihood(x, y, lo, ridge)) / (2 * h);
    EXPECT_NEAR(g(j), fd, 1e-5);
  }
}

TEST(Logistic, RecoversGeneratingParameters) {
  // Independent generator: x1 ~ N(0,1), x2 ~ Bernoulli(0.4), y ~ Bernoulli(sigmoid(eta)).
  const Eigen::Vector3d truth(-0.5, 1.0, -0.7);
  std::mt19937 gen(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution b(0.4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 10000;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(gen);
    x(i, 1) = b(gen);
    const double eta = truth(0) + truth(1) * x(i, 0) + truth(2) * x(i, 1);
    y(i) = u(gen) < 1.0 / (1.0 + std::exp(-eta));
  }
  const auto fit = train_logistic(x, y);
  // Standard errors from the observed information at the estimate.
  Eigen::MatrixXd xa(n, 3);
  xa << Eigen::VectorXd::Ones(n), x;
  const Eigen::VectorXd p = predict_proba(x, fit.beta);
  const Eigen::VectorXd w = (p.array() * (1 - p.array())).matrix();
  const Eigen::MatrixXd info = xa.transpose() * w.asDiagonal() * xa;
  const Eigen::MatrixXd cov = info.inverse();
  for (int j = 0; j < 3; ++j) EXPECT_LE(std::abs(fit.beta(j) - truth(j)), 3 * std::sqrt(cov(j, j))) << j;
}

TEST(Logistic, NonConvergenceIsAnError) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 1, 2, 3;
  Eigen::VectorXd y(4);
  y << 0, 0, 1, 1;
  LogisticOptions opt;
  opt.max_iterations = 1;
  opt.ridge = 0.0;
  EXPECT_THROW(train_logistic(x, y, opt), NumericalError);
}

TEST(Encoder, OneHotReferenceAndTrainOnlyStatistics) {
  const Schema s = parse_schema("x continuous feature\nc categorical feature\ny binary target\n");
  const auto d = parse_csv("1,B,0\n3,A,1\n?,C,0\n100,C,1\n", s);
  const std::vector<std::size_t> train{0, 1, 2}, feats{0, 1};
  const DesignEncoder enc(d, train, feats, CategoricalEncoding::one_hot);
  EXPECT_EQ(enc.column_names(), (std::vector<std::string>{"x", "c=B", "c=C"}));
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto m = enc.transform(d, all);
  // Training x = {1, 3, fill 2}: mean 2, sample sd 1.
  EXPECT_NEAR(m(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(m(1, 0), 1.0, 1e-12);
  EXPECT_NEAR(m(2, 0), 0.0, 1e-12);
  EXPECT_NEAR(m(3, 0), 98.0, 1e-12);
  EXPECT_EQ(m.row(1).tail(2), Eigen::RowVector2d(0, 0));  // A is the reference
  EXPECT_EQ(m.row(0).tail(2), Eigen::RowVector2d(1, 0));
  EXPECT_EQ(m.row(3).tail(2), Eigen::RowVector2d(0, 1));
  EXPECT_EQ(parse_encoding("ordinal"), CategoricalEncoding::ordinal);
  EXPECT_THROW(parse_encoding("hash"), ConfigError);
}

TEST(Folds, StratifiedBalanceAndDeterminism) {
  const auto d = german();
  const auto y = d.target_labels();
  const auto folds = assign_folds(y, d.row_keys(), 10, 20130101, true);
  ASSERT_EQ(folds.size(), 1000u);
  std::vector<int> bad(10, 0), all(10, 0);
  for (std::size_t i = 0; i < 1000; ++i) {
    ++all[folds[i]];
    bad[folds[i]] += y[i];
  }
  for (int f = 0; f < 10; ++f) {
    EXPECT_EQ(all[f], 100);
    EXPECT_EQ(bad[f], 30);
  }
  EXPECT_EQ(folds, assign_folds(y, d.row_keys(), 10, 20130101, true));
  EXPECT_NE(folds, assign_folds(y, d.row_keys(), 10, 7, true));
  const auto plain = assign_folds(y, d.row_keys(), 10, 20130101, false);
  for (int f = 0; f < 10; ++f) EXPECT_EQ(std::count(plain.begin(), plain.end(), static_cast<std::size_t>(f)), 100);
}

TEST(Folds, TooFewMembersIsAnError) {
  const std::vector<int> y{0, 0, 0, 0, 1};
  const std::vector<std::size_t> keys{0, 1, 2, 3, 4};
  EXPECT_THROW(assign_folds(y, keys, 1, 1, true), ConfigError);
  const Schema s = parse_schema("x continuous feature\ny binary target\n");
  const auto d = parse_csv("1,0\n2,0\n3,0\n4,0\n5,1\n", s);
  CvProtocol p;
  p.n_folds = 2;
  EXPECT_THROW(evaluate(d, {0}, p), DataError);
}

TEST(Evaluate, MajorityClassOnGerman) {
  const auto r = evaluate_intercept_only(german(), {});
  EXPECT_NEAR(r.test_error, 0.300, 1e-12);
  EXPECT_NEAR(r.type1_error, 0.0, 1e-12);
  EXPECT_NEAR(r.type2_error, 1.0, 1e-12);
  EXPECT_EQ(r.per_fold.size(), 10u);
}

TEST(Evaluate, LabelFlipSwapsErrorTypes) {
  const auto d = german();
  const std::vector<std::size_t> sel{0, 1, 2, 4, 5};
  const auto a = evaluate(d, sel, {});
  const auto b = evaluate(with_positive(d, "1"), sel, {});
  EXPECT_NEAR(a.test_error, b.test_error, 1e-12);
  EXPECT_NEAR(a.type1_error, b.type2_error, 1e-12);
  EXPECT_NEAR(a.type2_error, b.type1_error, 1e-12);

  CvProtocol sw;
  sw.convention = ErrorConvention::swapped;
  const auto c = evaluate(d, sel, sw);
  EXPECT_EQ(c.type1_error, a.type2_error);
  EXPECT_EQ(c.type2_error, a.type1_error);
}

TEST(Evaluate, ReportInvariants) {
  const auto d = german();
  const auto r = evaluate(d, {0, 1, 2}, {});
  double lo = 1, hi = 0;
  for (const auto& f : r.per_fold) {
    for (double v : {f.test_error, f.type1_error, f.type2_error}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const double weighted = (f.type1_error * f.n_class0 + f.type2_error * f.n_class1) / f.n_test;
    EXPECT_NEAR(f.test_error, weighted, 1e-12);
    lo = std::min(lo, f.test_error);
    hi = std::max(hi, f.test_error);
  }
  EXPECT_GE(r.test_error, lo);
  EXPECT_LE(r.test_error, hi);
}

TEST(Evaluate, RowShuffleInvariance) {
  const auto d = german();
  std::vector<std::size_t> perm(d.n_samples());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(3));
  const auto shuffled = d.subset(perm);
  const std::vector<std::size_t> sel{0, 1, 4, 12};
  const auto a = evaluate(d, sel, {});
  const auto b = evaluate(shuffled, sel, {});
  ASSERT_EQ(a.per_fold.size(), b.per_fold.size());
  for (std::size_t f = 0; f < a.per_fold.size(); ++f) {
    EXPECT_EQ(a.per_fold[f].n_test, b.per_fold[f].n_test);
    EXPECT_NEAR(a.per_fold[f].test_error, b.per_fold[f].test_error, 1e-12);
    EXPECT_NEAR(a.per_fold[f].type1_error, b.per_fold[f].type1_error, 1e-12);
  }
}

TEST(Evaluate, DuplicateFeatureLeavesPredictionsUnchanged) {
  const auto d = desk_synthetic(400, 5);
  const auto a = evaluate(d, {0, 1, 2}, {});
  const auto b = evaluate(d, {0, 1, 2, 3}, {});
  ASSERT_EQ(a.per_fold.size(), b.per_fold.size());
  for (std::size_t f = 0; f < a.per_fold.size(); ++f) {
    EXPECT_EQ(a.per_fold[f].test_error, b.per_fold[f].test_error);
    EXPECT_EQ(a.per_fold[f].type1_error, b.per_fold[f].type1_error);
    EXPECT_EQ(a.per_fold[f].type2_error, b.per_fold[f].type2_error);
  }
  EXPECT_LT(a.test_error, 0.4);
}

TEST(Evaluate, StrictModeCallsSelectorPerFold) {
  const auto d = desk_synthetic(300, 9);
  std::size_t calls = 0;
  std::size_t train_rows = 0;
  const auto r = evaluate_strict(
      d,
      [&](const Dataset& train) {
        ++calls;
        train_rows += train.n_samples();
        return std::vector<std::size_t>{0, 1};
      },
      {});
  EXPECT_EQ(calls, 10u);
  EXPECT_EQ(train_rows, 9u * 300u);  // every row is held out exactly once
  const auto outside = evaluate(d, {0, 1}, {});
  EXPECT_NEAR(r.test_error, outside.test_error, 1e-12);
}

TEST(Evaluate, EmptySelectionIsAnError) {
  EXPECT_THROW(evaluate(desk_synthetic(100, 1), {}, {}), ConfigError);
}
