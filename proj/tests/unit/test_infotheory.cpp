#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "qpfs/baselines.hpp"
#include "qpfs/error.hpp"
#include "qpfs/infotheory.hpp"

using namespace qpfs;

namespace {

DiscretizedDataset german_disc() {
  ParseOptions opt;
  opt.delimiter = ' ';
  return discretize(load_csv(oracle::data_path("german.data"),
                             load_schema(oracle::data_path("german.schema")), opt));
}

}  // namespace

TEST(Contingency, Examples) {
  const std::vector<Code> a{0, 0, 1, 1}, b{0, 1, 0, 1};
  auto t = contingency(a, b);
  EXPECT_EQ(t.rows(), 2u);
  EXPECT_EQ(t.total(), 4u);
  for (std::size_t u = 0; u < 2; ++u)
    for (std::size_t v = 0; v < 2; ++v) EXPECT_EQ(t.at(u, v), 1u);

  const std::vector<Code> c{0, 0, 0}, d{1, 1, 1};
  t = contingency(c, d);
  EXPECT_EQ(t.rows(), 1u);
  EXPECT_EQ(t.cols(), 1u);
  EXPECT_EQ(t.at(0, 0), 3u);

  const std::vector<Code> e{0, 1, 0, 1, 2};
  t = contingency(e, e);
  EXPECT_EQ(t.at(0, 0), 2u);
  EXPECT_EQ(t.at(1, 1), 2u);
  EXPECT_EQ(t.at(2, 2), 1u);
  EXPECT_EQ(t.at(0, 1) + t.at(0, 2) + t.at(1, 0) + t.at(1, 2) + t.at(2, 0) + t.at(2, 1), 0u);
}

TEST(Contingency, Errors) {
  const std::vector<Code> a{0, 1}, b{0};
  EXPECT_THROW(contingency(a, b), DataError);
  EXPECT_THROW(contingency(std::vector<Code>{}, std::vector<Code>{}), DataError);
  EXPECT_THROW(ContingencyTable(2, 2, {1, 2, 3}), DataError);
}

TEST(MutualInformation, Examples) {
  EXPECT_DOUBLE_EQ(mutual_information(ContingencyTable(2, 2, {25, 25, 25, 25})), 0.0);
  EXPECT_NEAR(mutual_information(ContingencyTable(2, 2, {50, 0, 0, 50})), 1.0, 1e-15);
  // Cell-by-cell oracle, frozen: 1 - H(0.2).
  const double oracle_value = oracle::mi_of_counts({{40, 10}, {10, 40}});
  EXPECT_NEAR(oracle_value, 0.27807190511263774, 1e-14);
  EXPECT_NEAR(mutual_information(ContingencyTable(2, 2, {40, 10, 10, 40})), oracle_value, 1e-14);
  EXPECT_THROW(mutual_information(ContingencyTable(1, 1, {0})), DataError);
}

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(std::vector<Code>{0, 0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<Code>{0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<Code>{0, 0, 1, 1, 2, 2, 3, 3}), 2.0);
  EXPECT_THROW(entropy(std::vector<Code>{}), DataError);
}

TEST(MutualInformation, Properties) {
  std::mt19937_64 gen(7);
  for (int rep = 0; rep < 200; ++rep) {
    const unsigned la = 1 + rep % 5, lb = 1 + (rep / 5) % 4;
    const auto a = oracle::random_codes(gen, 60, la);
    auto b = oracle::random_codes(gen, 60, lb);
    for (std::size_t i = 0; i < b.size(); i += 3) b[i] = a[i] % lb;  // some dependence
    const double ab = mutual_information(contingency(a, b));
    const double ba = mutual_information(contingency(b, a));
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::min(entropy(a), entropy(b)) + 1e-12);
    EXPECT_NEAR(mutual_information(contingency(a, a)), entropy(a), 1e-12);
    EXPECT_NEAR(ab, oracle::mi_bits(a, b), 1e-12);

    // Joint permutation invariance.
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<Code> pa, pb;
    for (auto p : perm) pa.push_back(a[p]), pb.push_back(b[p]);
    EXPECT_NEAR(mutual_information(contingency(pa, pb)), ab, 1e-12);
  }
}

TEST(RedundancyMatrix, SingleFeature) {
  const auto d = oracle::make_discrete({{0, 1, 1, 0}}, {0, 1, 0, 1});
  const auto q = build_redundancy_matrix(d);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_DOUBLE_EQ(q.values(0, 0), 1.0);
}

TEST(RedundancyMatrix, IndependentBalancedFeatures) {
  const auto d = oracle::make_discrete({{0, 0, 1, 1}, {0, 1, 0, 1}}, {0, 1, 0, 1});
  const auto q = build_redundancy_matrix(d);
  EXPECT_EQ(q.values(0, 1), 0.0);
  EXPECT_EQ(q.values(1, 0), 0.0);
  const auto z = build_redundancy_matrix(d, QDiagonal::zero);
  EXPECT_EQ(z.values(0, 0), 0.0);
  EXPECT_EQ(z.diagonal, QDiagonal::zero);
}

TEST(RedundancyMatrix, GermanSpotChecks) {
  const auto d = german_disc();
  const auto q = build_redundancy_matrix(d);
  ASSERT_EQ(q.size(), 20u);
  EXPECT_EQ(q.values, q.values.transpose());
  EXPECT_GE(q.values.minCoeff(), 0.0);
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> pick(0, 19);
  for (int rep = 0; rep < 3; ++rep) {
    const int i = pick(gen);
    int j = pick(gen);
    if (j == i) j = (i + 1) % 20;
    EXPECT_NEAR(q.values(i, j), oracle::mi_bits(d.feature_codes[i], d.feature_codes[j]), 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    EXPECT_NEAR(q.values(i, i), oracle::entropy_bits(d.feature_codes[i]), 1e-12);
  }
}

TEST(RelevanceVector, Examples) {
  const std::vector<int> y{0, 1, 0, 1, 1, 0, 1, 0};
  const auto d = oracle::make_discrete({{0, 1, 0, 1, 1, 0, 1, 0}, {0, 0, 1, 1, 0, 0, 1, 1}}, y);
  const auto f = build_relevance_vector(d);
  EXPECT_NEAR(f.values(0), entropy(std::span<const int>(y)), 1e-15);
  EXPECT_EQ(f.values(1), 0.0);
  EXPECT_THROW(build_relevance_vector(oracle::make_discrete({{0, 1}}, {1, 1})), DataError);
}

TEST(RelevanceVector, GermanMatchesInformationGain) {
  const auto d = german_disc();
  const auto f = build_relevance_vector(d);
  const auto ig = information_gain(d, 20);
  Eigen::Index top = 0;
  f.values.maxCoeff(&top);
  EXPECT_EQ(ig.selected[0], static_cast<std::size_t>(top));
  for (int j = 0; j < 20; ++j) {
    EXPECT_EQ(ig.scores[j], f.values(j));
    EXPECT_NEAR(f.values(j), oracle::mi_bits(d.feature_codes[j], d.target), 1e-12);
  }
}

TEST(Serialization, RoundTrip) {
  const auto d = german_disc();
  const auto q = build_redundancy_matrix(d, QDiagonal::zero);
  const auto f = build_relevance_vector(d);
  const auto q2 = parse_redundancy(format_redundancy(q));
  const auto f2 = parse_relevance(format_relevance(f));
  EXPECT_EQ(q2.values, q.values);
  EXPECT_EQ(q2.feature_names, q.feature_names);
  EXPECT_EQ(q2.diagonal, QDiagonal::zero);
  EXPECT_EQ(f2.values, f.values);
  EXPECT_EQ(f2.feature_names, f.feature_names);
}

TEST(SymmetricUncertainty, Bounds) {
  EXPECT_EQ(symmetric_uncertainty(ContingencyTable(1, 1, {5})), 0.0);
  EXPECT_DOUBLE_EQ(symmetric_uncertainty(ContingencyTable(2, 2, {3, 0, 0, 3})), 1.0);
}
