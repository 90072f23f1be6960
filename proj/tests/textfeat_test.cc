#include "miner/textfeat.h"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "miner/error.h"
#include "miner/util.h"
#include "test_support.h"

namespace miner {
namespace {

Contingency table(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  return Contingency{a, b, c, d};
}

TEST(ChiSquareTest, PerfectAssociationScoresN) {
  for (std::int64_t k : {1, 5, 40}) {
    EXPECT_DOUBLE_EQ(chi_square(table(k, 0, 0, k), 2 * k), 2.0 * static_cast<double>(k));
  }
}

TEST(ChiSquareTest, IndependentTableScoresZero) {
  EXPECT_EQ(chi_square(table(5, 5, 5, 5), 20), 0.0);
  EXPECT_EQ(chi_square(table(2, 4, 3, 6), 15), 0.0);
}

TEST(ChiSquareTest, WorkedExample) {
  // 8 * (9 - 1)^2 / (4 * 4 * 4 * 4)
  EXPECT_DOUBLE_EQ(chi_square(table(3, 1, 1, 3), 8), 2.0);
}

TEST(ChiSquareTest, ZeroMarginalScoresZero) {
  EXPECT_EQ(chi_square(table(0, 0, 3, 5), 8), 0.0);
  EXPECT_EQ(chi_square(table(4, 0, 6, 0), 10), 0.0);
}

TEST(ChiSquareTest, RejectsInconsistentInput) {
  EXPECT_THROW(chi_square(table(1, 2, 3, 4), 11), InvalidArgument);
  EXPECT_THROW(chi_square(table(-1, 2, 3, 4), 8), InvalidArgument);
}

TEST(ChiSquareProperty, MatchesObservedVersusExpected) {
  Rng rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = static_cast<std::int64_t>(uniform_index(rng, 200));
    const auto b = static_cast<std::int64_t>(uniform_index(rng, 200));
    const auto c = static_cast<std::int64_t>(uniform_index(rng, 200));
    const auto d = static_cast<std::int64_t>(uniform_index(rng, 200));
    const double expected = testing::chi_square_oracle(a, b, c, d);
    const double got = chi_square(table(a, b, c, d), a + b + c + d);
    EXPECT_NEAR(got, expected, 1e-9 * std::max(1.0, expected)) << a << " " << b << " " << c << " " << d;
  }
}

TEST(ChiSquareProperty, SymmetricUnderRowAndColumnSwap) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::int64_t v[4];
    for (auto& x : v) x = static_cast<std::int64_t>(uniform_index(rng, 50));
    const std::int64_t n = v[0] + v[1] + v[2] + v[3];
    const double base = chi_square(table(v[0], v[1], v[2], v[3]), n);
    EXPECT_NEAR(chi_square(table(v[1], v[0], v[3], v[2]), n), base, 1e-9 * std::max(1.0, base));
    EXPECT_NEAR(chi_square(table(v[2], v[3], v[0], v[1]), n), base, 1e-9 * std::max(1.0, base));
    EXPECT_NEAR(chi_square(table(v[0], v[2], v[1], v[3]), n), base, 1e-9 * std::max(1.0, base));
    EXPECT_GE(base, 0.0);
    EXPECT_LE(base, static_cast<double>(n) + 1e-9);
  }
}

LabeledCorpus great_awful_corpus() {
  std::vector<ReviewDocument> docs;
  const std::vector<std::vector<std::string>> pos = {
      {"great", "lens"}, {"great", "battery"}, {"great", "screen", "the"}, {"nice", "the"}};
  const std::vector<std::vector<std::string>> neg = {
      {"awful", "lens"}, {"awful", "battery", "the"}, {"awful", "the"}, {"bad", "screen"}};
  int i = 0;
  for (const auto& t : pos) docs.push_back(testing::make_doc("d" + std::to_string(i++), t, Polarity::positive));
  for (const auto& t : neg) docs.push_back(testing::make_doc("d" + std::to_string(i++), t, Polarity::negative));
  return LabeledCorpus(std::move(docs));
}

TEST(SelectFeaturesTest, RanksDiscriminativeTermsFirst) {
  auto fs = select_features(great_awful_corpus(), FeatureParams{2, 2});
  ASSERT_EQ(fs.dimension(), 2u);
  // Both score 8 * (3*4 - 1*0)^2 / (4 * 4 * 3 * 5); ties break by term.
  EXPECT_EQ(fs.terms()[0], "awful");
  EXPECT_EQ(fs.terms()[1], "great");
  EXPECT_DOUBLE_EQ(fs.chi()[0], 8.0 * 144.0 / 240.0);
  EXPECT_EQ(fs.column("great"), 1);
  EXPECT_EQ(fs.column("nice"), -1);
  EXPECT_DOUBLE_EQ(fs.idf()[1], std::log(8.0 / 3.0));
}

TEST(SelectFeaturesTest, ClampsToVocabulary) {
  auto fs = select_features(great_awful_corpus(), FeatureParams{100, 2});
  // Terms with df >= 2: great, awful, lens, battery, screen, the.
  EXPECT_EQ(fs.dimension(), 6u);
  auto all = select_features(great_awful_corpus(), FeatureParams{100, 1});
  EXPECT_EQ(all.dimension(), 8u);
}

TEST(SelectFeaturesTest, RejectsBadParams) {
  EXPECT_THROW(select_features(great_awful_corpus(), FeatureParams{0, 2}), InvalidArgument);
  EXPECT_THROW(select_features(great_awful_corpus(), FeatureParams{10, 100}), Error);
}

TEST(SelectFeaturesTest, TermInEveryDocumentHasZeroIdf) {
  std::vector<ReviewDocument> docs;
  docs.push_back(testing::make_doc("a", {"x", "good"}, Polarity::positive));
  docs.push_back(testing::make_doc("b", {"x", "good"}, Polarity::positive));
  docs.push_back(testing::make_doc("c", {"x", "bad"}, Polarity::negative));
  docs.push_back(testing::make_doc("d", {"x", "bad"}, Polarity::negative));
  auto fs = select_features(LabeledCorpus(std::move(docs)), FeatureParams{10, 1});
  auto col = fs.column("x");
  ASSERT_GE(col, 0);
  EXPECT_EQ(fs.idf()[static_cast<std::size_t>(col)], 0.0);
  const std::vector<std::string> only_x = {"x", "x"};
  EXPECT_TRUE(vectorize(only_x, fs).entries.empty());
}

TEST(FeatureSetTest, JsonRoundTrip) {
  auto fs = select_features(great_awful_corpus(), FeatureParams{4, 2});
  auto back = FeatureSet::from_json(fs.to_json());
  EXPECT_EQ(back.terms(), fs.terms());
  EXPECT_EQ(back.idf(), fs.idf());
  EXPECT_EQ(back.doc_count(), fs.doc_count());
  EXPECT_EQ(back.fingerprint(), fs.fingerprint());
  EXPECT_EQ(back.to_json().dump(), fs.to_json().dump());
}

TEST(VectorizeTest, TfIdfIsL2Normalized) {
  FeatureSet fs({"a", "b"}, {1.0, 2.0}, {1.0, 1.0}, 10, FeatureParams{});
  const std::vector<std::string> tokens = {"a", "a", "b", "zzz"};
  auto v = vectorize(tokens, fs);
  ASSERT_EQ(v.entries.size(), 2u);
  // tf*idf = (2, 2) before normalization.
  EXPECT_EQ(v.entries[0].first, 0u);
  EXPECT_NEAR(v.entries[0].second, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(v.entries[1].second, std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(v.squared_norm(), 1.0, 1e-12);
  const std::vector<double> dense = {1.0, -3.0};
  EXPECT_NEAR(v.dot(dense), -2.0 * std::sqrt(0.5), 1e-12);
}

TEST(VectorizeProperty, NormIsZeroOrOneAndColumnsIncrease) {
  FeatureSet fs({"a", "b", "c", "d"}, {0.5, 1.0, 0.0, 3.0}, {4, 3, 2, 1}, 20, FeatureParams{});
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e"};
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> tokens;
    const auto n = uniform_index(rng, 10);
    for (std::uint64_t i = 0; i < n; ++i) tokens.push_back(pool[uniform_index(rng, pool.size())]);
    auto v = vectorize(tokens, fs);
    const double norm = v.squared_norm();
    EXPECT_TRUE(v.entries.empty() ? norm == 0.0 : std::abs(norm - 1.0) < 1e-12);
    for (std::size_t i = 1; i < v.entries.size(); ++i) {
      EXPECT_LT(v.entries[i - 1].first, v.entries[i].first);
    }
    for (const auto& [col, w] : v.entries) EXPECT_GT(w, 0.0);
  }
}

}  // namespace
}  // namespace miner
