#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "quotesurvey/distribution.hpp"
#include "quotesurvey/error.hpp"
#include "support.hpp"

using namespace quotesurvey;

TEST(Histogram, HandBinAssignment) {
  const std::vector<double> scores{-1, -0.5, 0, 0.5, 1};
  const auto h = SentimentHistogram::from_scores(scores, 4);
  const std::vector<double> expected{0.2, 0.2, 0.2, 0.4};
  ASSERT_EQ(h.bin_count(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(h.probabilities()[i], expected[i]);
  EXPECT_EQ(h.n_quotes(), 5u);
}

TEST(Histogram, IdenticalScoresFillOneBin) {
  const std::vector<double> scores(17, 0.33);
  const auto h = SentimentHistogram::from_scores(scores, 20);
  EXPECT_EQ(std::count(h.probabilities().begin(), h.probabilities().end(), 1.0), 1);
  EXPECT_EQ(h.probabilities()[SentimentHistogram::bin_index(0.33, 20)], 1.0);
}

TEST(Histogram, UniformGrid) {
  std::vector<double> scores;
  for (int i = 0; i < 400; ++i) scores.push_back(-1.0 + 2.0 * i / 399.0);
  const auto h = SentimentHistogram::from_scores(scores, 4);
  for (double p : h.probabilities()) EXPECT_NEAR(p, 0.25, 1.0 / 400.0);
}

TEST(Histogram, EdgesAndErrors) {
  EXPECT_EQ(SentimentHistogram::bin_index(-1.0, 20), 0u);
  EXPECT_EQ(SentimentHistogram::bin_index(1.0, 20), 19u);
  EXPECT_EQ(SentimentHistogram::bin_index(0.0, 2), 1u);
  EXPECT_THROW(SentimentHistogram::from_scores({}, 4), DataError);
  EXPECT_THROW(SentimentHistogram::from_scores(std::vector<double>{0.1}, 1), std::invalid_argument);
  EXPECT_THROW(SentimentHistogram::from_scores(std::vector<double>{1.5}, 4), std::invalid_argument);
}

TEST(Histogram, SumsToOneAndIsPermutationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> scores(1 + trial * 13);
    for (auto& s : scores) s = u(rng);
    const auto h = SentimentHistogram::from_scores(scores, 20);
    EXPECT_NEAR(std::accumulate(h.probabilities().begin(), h.probabilities().end(), 0.0), 1.0, 1e-12);
    std::shuffle(scores.begin(), scores.end(), rng);
    EXPECT_EQ(SentimentHistogram::from_scores(scores, 20), h);
  }
}

TEST(Survey, EncodingExamples) {
  EXPECT_EQ(encode_survey({10, 10, 10, 10}).probabilities(), (std::array<double, 4>{0.25, 0.25, 0.25, 0.25}));
  EXPECT_EQ(encode_survey({0, 0, 0, 7}).probabilities(), (std::array<double, 4>{0, 0, 0, 1}));
  const auto s = encode_survey({100, 200, 400, 300});
  const std::array<double, 4> expected{0.1, 0.2, 0.4, 0.3};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(s[i], expected[i], 1e-15);
  EXPECT_THROW(encode_survey({0, 0, 0, 0}), DataError);
  EXPECT_THROW(encode_survey({1, -1, 0, 0}), DataError);
}

TEST(Survey, MeanAndModal) {
  const auto s = encode_survey({1, 0, 0, 1});
  EXPECT_DOUBLE_EQ(s.mean_favorability(), 0.0);
  EXPECT_EQ(s.modal(), Favorability::kVeryUnfavorable);  // first maximum wins
  EXPECT_EQ(label(encode_survey({0, 1, 3, 2}).modal()), "F");
  EXPECT_THROW(SurveyDistribution::from_probabilities({0.5, 0.5, 0.5, 0.0}), std::invalid_argument);
}

TEST(KlDivergence, HandValues) {
  const std::vector<double> u{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(kl_divergence(u, u, 0.0), 0.0);
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  EXPECT_NEAR(kl_divergence(p, q, 0.0), 0.1438, 1e-4);
  EXPECT_NEAR(kl_divergence(p, q, 0.0), 0.14384103622589042, 1e-14);
  const std::vector<double> a{0.0, 1.0}, b{0.5, 0.5};
  EXPECT_NEAR(kl_divergence(a, b, 0.0), std::log(2.0), 1e-15);
}

TEST(KlDivergence, UndefinedWithoutSmoothing) {
  const std::vector<double> p{0.5, 0.5}, q{1.0, 0.0};
  EXPECT_THROW(kl_divergence(p, q, 0.0), DataError);
  const double d = kl_divergence(p, q, 1e-9);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_GT(d, 5.0);
}

TEST(KlDivergence, SmoothingOnlyWhenNeeded) {
  const std::vector<double> p{0.0, 1.0}, q{0.5, 0.5};
  // No q entry is zero, so epsilon must not change the value.
  EXPECT_EQ(kl_divergence(p, q, 1e-3), kl_divergence(p, q, 0.0));
}

TEST(KlDivergence, RejectsBadInput) {
  const std::vector<double> p{0.5, 0.5}, q3{0.2, 0.3, 0.5}, bad{0.5, 0.6};
  EXPECT_THROW(kl_divergence(p, q3, 0.0), std::invalid_argument);
  EXPECT_THROW(kl_divergence(p, bad, 0.0), std::invalid_argument);
  EXPECT_THROW(kl_divergence(p, p, -1.0), std::invalid_argument);
}

TEST(KlProperties, SelfDivergenceZeroAndNonNegative) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> len(2, 64);
  for (int i = 0; i < 500; ++i) {
    const auto n = len(rng);
    const auto p = qs_test::random_simplex(rng, n, 0.2);
    const auto q = qs_test::random_simplex(rng, n, 0.2);
    EXPECT_EQ(kl_divergence(p, p, 1e-9), 0.0);
    EXPECT_GE(kl_divergence(p, q, 1e-9), 0.0);
  }
}

TEST(KlProperties, Asymmetric) {
  const std::vector<double> p{0.9, 0.1}, q{0.5, 0.5};
  EXPECT_GT(std::fabs(kl_divergence(p, q, 0.0) - kl_divergence(q, p, 0.0)), 1e-3);
}
