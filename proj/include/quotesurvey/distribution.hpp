#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace quotesurvey {

/// Equal-width histogram of sentiment scores over [-1, 1]. Bins are
/// left-closed except the last, which also holds +1.
class SentimentHistogram {
 public:
  static SentimentHistogram from_scores(std::span<const double> scores, std::size_t bins);
  static SentimentHistogram from_counts(std::vector<std::size_t> counts);

  static std::size_t bin_index(double score, std::size_t bins);

  std::size_t bin_count() const { return counts_.size(); }
  std::size_t n_quotes() const { return n_quotes_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const std::vector<double>& probabilities() const { return probabilities_; }

  friend bool operator==(const SentimentHistogram&, const SentimentHistogram&) = default;

 private:
  explicit SentimentHistogram(std::vector<std::size_t> counts);

  std::vector<std::size_t> counts_;
  std::vector<double> probabilities_;
  std::size_t n_quotes_ = 0;
};

enum class Favorability { kVeryUnfavorable = 0, kUnfavorable, kFavorable, kVeryFavorable };

inline constexpr std::array<double, 4> kFavorabilityValues = {-1.0, -0.5, 0.5, 1.0};
inline constexpr std::array<std::string_view, 4> kFavorabilityLabels = {"VUF", "UF", "F", "VF"};

std::string_view label(Favorability f);

/// Probabilities over (VUF, UF, F, VF).
class SurveyDistribution {
 public:
  /// Uniform over the four categories.
  SurveyDistribution() = default;

  /// Validates a probability vector (each >= 0, sum 1 within 1e-9) and keeps it verbatim.
  static SurveyDistribution from_probabilities(const std::array<double, 4>& p);

  const std::array<double, 4>& probabilities() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }

  /// Expected value under the -1 / -0.5 / 0.5 / 1 encoding.
  double mean_favorability() const;
  /// Most probable category; the first one wins ties.
  Favorability modal() const;

  friend bool operator==(const SurveyDistribution&, const SurveyDistribution&) = default;

 private:
  explicit SurveyDistribution(const std::array<double, 4>& p) : p_(p) {}
  std::array<double, 4> p_{0.25, 0.25, 0.25, 0.25};
};

/// Normalizes respondent counts (or proportions) in (VUF, UF, F, VF) order.
/// Throws DataError when everything is zero.
SurveyDistribution encode_survey(const std::array<double, 4>& counts);

/// One (country, year) cell.
struct Sample {
  std::string country;
  int year = 0;
  SentimentHistogram histogram;
  std::optional<SurveyDistribution> survey;

  std::size_t n_quotes() const { return histogram.n_quotes(); }
};

/// D(p || q) = sum_i p_i ln(p_i / q_i) in nats, with 0 ln(0 / q) = 0.
/// When epsilon > 0 and some q_i <= 0, both vectors get epsilon added to
/// every entry and are renormalized first. With epsilon = 0 a zero q_i
/// under positive p_i throws DataError ("divergence undefined").
double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon);

}  // namespace quotesurvey
