#include "quotesurvey/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "quotesurvey/error.hpp"

namespace quotesurvey {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_probability_vector(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw std::invalid_argument(fmt::format("{} has a negative entry", name));
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw std::invalid_argument(fmt::format("{} sums to {}, not 1", name, sum));
  }
}

}  // namespace

SentimentHistogram::SentimentHistogram(std::vector<std::size_t> counts)
    : counts_(std::move(counts)) {
  if (counts_.size() < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  n_quotes_ = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
  if (n_quotes_ == 0) throw DataError("no quotes for cell");
  probabilities_.reserve(counts_.size());
  for (auto c : counts_) {
    probabilities_.push_back(static_cast<double>(c) / static_cast<double>(n_quotes_));
  }
}

std::size_t SentimentHistogram::bin_index(double score, std::size_t bins) {
  if (!(score >= -1.0 && score <= 1.0)) {
    throw std::invalid_argument(fmt::format("sentiment {} outside [-1, 1]", score));
  }
  const double position = (score + 1.0) / 2.0 * static_cast<double>(bins);
  return std::min(static_cast<std::size_t>(position), bins - 1);
}

SentimentHistogram SentimentHistogram::from_scores(std::span<const double> scores,
                                                   std::size_t bins) {
  if (bins < 2) throw std::invalid_argument("histogram needs at least 2 bins");
  if (scores.empty()) throw DataError("no quotes for cell");
  std::vector<std::size_t> counts(bins, 0);
  for (double s : scores) ++counts[bin_index(s, bins)];
  return SentimentHistogram(std::move(counts));
}

SentimentHistogram SentimentHistogram::from_counts(std::vector<std::size_t> counts) {
  return SentimentHistogram(std::move(counts));
}

std::string_view label(Favorability f) { return kFavorabilityLabels[static_cast<std::size_t>(f)]; }

SurveyDistribution SurveyDistribution::from_probabilities(const std::array<double, 4>& p) {
  check_probability_vector(p, "survey distribution");
  return SurveyDistribution(p);
}

double SurveyDistribution::mean_favorability() const {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m += p_[i] * kFavorabilityValues[i];
  return m;
}

Favorability SurveyDistribution::modal() const {
  const auto it = std::max_element(p_.begin(), p_.end());
  return static_cast<Favorability>(it - p_.begin());
}

SurveyDistribution encode_survey(const std::array<double, 4>& counts) {
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw DataError("survey counts must be finite and non-negative");
    }
    total += c;
  }
  if (total <= 0.0) throw DataError("survey counts are all zero");
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) p[i] = counts[i] / total;
  return SurveyDistribution::from_probabilities(p);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  if (p.empty()) throw std::invalid_argument("kl_divergence: empty distributions");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("kl_divergence: epsilon must be >= 0");
  check_probability_vector(p, "p");
  check_probability_vector(q, "q");

  const bool smooth = epsilon > 0.0 && std::any_of(q.begin(), q.end(), [](double x) { return x <= 0.0; });
  const double scale = smooth ? 1.0 / (1.0 + epsilon * static_cast<double>(p.size())) : 1.0;
  const double shift = smooth ? epsilon : 0.0;

  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = (p[i] + shift) * scale;
    const double qi = (q[i] + shift) * scale;
    if (pi == 0.0) continue;
    if (qi == 0.0) throw DataError("divergence undefined: q has zero mass where p does not");
    d += pi * std::log(pi / qi);
  }
  // Rounding can leave a tiny negative value for p == q.
  return std::max(d, 0.0);
}

}  // namespace quotesurvey
