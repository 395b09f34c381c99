#include "quotesurvey/knn.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "quotesurvey/error.hpp"

namespace quotesurvey {

std::vector<Neighbor> select_neighbors(std::vector<Candidate> candidates, std::size_t k,
                                       double epsilon_w) {
  if (candidates.empty()) throw DataError("empty training set");
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (!(epsilon_w > 0.0)) throw std::invalid_argument("epsilon_w must be > 0");

  struct Scored {
    double similarity;
    const Candidate* candidate;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (!(c.multiplier >= 1.0)) throw std::invalid_argument("similarity multiplier must be >= 1");
    scored.push_back({c.multiplier / (c.divergence + epsilon_w), &c});
  }

  const auto better = [](const Scored& a, const Scored& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    const auto& ca = *a.candidate;
    const auto& cb = *b.candidate;
    return std::tie(*ca.country, ca.year, ca.index) < std::tie(*cb.country, cb.year, cb.index);
  };
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    better);

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) total += scored[i].similarity;

  std::vector<Neighbor> neighbors;
  neighbors.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& c = *scored[i].candidate;
    neighbors.push_back({c.index, c.divergence, scored[i].similarity, scored[i].similarity / total});
  }
  return neighbors;
}

std::vector<Neighbor> nearest_neighbors(const Sample& test, std::span<const Sample> train,
                                        const KnnConfig& config) {
  if (train.empty()) throw DataError("empty training set");
  if (!(config.lambda >= 1.0)) throw std::invalid_argument("lambda must be >= 1");
  std::vector<Candidate> candidates;
  candidates.reserve(train.size());
  for (std::size_t j = 0; j < train.size(); ++j) {
    const auto& s = train[j];
    if (!s.survey) {
      throw DataError(
          fmt::format("training sample {}/{} has no survey", s.country, s.year));
    }
    const bool boosted = config.lambda_country && s.country == *config.lambda_country;
    candidates.push_back({j,
                          kl_divergence(test.histogram.probabilities(),
                                        s.histogram.probabilities(), config.epsilon),
                          boosted ? config.lambda : 1.0, &s.country, s.year});
  }
  return select_neighbors(std::move(candidates), config.k, config.epsilon_w);
}

SurveyDistribution weighted_survey(std::span<const Neighbor> neighbors,
                                   std::span<const Sample> train, double epsilon) {
  if (neighbors.empty()) throw DataError("no neighbors");
  std::array<double, 4> p{};
  for (const auto& n : neighbors) {
    const auto& survey = train[n.sample_index].survey;
    if (!survey) throw DataError("neighbor has no survey");
    for (std::size_t i = 0; i < 4; ++i) p[i] += n.weight * (*survey)[i];
  }
  const auto normalize = [&p] {
    const double sum = p[0] + p[1] + p[2] + p[3];
    for (auto& x : p) x /= sum;
  };
  normalize();
  if (epsilon > 0.0 && std::any_of(p.begin(), p.end(), [](double x) { return x <= 0.0; })) {
    for (auto& x : p) x += epsilon;
    normalize();
  }
  return SurveyDistribution::from_probabilities(p);
}

SurveyDistribution predict(const Sample& test, std::span<const Sample> train,
                           const KnnConfig& config) {
  const auto neighbors = nearest_neighbors(test, train, config);
  return weighted_survey(neighbors, train, config.epsilon);
}

}  // namespace quotesurvey
