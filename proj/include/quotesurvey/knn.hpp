#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quotesurvey/distribution.hpp"

namespace quotesurvey {

struct KnnConfig {
  std::size_t k = 1;
  double epsilon = 1e-9;    // KL smoothing
  double epsilon_w = 1e-9;  // added to divergences before inversion
  double lambda = 1.0;      // similarity multiplier for lambda_country
  std::optional<std::string> lambda_country;
};

struct Neighbor {
  std::size_t sample_index = 0;  // into the training set
  double divergence = 0.0;
  double similarity = 0.0;
  double weight = 0.0;
};

/// A training sample as seen by neighbor selection.
struct Candidate {
  std::size_t index = 0;
  double divergence = 0.0;
  double multiplier = 1.0;
  const std::string* country = nullptr;
  int year = 0;
};

/// Keeps the min(k, n) candidates with the largest similarity
/// multiplier / (divergence + epsilon_w); ties go to the smaller
/// (country, year), then the smaller index. Weights are the similarities
/// normalized over the selected set.
std::vector<Neighbor> select_neighbors(std::vector<Candidate> candidates, std::size_t k,
                                       double epsilon_w);

/// Nearest training samples of `test` by D(test || train_j).
std::vector<Neighbor> nearest_neighbors(const Sample& test, std::span<const Sample> train,
                                        const KnnConfig& config);

/// Weighted average of the neighbors' surveys, renormalized. If an entry
/// ends up <= 0 every entry gets `epsilon` added before renormalizing again.
SurveyDistribution weighted_survey(std::span<const Neighbor> neighbors,
                                   std::span<const Sample> train, double epsilon);

SurveyDistribution predict(const Sample& test, std::span<const Sample> train,
                           const KnnConfig& config);

}  // namespace quotesurvey
