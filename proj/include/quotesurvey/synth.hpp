#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "quotesurvey/corpus.hpp"
#include "quotesurvey/demography.hpp"
#include "quotesurvey/samples.hpp"

namespace quotesurvey {

struct BiasedOutlet {
  std::string name;
  double shift = 0.0;  // added to the sentiment center of its quotes
};

/// Generative model:
///   mu(c, y)     = clamp(base_c + d(c, y)), with d an AR(1) over years
///                  (coefficient `persistence`, stationary sd `year_spread`)
///   quote center = clamp(0.8 mu + offset_c), offset_c ~ N(0, country_offset)
///   sentiment    ~ normal(center + outlet shift, noise) truncated to [-1, 1]
///   survey       ~ multinomial(respondents, ordered-logit(mu))
/// With noise == 0 quote sentiments equal their center and survey counts
/// are apportioned deterministically (largest remainder).
struct SynthConfig {
  std::size_t n_countries = 20;
  int first_year = 2015;
  int last_year = 2020;
  std::size_t quotes_min = 1500;  // per cell; log-uniform in [min, max]
  std::size_t quotes_max = 1500;
  std::size_t survey_respondents = 1000;
  double noise = 0.35;
  double persistence = 0.9;
  double year_spread = 0.25;
  double country_offset = 0.2;
  std::size_t n_outlets = 30;
  std::vector<BiasedOutlet> biased_outlets;  // added on top of n_outlets unless the name exists
  std::size_t speakers_per_country = 20;
  double dual_nationality = 0.05;
  double unknown_speaker = 0.03;
  double off_topic = 0.1;       // extra quotes per cell without any keyword
  double name_mentions = 0.1;   // on-topic quotes that only name a US speaker
  std::size_t us_speakers = 10;
  std::uint64_t seed = 42;
};

struct CountryTruth {
  std::string country;
  double base = 0.0;
  double offset = 0.0;
};

struct CellTruth {
  std::string country;
  int year = 0;
  double favorability = 0.0;  // latent mu
  double quote_center = 0.0;
  std::array<double, 4> survey_probabilities{};
  std::size_t n_quotes = 0;  // on-topic quotes generated for the cell
};

struct SynthData {
  SynthConfig config;
  std::vector<QuoteRecord> quotes;
  std::vector<SurveyRow> surveys;
  std::vector<SpeakerRecord> speakers;
  std::vector<CountryTruth> countries;
  std::vector<CellTruth> cells;
  std::vector<std::string> outlets;
};

/// Ordered-logit softening of a latent favorability in [-1, 1] into
/// (VUF, UF, F, VF) probabilities.
std::array<double, 4> favorability_probabilities(double mu);

/// Country codes used for `n` synthetic countries (never "US").
std::vector<std::string> synthetic_countries(std::size_t n);

/// Deterministic for a given config (including the seed).
SynthData generate(const SynthConfig& config);

nlohmann::ordered_json truth_json(const SynthData& data);

/// Writes quotes.jsonl, survey.csv, speakers.tsv and truth.json into `dir`.
void write_synth(const std::filesystem::path& dir, const SynthData& data,
                 const QuoteSchema& schema = {});

}  // namespace quotesurvey
