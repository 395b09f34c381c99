#include "quotesurvey/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "quotesurvey/error.hpp"

namespace quotesurvey {

namespace {

constexpr std::array<std::string_view, 40> kCountryPool = {
    "AR", "AU", "BR", "CA", "CL", "CN", "CO", "DE", "EG", "ES", "FR", "GB", "GH", "GR",
    "HU", "ID", "IL", "IN", "IT", "JP", "KE", "KR", "LB", "MX", "NG", "NL", "PE", "PH",
    "PK", "PL", "RU", "SE", "SN", "TN", "TR", "TZ", "UA", "VN", "ZA", "JO"};

constexpr std::array<std::string_view, 32> kFirstNames = {
    "Ada",   "Bruno", "Carla", "Dario", "Elena", "Farid", "Greta", "Hugo",
    "Ines",  "Jonas", "Kemal", "Lena",  "Marco", "Nadia", "Oskar", "Paula",
    "Rafael", "Sofia", "Tomas", "Ulla", "Victor", "Wanda", "Xavier", "Yara",
    "Zoran", "Amira", "Boris", "Chiara", "Dmitri", "Eva", "Felix", "Gloria"};

constexpr std::array<std::string_view, 48> kLastNames = {
    "Abara",   "Bellini",  "Castro",   "Dubois",   "Eriksen",  "Fischer",  "Garcia",  "Haddad",
    "Ivanov",  "Jansen",   "Kowalski", "Laurent",  "Moreau",   "Nakamura", "Okafor",  "Petrov",
    "Quispe",  "Rossi",    "Santos",   "Tanaka",   "Umarov",   "Varga",    "Weber",   "Xu",
    "Yilmaz",  "Zapata",   "Almeida",  "Berger",   "Chen",     "Diallo",   "Esposito", "Fontaine",
    "Gomez",   "Horvath",  "Ibrahim",  "Jovanovic", "Kim",     "Lindqvist", "Mensah", "Novak",
    "Ortega",  "Papadopoulos", "Rahman", "Schmidt", "Toure",  "Urbina",   "Vasquez", "Wojcik"};

constexpr std::array<std::string_view, 10> kUsLastNames = {
    "Whitfield", "Harrington", "Kellerman", "Prescott", "Albright",
    "Caldwell",  "Sutherland", "Merriweather", "Pennington", "Blackwood"};

constexpr std::array<std::string_view, 8> kUsFirstNames = {"James", "Linda", "Robert", "Karen",
                                                           "Michael", "Susan", "David", "Nancy"};

constexpr std::array<std::string_view, 6> kKeywordTemplates = {
    "Our relationship with the United States is at an important point on {}.",
    "The U.S. position on {} will shape what we do next.",
    "We discussed {} with US officials this week.",
    "Many people here follow what the USA says about {}.",
    "Cooperation with the United States on {} matters to us.",
    "Talks with the U.S. about {} continue."};

constexpr std::array<std::string_view, 3> kMentionTemplates = {
    "I spoke with {} yesterday about {}.", "What {} said about {} was noted here.",
    "We expect {} to raise {} at the summit."};

constexpr std::array<std::string_view, 4> kOffTopicTemplates = {
    "The local council approved the new budget for {}.",
    "Our team trained hard before the match, focusing on {}.",
    "Farmers expect a better harvest and lower costs for {}.",
    "The festival drew large crowds despite concerns over {}."};

constexpr std::array<std::string_view, 8> kTopics = {
    "trade", "security", "climate policy", "energy prices",
    "migration", "technology", "tariffs", "regional stability"};

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

class Generator {
 public:
  explicit Generator(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean, double sd) {
    if (sd == 0.0) return mean;
    return std::normal_distribution<double>(mean, sd)(rng_);
  }
  bool chance(double p) { return p > 0.0 && uniform(0.0, 1.0) < p; }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  double truncated_normal(double center, double sd) {
    if (sd == 0.0) return std::clamp(center, -1.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double x = normal(center, sd);
      if (x >= -1.0 && x <= 1.0) return x;
    }
    return std::clamp(center, -1.0, 1.0);
  }

  std::size_t weighted(const std::vector<double>& cumulative) {
    const double u = uniform(0.0, cumulative.back());
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }

  std::array<double, 4> multinomial(std::size_t n, const std::array<double, 4>& p) {
    std::array<double, 4> counts{};
    std::size_t remaining = n;
    double mass = 1.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
      const auto draw = std::binomial_distribution<std::size_t>(remaining, q)(rng_);
      counts[i] = static_cast<double>(draw);
      remaining -= draw;
      mass -= p[i];
    }
    counts[3] = static_cast<double>(remaining);
    return counts;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

std::array<double, 4> apportion(std::size_t n, const std::array<double, 4>& p) {
  std::array<double, 4> counts{};
  std::array<std::pair<double, std::size_t>, 4> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double exact = p[i] * static_cast<double>(n);
    counts[i] = std::floor(exact);
    assigned += static_cast<std::size_t>(counts[i]);
    remainders[i] = {exact - counts[i], i};
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) counts[remainders[i % 4].second] += 1.0;
  return counts;
}

std::string fill(std::string_view pattern, std::string_view a) {
  return fmt::format(fmt::runtime(pattern), a);
}

std::string fill(std::string_view pattern, std::string_view a, std::string_view b) {
  return fmt::format(fmt::runtime(pattern), a, b);
}

void validate(const SynthConfig& c) {
  if (c.n_countries < 3) throw std::invalid_argument("synth needs at least 3 countries");
  if (c.n_countries > kCountryPool.size()) {
    throw std::invalid_argument(fmt::format("synth supports at most {} countries", kCountryPool.size()));
  }
  if (c.last_year < c.first_year) throw std::invalid_argument("year range is empty");
  if (c.quotes_min < 1 || c.quotes_max < c.quotes_min) {
    throw std::invalid_argument("quotes per cell must satisfy 1 <= min <= max");
  }
  if (c.survey_respondents < 1) throw std::invalid_argument("survey needs respondents");
  if (!(c.noise >= 0.0)) throw std::invalid_argument("noise must be >= 0");
  if (!(c.persistence >= 0.0 && c.persistence <= 1.0)) {
    throw std::invalid_argument("persistence must be in [0, 1]");
  }
  if (!(c.year_spread >= 0.0) || !(c.country_offset >= 0.0)) {
    throw std::invalid_argument("spreads must be >= 0");
  }
  if (c.n_outlets < 1 && c.biased_outlets.empty()) throw std::invalid_argument("no outlets");
  if (c.speakers_per_country < 1) throw std::invalid_argument("need speakers per country");
  for (double p : {c.dual_nationality, c.unknown_speaker, c.off_topic, c.name_mentions}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("rates must be in [0, 1]");
  }
  if (c.us_speakers > kUsLastNames.size()) {
    throw std::invalid_argument(fmt::format("at most {} US speakers", kUsLastNames.size()));
  }
  if (c.name_mentions > 0.0 && c.us_speakers == 0) {
    throw std::invalid_argument("name mentions need at least one US speaker");
  }
}

}  // namespace

std::array<double, 4> favorability_probabilities(double mu) {
  constexpr double kScale = 3.0;
  constexpr double kCut = 1.5;
  const double z = kScale * mu;
  const double f1 = logistic(-kCut - z);
  const double f2 = logistic(-z);
  const double f3 = logistic(kCut - z);
  return {f1, f2 - f1, f3 - f2, 1.0 - f3};
}

std::vector<std::string> synthetic_countries(std::size_t n) {
  if (n > kCountryPool.size()) throw std::invalid_argument("too many synthetic countries");
  return {kCountryPool.begin(), kCountryPool.begin() + static_cast<std::ptrdiff_t>(n)};
}

SynthData generate(const SynthConfig& config) {
  validate(config);
  Generator gen(config.seed);
  SynthData data;
  data.config = config;
  const auto countries = synthetic_countries(config.n_countries);
  const int n_years = config.last_year - config.first_year + 1;

  // Outlets with mildly skewed popularity.
  std::vector<double> outlet_shift;
  for (std::size_t o = 0; o < config.n_outlets; ++o) {
    data.outlets.push_back(fmt::format("outlet-{:02d}.example", o + 1));
    outlet_shift.push_back(0.0);
  }
  for (const auto& b : config.biased_outlets) {
    const auto it = std::find(data.outlets.begin(), data.outlets.end(), b.name);
    if (it != data.outlets.end()) {
      outlet_shift[static_cast<std::size_t>(it - data.outlets.begin())] = b.shift;
    } else {
      data.outlets.push_back(b.name);
      outlet_shift.push_back(b.shift);
    }
  }
  std::vector<double> outlet_cumulative;
  double total_weight = 0.0;
  for (std::size_t o = 0; o < data.outlets.size(); ++o) {
    total_weight += 1.0 / std::pow(static_cast<double>(o % std::max<std::size_t>(config.n_outlets, 1)) + 1.0, 0.3);
    outlet_cumulative.push_back(total_weight);
  }

  // Speakers: unique (first, last) pairs drawn from a shuffled grid.
  std::vector<std::pair<std::size_t, std::size_t>> name_grid;
  for (std::size_t f = 0; f < kFirstNames.size(); ++f) {
    for (std::size_t l = 0; l < kLastNames.size(); ++l) name_grid.emplace_back(f, l);
  }
  std::shuffle(name_grid.begin(), name_grid.end(), gen.engine());
  const std::size_t needed = countries.size() * config.speakers_per_country;
  if (needed > name_grid.size()) throw std::invalid_argument("too many speakers requested");

  std::vector<std::vector<std::size_t>> speakers_of(countries.size());
  for (std::size_t c = 0; c < countries.size(); ++c) {
    for (std::size_t s = 0; s < config.speakers_per_country; ++s) {
      const auto [f, l] = name_grid[c * config.speakers_per_country + s];
      SpeakerRecord rec{fmt::format("{} {}", kFirstNames[f], kLastNames[l]), {countries[c]}};
      if (gen.chance(config.dual_nationality)) {
        const auto other = (c + 1 + gen.index(countries.size() - 1)) % countries.size();
        rec.nationalities.push_back(countries[other]);
      }
      speakers_of[c].push_back(data.speakers.size());
      data.speakers.push_back(std::move(rec));
    }
  }
  std::vector<std::string> us_names;
  for (std::size_t u = 0; u < config.us_speakers; ++u) {
    us_names.push_back(fmt::format("{} {}", kUsFirstNames[u % kUsFirstNames.size()], kUsLastNames[u]));
    data.speakers.push_back({us_names.back(), {"US"}});
  }

  // Latent favorability.
  for (const auto& c : countries) {
    data.countries.push_back({c, gen.uniform(-0.6, 0.6), gen.normal(0.0, config.country_offset)});
  }

  std::uint64_t next_id = 0;
  const auto make_quote = [&](std::string text, std::optional<std::string> speaker, int year,
                              double sentiment) {
    QuoteRecord q;
    q.quote_id = fmt::format("S{}-{:08d}", config.seed, next_id++);
    q.text = std::move(text);
    q.speaker = std::move(speaker);
    q.outlet = data.outlets[gen.weighted(outlet_cumulative)];
    const auto day = static_cast<unsigned>(1 + gen.index(28));
    const auto month = static_cast<unsigned>(1 + gen.index(12));
    q.date = std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day};
    q.sentiment = sentiment;
    return q;
  };
  const auto sentiment_for = [&](double center, const std::string& outlet) {
    const auto it = std::find(data.outlets.begin(), data.outlets.end(), outlet);
    const double shift = outlet_shift[static_cast<std::size_t>(it - data.outlets.begin())];
    return gen.truncated_normal(center + shift, config.noise);
  };

  const double innovation = std::sqrt(1.0 - config.persistence * config.persistence);
  for (std::size_t c = 0; c < countries.size(); ++c) {
    const auto& truth = data.countries[c];
    double deviation = gen.normal(0.0, config.year_spread);
    for (int yi = 0; yi < n_years; ++yi) {
      const int year = config.first_year + yi;
      if (yi > 0) deviation = config.persistence * deviation + innovation * gen.normal(0.0, config.year_spread);
      CellTruth cell;
      cell.country = countries[c];
      cell.year = year;
      cell.favorability = std::clamp(truth.base + deviation, -0.95, 0.95);
      cell.quote_center = std::clamp(0.8 * cell.favorability + truth.offset, -0.95, 0.95);
      cell.survey_probabilities = favorability_probabilities(cell.favorability);
      if (config.quotes_min == config.quotes_max) {
        cell.n_quotes = config.quotes_min;
      } else {
        const double lo = std::log(static_cast<double>(config.quotes_min));
        const double hi = std::log(static_cast<double>(config.quotes_max));
        cell.n_quotes = static_cast<std::size_t>(std::llround(std::exp(gen.uniform(lo, hi))));
      }

      for (std::size_t q = 0; q < cell.n_quotes; ++q) {
        std::optional<std::string> speaker;
        if (!gen.chance(config.unknown_speaker)) {
          const auto& pool = speakers_of[c];
          speaker = data.speakers[pool[gen.index(pool.size())]].name;
        }
        const auto topic = kTopics[gen.index(kTopics.size())];
        std::string text;
        if (gen.chance(config.name_mentions)) {
          const auto& us = us_names[gen.index(us_names.size())];
          text = fill(kMentionTemplates[gen.index(kMentionTemplates.size())],
                      us.substr(us.find(' ') + 1), topic);
        } else {
          text = fill(kKeywordTemplates[gen.index(kKeywordTemplates.size())], topic);
        }
        auto quote = make_quote(std::move(text), std::move(speaker), year, 0.0);
        quote.sentiment = sentiment_for(cell.quote_center, quote.outlet);
        data.quotes.push_back(std::move(quote));
      }
      const auto off_topic = static_cast<std::size_t>(
          std::llround(config.off_topic * static_cast<double>(cell.n_quotes)));
      for (std::size_t q = 0; q < off_topic; ++q) {
        const auto& pool = speakers_of[c];
        auto quote = make_quote(fill(kOffTopicTemplates[gen.index(kOffTopicTemplates.size())],
                                     kTopics[gen.index(kTopics.size())]),
                                data.speakers[pool[gen.index(pool.size())]].name, year, 0.0);
        quote.sentiment = sentiment_for(0.0, quote.outlet);
        data.quotes.push_back(std::move(quote));
      }

      SurveyRow row{countries[c], year, {}};
      row.counts = config.noise == 0.0
                       ? apportion(config.survey_respondents, cell.survey_probabilities)
                       : gen.multinomial(config.survey_respondents, cell.survey_probabilities);
      data.surveys.push_back(std::move(row));
      data.cells.push_back(std::move(cell));
    }
  }

  // US speakers talk about their own country; the most senior are quoted most.
  for (int yi = 0; yi < n_years; ++yi) {
    for (std::size_t u = 0; u < us_names.size(); ++u) {
      const std::size_t count = 5 * (us_names.size() - u);
      for (std::size_t q = 0; q < count; ++q) {
        auto quote = make_quote(fill(kKeywordTemplates[gen.index(kKeywordTemplates.size())],
                                     kTopics[gen.index(kTopics.size())]),
                                us_names[u], config.first_year + yi, 0.0);
        quote.sentiment = sentiment_for(0.5, quote.outlet);
        data.quotes.push_back(std::move(quote));
      }
    }
  }
  return data;
}

nlohmann::ordered_json truth_json(const SynthData& data) {
  const auto& c = data.config;
  nlohmann::ordered_json doc;
  auto& cfg = doc["config"];
  cfg["seed"] = c.seed;
  cfg["n_countries"] = c.n_countries;
  cfg["first_year"] = c.first_year;
  cfg["last_year"] = c.last_year;
  cfg["quotes_min"] = c.quotes_min;
  cfg["quotes_max"] = c.quotes_max;
  cfg["survey_respondents"] = c.survey_respondents;
  cfg["noise"] = c.noise;
  cfg["persistence"] = c.persistence;
  cfg["year_spread"] = c.year_spread;
  cfg["country_offset"] = c.country_offset;
  cfg["n_outlets"] = c.n_outlets;
  auto& biased = cfg["biased_outlets"] = nlohmann::ordered_json::array();
  for (const auto& b : c.biased_outlets) biased.push_back({{"name", b.name}, {"shift", b.shift}});

  auto& countries = doc["countries"] = nlohmann::ordered_json::array();
  for (const auto& t : data.countries) {
    countries.push_back({{"country", t.country}, {"base", t.base}, {"offset", t.offset}});
  }
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& t : data.cells) {
    double expected = 0.0;
    for (std::size_t i = 0; i < 4; ++i) expected += t.survey_probabilities[i] * kFavorabilityValues[i];
    cells.push_back({{"country", t.country},
                     {"year", t.year},
                     {"favorability", t.favorability},
                     {"quote_center", t.quote_center},
                     {"survey_probabilities", t.survey_probabilities},
                     {"expected_favorability", expected},
                     {"n_quotes", t.n_quotes}});
  }
  return doc;
}

void write_synth(const std::filesystem::path& dir, const SynthData& data,
                 const QuoteSchema& schema) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot write '{}'", (dir / name).string()));
    return out;
  };

  {
    auto out = open("quotes.jsonl");
    for (const auto& q : data.quotes) {
      nlohmann::ordered_json doc;
      doc[schema.id] = q.quote_id;
      doc[schema.text] = q.text;
      doc[schema.speaker] = q.speaker ? nlohmann::ordered_json(*q.speaker) : "None";
      doc[schema.date] = fmt::format("{:04d}-{:02d}-{:02d} 00:00:00", q.year(),
                                     static_cast<unsigned>(q.date.month()),
                                     static_cast<unsigned>(q.date.day()));
      doc[schema.outlet] = nlohmann::ordered_json::array(
          {fmt::format("https://www.{}/{}/{}", q.outlet, q.year(), q.quote_id)});
      doc[schema.sentiment] = *q.sentiment;
      out << doc.dump() << '\n';
    }
  }
  {
    auto out = open("survey.csv");
    write_survey_csv(out, data.surveys);
  }
  {
    auto out = open("speakers.tsv");
    write_speakers(out, data.speakers);
  }
  {
    auto out = open("truth.json");
    out << truth_json(data).dump(1) << '\n';
  }
}

}  // namespace quotesurvey
