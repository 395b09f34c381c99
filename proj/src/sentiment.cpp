#include "quotesurvey/sentiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "quotesurvey/parallel.hpp"
#include "quotesurvey/text.hpp"

namespace quotesurvey {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return in;
}

}  // namespace

Lexicon::Lexicon(std::unordered_map<std::string, double> entries,
                 std::unordered_set<std::string> negators, std::size_t negation_window)
    : negators_(std::move(negators)), negation_window_(negation_window) {
  if (negation_window_ < 1) throw std::invalid_argument("negation window must be at least 1");
  for (auto& [word, weight] : entries) {
    if (!(weight >= -1.0 && weight <= 1.0)) {
      throw std::invalid_argument(fmt::format("polarity of '{}' outside [-1, 1]", word));
    }
    entries_.emplace(text::to_lower_ascii(word), weight);
  }
}

Lexicon Lexicon::load(const std::filesystem::path& lexicon_tsv,
                      const std::filesystem::path& negators, std::size_t negation_window) {
  std::unordered_map<std::string, double> entries;
  auto in = open_or_throw(lexicon_tsv);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError(fmt::format("{}:{}: expected 'word<TAB>weight'", lexicon_tsv.string(),
                                    line_no));
    }
    const auto word = text::trim(body.substr(0, tab));
    const auto weight_text = text::trim(body.substr(tab + 1));
    double weight = 0.0;
    const auto [ptr, ec] =
        std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (word.empty() || ec != std::errc{} || ptr != weight_text.data() + weight_text.size() ||
        weight < -1.0 || weight > 1.0) {
      throw FormatError(fmt::format("{}:{}: bad lexicon entry", lexicon_tsv.string(), line_no));
    }
    entries[text::to_lower_ascii(word)] = weight;
  }

  std::unordered_set<std::string> negator_set;
  if (!negators.empty()) {
    auto neg = open_or_throw(negators);
    while (std::getline(neg, line)) {
      const auto word = text::trim(line);
      if (word.empty() || word.front() == '#') continue;
      negator_set.insert(text::to_lower_ascii(word));
    }
  }
  return Lexicon(std::move(entries), std::move(negator_set), negation_window);
}

Lexicon Lexicon::bundled(std::size_t negation_window) {
  const std::filesystem::path dir = QUOTESURVEY_DATA_DIR;
  return load(dir / "lexicon_en.tsv", dir / "negators_en.txt", negation_window);
}

const double* Lexicon::polarity(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

Lexicon Lexicon::inverted() const {
  auto entries = entries_;
  for (auto& [word, weight] : entries) weight = -weight;
  return Lexicon(std::move(entries), negators_, negation_window_);
}

SentimentScore score_quote(std::string_view quote, const Lexicon& lexicon) {
  const auto tokens = text::tokenize(text::to_lower_ascii(quote), true);
  double sum = 0.0;
  std::size_t matched = 0;
  // Index of the most recent negator token, if any.
  std::optional<std::size_t> last_negator;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lexicon.is_negator(tokens[i])) {
      last_negator = i;
      continue;
    }
    const double* weight = lexicon.polarity(tokens[i]);
    if (!weight) continue;
    const bool negated = last_negator && i - *last_negator <= lexicon.negation_window();
    sum += negated ? -*weight : *weight;
    ++matched;
  }
  if (matched == 0) return {0.0, true};
  const double mean = sum / static_cast<double>(matched);
  return {std::clamp(mean, -1.0, 1.0), false};
}

MissingScoreError::MissingScoreError(std::size_t missing, std::vector<std::string> quote_ids)
    : DataError(fmt::format("{} record(s) have no pre-assigned sentiment score", missing)),
      missing_(missing),
      quote_ids_(std::move(quote_ids)) {}

std::vector<QuoteRecord> score_corpus(std::vector<QuoteRecord> quotes, const Scorer& scorer,
                                      std::size_t jobs) {
  if (scorer.is_passthrough()) {
    std::vector<std::string> missing;
    for (const auto& q : quotes) {
      if (!q.sentiment) missing.push_back(q.quote_id);
    }
    if (!missing.empty()) {
      const auto count = missing.size();
      throw MissingScoreError(count, std::move(missing));
    }
    return quotes;
  }
  const Lexicon& lexicon = *scorer.lexicon_ptr();
  parallel_for(quotes.size(), jobs, [&](std::size_t i) {
    quotes[i].sentiment = score_quote(quotes[i].text, lexicon).value;
  });
  return quotes;
}

}  // namespace quotesurvey
