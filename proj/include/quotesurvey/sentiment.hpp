#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "quotesurvey/corpus.hpp"
#include "quotesurvey/error.hpp"

namespace quotesurvey {

struct SentimentScore {
  double value = 0.0;     // in [-1, 1]
  bool uncovered = false;  // no lexicon word matched
};

/// Word polarities in [-1, 1] plus negators that flip the sign of a
/// polar word within `negation_window` tokens after them.
class Lexicon {
 public:
  Lexicon(std::unordered_map<std::string, double> entries,
          std::unordered_set<std::string> negators, std::size_t negation_window = 2);

  /// `word<TAB>weight` lines and a one-word-per-line negator list; '#'
  /// starts a comment line. An empty negator path means no negators.
  static Lexicon load(const std::filesystem::path& lexicon_tsv,
                      const std::filesystem::path& negators = {},
                      std::size_t negation_window = 2);

  /// The English lexicon shipped in data/.
  static Lexicon bundled(std::size_t negation_window = 2);

  const double* polarity(std::string_view word) const;
  bool is_negator(std::string_view word) const { return negators_.contains(std::string(word)); }
  std::size_t negation_window() const { return negation_window_; }
  std::size_t size() const { return entries_.size(); }

  /// Same lexicon with every weight w replaced by -w.
  Lexicon inverted() const;

 private:
  std::unordered_map<std::string, double> entries_;
  std::unordered_set<std::string> negators_;
  std::size_t negation_window_;
};

/// Mean polarity of the matched words, each sign-flipped when a negator
/// occurs within the negation window before it, clamped to [-1, 1].
/// Tokens are lowercased; inner apostrophes and hyphens are kept.
SentimentScore score_quote(std::string_view text, const Lexicon& lexicon);

/// Raised by score_corpus in pass-through mode when records lack a score.
class MissingScoreError : public DataError {
 public:
  MissingScoreError(std::size_t missing, std::vector<std::string> quote_ids);
  std::size_t missing() const { return missing_; }
  const std::vector<std::string>& quote_ids() const { return quote_ids_; }

 private:
  std::size_t missing_;
  std::vector<std::string> quote_ids_;
};

/// Either scores text with a lexicon or trusts scores already on the records.
class Scorer {
 public:
  static Scorer lexicon(const Lexicon& lexicon) { return Scorer(&lexicon); }
  static Scorer passthrough() { return Scorer(nullptr); }

  bool is_passthrough() const { return lexicon_ == nullptr; }
  const Lexicon* lexicon_ptr() const { return lexicon_; }

 private:
  explicit Scorer(const Lexicon* lexicon) : lexicon_(lexicon) {}
  const Lexicon* lexicon_;
};

/// Returns the records with `sentiment` set. The lexicon scorer overwrites
/// any existing score. Pass-through collects every record without a score
/// and throws MissingScoreError if there is at least one.
std::vector<QuoteRecord> score_corpus(std::vector<QuoteRecord> quotes, const Scorer& scorer,
                                      std::size_t jobs = 1);

}  // namespace quotesurvey
