#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace quotesurvey {

/// One attributed quotation.
struct QuoteRecord {
  std::string quote_id;
  std::string text;
  std::optional<std::string> speaker;
  std::string outlet;
  std::chrono::year_month_day date;
  std::optional<double> sentiment;

  int year() const { return static_cast<int>(date.year()); }
};

/// JSON field names of a quote object. `outlet` may hold a URL, a list of
/// URLs (the first one is used) or a bare outlet name.
struct QuoteSchema {
  std::string id = "quoteID";
  std::string text = "quotation";
  std::string speaker = "speaker";
  std::string date = "date";
  std::string outlet = "urls";
  std::string sentiment = "sentiment";
};

/// Inclusive range of admissible quote years.
struct YearWindow {
  int first = 1900;
  int last = 2100;
};

/// Parses one JSONL line. Returns nullopt for anything that is not a valid
/// QuoteRecord: bad JSON, missing fields, blank text, unparsable date, a
/// year outside `window`, or a sentiment outside [-1, 1].
std::optional<QuoteRecord> parse_quote(std::string_view line, const QuoteSchema& schema,
                                       const YearWindow& window);

/// Host part of a URL without a leading "www."; non-URLs are returned as is.
std::string outlet_from_url(std::string_view url);

/// Writes `record` as one JSON line using the schema's field names.
void write_quote(std::ostream& out, const QuoteRecord& record, const QuoteSchema& schema);

struct ReadStats {
  std::size_t lines = 0;  // non-blank lines seen
  std::size_t records = 0;
  std::size_t malformed = 0;
};

/// Streams QuoteRecords from a JSONL file in file order. Blank lines are
/// ignored; malformed lines are counted and skipped. When the end of the
/// file is reached with more than half of the lines malformed, next()
/// throws FormatError since that almost always means a schema mismatch.
class QuoteReader {
 public:
  QuoteReader(const std::filesystem::path& path, QuoteSchema schema, YearWindow window = {});

  std::optional<QuoteRecord> next();
  const ReadStats& stats() const { return stats_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  QuoteSchema schema_;
  YearWindow window_;
  ReadStats stats_;
  bool finished_ = false;
};

struct QuoteStream {
  std::vector<QuoteRecord> records;
  ReadStats stats;
};

/// Reads a whole JSONL file.
QuoteStream stream_quotes(const std::filesystem::path& path, const QuoteSchema& schema = {},
                          const YearWindow& window = {});

void write_quotes(const std::filesystem::path& path, std::span<const QuoteRecord> records,
                  const QuoteSchema& schema);

enum class MatchMode {
  kWholeTokenCaseSensitive,
  kTokenCaseInsensitive,  // substring on token boundaries, ASCII case-folded
};

struct Keyword {
  std::string text;
  MatchMode mode = MatchMode::kTokenCaseInsensitive;
};

/// Base plus speaker-derived keywords. Keywords are deduplicated on their
/// case-folded text (first occurrence wins, base before enriched).
class KeywordSet {
 public:
  KeywordSet(std::vector<Keyword> base, std::vector<Keyword> enriched = {});

  /// "US" and "U.S." whole-token case-sensitive; "USA" and
  /// "United States" case-insensitive.
  static KeywordSet united_states();

  const std::vector<Keyword>& base() const { return base_; }
  const std::vector<Keyword>& enriched() const { return enriched_; }

  bool matches(std::string_view text) const;

 private:
  std::vector<Keyword> base_;
  std::vector<Keyword> enriched_;
};

/// True if `keyword` occurs in `text` with token boundaries on both sides.
bool keyword_matches(const Keyword& keyword, std::string_view text);

struct SpeakerCount {
  std::string name;
  std::size_t quotes = 0;
};

struct Enrichment {
  KeywordSet keywords;
  std::vector<SpeakerCount> selected;  // in rank order
  bool no_speaker_overlap = false;
};

/// Adds the full and last names of the `top_n` most quoted speakers found in
/// `national_speakers` (matched on normalized names). Ties in quote count go
/// to the lexicographically smaller name.
Enrichment enrich_keywords(std::span<const QuoteRecord> quotes,
                           const std::unordered_set<std::string>& national_speakers,
                           std::size_t top_n, KeywordSet base = KeywordSet::united_states());

struct FilterResult {
  std::vector<QuoteRecord> kept;
  std::size_t dropped = 0;
};

/// Keeps quotes whose text matches at least one keyword, preserving order.
/// Chunks are matched on `jobs` threads and merged by input index.
FilterResult filter_quotes(std::span<const QuoteRecord> quotes, const KeywordSet& keywords,
                           std::size_t jobs = 1);

}  // namespace quotesurvey
