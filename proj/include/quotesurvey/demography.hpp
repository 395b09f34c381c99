#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "quotesurvey/corpus.hpp"

namespace quotesurvey {

inline constexpr std::size_t kMaxNationalities = 3;

struct SpeakerRecord {
  std::string name;                        // as first spelled in the table
  std::vector<std::string> nationalities;  // 1..3 ISO 3166-1 alpha-2 codes
};

/// Keyed by text::normalize_name(name).
using SpeakerMap = std::map<std::string, SpeakerRecord>;

struct SpeakerTable {
  SpeakerMap speakers;
  std::size_t skipped_lines = 0;  // malformed rows or invalid country codes
  std::size_t truncated = 0;      // speakers whose merged list exceeded the cap
};

/// Parses `name<TAB>code[,code...]` rows. Repeated names merge their
/// nationality lists (order of first appearance, capped at three).
SpeakerTable parse_speakers(std::istream& in);
SpeakerTable load_speakers(const std::filesystem::path& path);

void write_speakers(std::ostream& out, std::span<const SpeakerRecord> speakers);

struct AttributedQuote {
  QuoteRecord quote;
  std::string country;
  int year = 0;
};

struct AttributionStats {
  std::size_t unknown_speaker = 0;  // quote carries no speaker
  std::size_t unmatched_name = 0;   // speaker not in the table
  std::size_t emitted = 0;
};

struct Attribution {
  std::vector<AttributedQuote> quotes;
  AttributionStats stats;
};

/// One copy of each quote per nationality of its speaker; quotes whose
/// speaker is missing or unknown are dropped.
Attribution attribute(std::span<const QuoteRecord> quotes, const SpeakerMap& speakers);

/// A quote line with two extra fields, "country" and "year".
void write_attributed(std::ostream& out, const AttributedQuote& quote, const QuoteSchema& schema);
std::vector<AttributedQuote> read_attributed(const std::filesystem::path& path,
                                             const QuoteSchema& schema);

}  // namespace quotesurvey
