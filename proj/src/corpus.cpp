#include "quotesurvey/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "quotesurvey/error.hpp"
#include "quotesurvey/parallel.hpp"
#include "quotesurvey/text.hpp"

namespace quotesurvey {

using nlohmann::json;

namespace {

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Accepts "YYYY-MM-DD" optionally followed by a time part.
std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (s.size() > 10 && s[10] != ' ' && s[10] != 'T') return std::nullopt;
  const auto y = parse_int(s.substr(0, 4));
  const auto m = parse_int(s.substr(5, 2));
  const auto d = parse_int(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day date{std::chrono::year{*y},
                                   std::chrono::month{static_cast<unsigned>(*m)},
                                   std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const std::chrono::year_month_day& date) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

std::optional<std::string> outlet_field(const json& value) {
  if (value.is_string()) {
    auto s = value.get<std::string>();
    if (text::trim(s).empty()) return std::nullopt;
    return outlet_from_url(text::trim(s));
  }
  if (value.is_array()) {
    for (const auto& item : value) {
      if (auto outlet = outlet_field(item)) return outlet;
    }
  }
  return std::nullopt;
}

bool find_case_insensitive(std::string_view haystack, std::string_view needle, std::size_t from,
                           std::size_t& found) {
  const auto eq = [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) ==
           std::tolower(static_cast<unsigned char>(b));
  };
  auto it = std::search(haystack.begin() + static_cast<std::ptrdiff_t>(from), haystack.end(),
                        needle.begin(), needle.end(), eq);
  if (it == haystack.end()) return false;
  found = static_cast<std::size_t>(it - haystack.begin());
  return true;
}

std::vector<Keyword> dedupe(std::vector<Keyword> keywords,
                            std::unordered_set<std::string>& seen) {
  std::vector<Keyword> out;
  for (auto& k : keywords) {
    if (text::trim(k.text).empty()) continue;
    if (seen.insert(text::to_lower_ascii(k.text)).second) out.push_back(std::move(k));
  }
  return out;
}

}  // namespace

std::string outlet_from_url(std::string_view url) {
  std::string_view s = text::trim(url);
  if (const auto scheme = s.find("://"); scheme != std::string_view::npos) {
    s.remove_prefix(scheme + 3);
    s = s.substr(0, s.find_first_of("/?#"));
    if (const auto at = s.find('@'); at != std::string_view::npos) s.remove_prefix(at + 1);
    s = s.substr(0, s.find(':'));
  }
  std::string host = text::to_lower_ascii(s);
  if (host.starts_with("www.")) host.erase(0, 4);
  return host;
}

std::optional<QuoteRecord> parse_quote(std::string_view line, const QuoteSchema& schema,
                                       const YearWindow& window) {
  const json doc = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) return std::nullopt;

  QuoteRecord record;
  const auto id = doc.find(schema.id);
  if (id == doc.end()) return std::nullopt;
  if (id->is_string()) {
    record.quote_id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    record.quote_id = id->dump();
  } else {
    return std::nullopt;
  }

  const auto quote_text = doc.find(schema.text);
  if (quote_text == doc.end() || !quote_text->is_string()) return std::nullopt;
  record.text = quote_text->get<std::string>();
  if (text::trim(record.text).empty()) return std::nullopt;

  if (const auto speaker = doc.find(schema.speaker); speaker != doc.end()) {
    if (speaker->is_string()) {
      auto name = std::string(text::trim(speaker->get<std::string>()));
      // Quotebank writes "None" for unattributed quotes.
      if (!name.empty() && name != "None") record.speaker = std::move(name);
    } else if (!speaker->is_null()) {
      return std::nullopt;
    }
  }

  const auto outlet = doc.find(schema.outlet);
  if (outlet == doc.end()) return std::nullopt;
  auto outlet_name = outlet_field(*outlet);
  if (!outlet_name) return std::nullopt;
  record.outlet = std::move(*outlet_name);

  const auto date = doc.find(schema.date);
  if (date == doc.end() || !date->is_string()) return std::nullopt;
  const auto parsed = parse_date(date->get<std::string>());
  if (!parsed) return std::nullopt;
  record.date = *parsed;
  if (record.year() < window.first || record.year() > window.last) return std::nullopt;

  if (const auto sentiment = doc.find(schema.sentiment); sentiment != doc.end()) {
    if (sentiment->is_number()) {
      const double value = sentiment->get<double>();
      if (!(value >= -1.0 && value <= 1.0)) return std::nullopt;
      record.sentiment = value;
    } else if (!sentiment->is_null()) {
      return std::nullopt;
    }
  }
  return record;
}

void write_quote(std::ostream& out, const QuoteRecord& record, const QuoteSchema& schema) {
  nlohmann::ordered_json doc;
  doc[schema.id] = record.quote_id;
  doc[schema.text] = record.text;
  doc[schema.speaker] = record.speaker ? json(*record.speaker) : json(nullptr);
  doc[schema.date] = format_date(record.date);
  doc[schema.outlet] = record.outlet;
  if (record.sentiment) doc[schema.sentiment] = *record.sentiment;
  out << doc.dump() << '\n';
}

QuoteReader::QuoteReader(const std::filesystem::path& path, QuoteSchema schema, YearWindow window)
    : path_(path), in_(path), schema_(std::move(schema)), window_(window) {
  if (!in_) throw IoError(fmt::format("cannot open quote file '{}'", path.string()));
}

std::optional<QuoteRecord> QuoteReader::next() {
  std::string line;
  while (!finished_ && std::getline(in_, line)) {
    if (text::trim(line).empty()) continue;
    ++stats_.lines;
    if (auto record = parse_quote(line, schema_, window_)) {
      ++stats_.records;
      return record;
    }
    ++stats_.malformed;
  }
  if (!finished_) {
    finished_ = true;
    if (in_.bad()) throw IoError(fmt::format("error reading '{}'", path_.string()));
    if (stats_.malformed * 2 > stats_.lines) {
      throw FormatError(fmt::format(
          "{} of {} lines in '{}' are malformed; check the field-name mapping",
          stats_.malformed, stats_.lines, path_.string()));
    }
  }
  return std::nullopt;
}

QuoteStream stream_quotes(const std::filesystem::path& path, const QuoteSchema& schema,
                          const YearWindow& window) {
  QuoteReader reader(path, schema, window);
  QuoteStream result;
  while (auto record = reader.next()) result.records.push_back(std::move(*record));
  result.stats = reader.stats();
  return result;
}

void write_quotes(const std::filesystem::path& path, std::span<const QuoteRecord> records,
                  const QuoteSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  for (const auto& r : records) write_quote(out, r, schema);
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

KeywordSet::KeywordSet(std::vector<Keyword> base, std::vector<Keyword> enriched) {
  std::unordered_set<std::string> seen;
  base_ = dedupe(std::move(base), seen);
  if (base_.empty()) throw std::invalid_argument("base keyword list must not be empty");
  enriched_ = dedupe(std::move(enriched), seen);
}

KeywordSet KeywordSet::united_states() {
  return KeywordSet({{"US", MatchMode::kWholeTokenCaseSensitive},
                     {"U.S.", MatchMode::kWholeTokenCaseSensitive},
                     {"USA", MatchMode::kTokenCaseInsensitive},
                     {"United States", MatchMode::kTokenCaseInsensitive}});
}

bool keyword_matches(const Keyword& keyword, std::string_view text) {
  const std::string_view needle = keyword.text;
  if (needle.empty()) return false;
  std::size_t from = 0;
  while (from + needle.size() <= text.size()) {
    std::size_t found = 0;
    if (keyword.mode == MatchMode::kWholeTokenCaseSensitive) {
      found = text.find(needle, from);
      if (found == std::string_view::npos) return false;
    } else if (!find_case_insensitive(text, needle, from, found)) {
      return false;
    }
    // A keyword ending in punctuation ("U.S.") carries its own right boundary.
    const bool left = text::boundary_before(text, found);
    const bool right = text::boundary_at(text, found + needle.size()) ||
                       !text::is_word_char(static_cast<unsigned char>(needle.back()));
    if (left && right) return true;
    from = found + 1;
  }
  return false;
}

bool KeywordSet::matches(std::string_view text) const {
  const auto hit = [&](const Keyword& k) { return keyword_matches(k, text); };
  return std::any_of(base_.begin(), base_.end(), hit) ||
         std::any_of(enriched_.begin(), enriched_.end(), hit);
}

Enrichment enrich_keywords(std::span<const QuoteRecord> quotes,
                           const std::unordered_set<std::string>& national_speakers,
                           std::size_t top_n, KeywordSet base) {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");

  std::unordered_set<std::string> nationals;
  for (const auto& name : national_speakers) nationals.insert(text::normalize_name(name));

  // normalized name -> (display spelling, count)
  std::map<std::string, SpeakerCount> counts;
  for (const auto& q : quotes) {
    if (!q.speaker) continue;
    auto key = text::normalize_name(*q.speaker);
    if (!nationals.contains(key)) continue;
    auto [it, inserted] = counts.try_emplace(std::move(key), SpeakerCount{*q.speaker, 0});
    ++it->second.quotes;
  }

  std::vector<std::pair<std::string, SpeakerCount>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second.quotes > b.second.quotes;  // map order already breaks ties by name
  });
  if (ranked.size() > top_n) ranked.resize(top_n);

  Enrichment result{std::move(base), {}, ranked.empty()};
  std::vector<Keyword> enriched;
  for (auto& [key, count] : ranked) {
    const auto tokens = text::tokenize(count.name, true);
    enriched.push_back({count.name, MatchMode::kTokenCaseInsensitive});
    if (tokens.size() > 1) enriched.push_back({tokens.back(), MatchMode::kTokenCaseInsensitive});
    result.selected.push_back(std::move(count));
  }
  result.keywords = KeywordSet(result.keywords.base(), std::move(enriched));
  return result;
}

FilterResult filter_quotes(std::span<const QuoteRecord> quotes, const KeywordSet& keywords,
                           std::size_t jobs) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (quotes.size() + kChunk - 1) / kChunk;
  std::vector<char> keep(quotes.size(), 0);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t end = std::min(quotes.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) keep[i] = keywords.matches(quotes[i].text);
  });

  FilterResult result;
  for (std::size_t i = 0; i < quotes.size(); ++i) {
    if (keep[i]) {
      result.kept.push_back(quotes[i]);
    } else {
      ++result.dropped;
    }
  }
  return result;
}

}  // namespace quotesurvey
