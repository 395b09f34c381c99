#include "quotesurvey/demography.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "json.hpp"
#include "quotesurvey/country.hpp"
#include "quotesurvey/error.hpp"
#include "quotesurvey/text.hpp"

namespace quotesurvey {

SpeakerTable parse_speakers(std::istream& in) {
  SpeakerTable table;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto tab = body.find('\t');
    if (tab == std::string_view::npos) {
      ++table.skipped_lines;
      continue;
    }
    const auto name = text::trim(body.substr(0, tab));
    std::vector<std::string> codes;
    bool valid = !name.empty();
    std::string_view rest = body.substr(tab + 1);
    while (valid) {
      const auto comma = rest.find(',');
      const auto code = text::trim(rest.substr(0, comma));
      if (!is_valid_country_code(code)) {
        valid = false;
        break;
      }
      if (std::find(codes.begin(), codes.end(), code) == codes.end()) codes.emplace_back(code);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!valid) {
      ++table.skipped_lines;
      continue;
    }

    auto key = text::normalize_name(name);
    auto [it, inserted] = table.speakers.try_emplace(std::move(key), SpeakerRecord{std::string(name), {}});
    auto& nationalities = it->second.nationalities;
    bool truncated = false;
    for (auto& code : codes) {
      if (std::find(nationalities.begin(), nationalities.end(), code) != nationalities.end()) {
        continue;
      }
      if (nationalities.size() == kMaxNationalities) {
        truncated = true;
        continue;
      }
      nationalities.push_back(std::move(code));
    }
    if (truncated) ++table.truncated;
  }
  return table;
}

SpeakerTable load_speakers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open speaker table '{}'", path.string()));
  return parse_speakers(in);
}

void write_speakers(std::ostream& out, std::span<const SpeakerRecord> speakers) {
  for (const auto& s : speakers) {
    out << s.name << '\t' << fmt::format("{}", fmt::join(s.nationalities, ",")) << '\n';
  }
}

Attribution attribute(std::span<const QuoteRecord> quotes, const SpeakerMap& speakers) {
  Attribution result;
  for (const auto& q : quotes) {
    if (!q.speaker) {
      ++result.stats.unknown_speaker;
      continue;
    }
    const auto it = speakers.find(text::normalize_name(*q.speaker));
    if (it == speakers.end()) {
      ++result.stats.unmatched_name;
      continue;
    }
    for (const auto& country : it->second.nationalities) {
      result.quotes.push_back({q, country, q.year()});
    }
  }
  result.stats.emitted = result.quotes.size();
  return result;
}

void write_attributed(std::ostream& out, const AttributedQuote& quote, const QuoteSchema& schema) {
  std::ostringstream line;
  write_quote(line, quote.quote, schema);
  auto doc = nlohmann::ordered_json::parse(line.str());
  doc["country"] = quote.country;
  doc["year"] = quote.year;
  out << doc.dump() << '\n';
}

std::vector<AttributedQuote> read_attributed(const std::filesystem::path& path,
                                             const QuoteSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open attributed quotes '{}'", path.string()));
  std::vector<AttributedQuote> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto record = parse_quote(line, schema, YearWindow{});
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (!record || !doc.is_object() || !doc.contains("country") || !doc["country"].is_string() ||
        !doc.contains("year") || !doc["year"].is_number_integer()) {
      throw FormatError(fmt::format("{}:{}: not an attributed quote", path.string(), line_no));
    }
    auto country = doc["country"].get<std::string>();
    if (!is_valid_country_code(country)) {
      throw FormatError(fmt::format("{}:{}: invalid country '{}'", path.string(), line_no, country));
    }
    out.push_back({std::move(*record), std::move(country), doc["year"].get<int>()});
  }
  return out;
}

}  // namespace quotesurvey
