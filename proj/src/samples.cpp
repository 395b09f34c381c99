#include "quotesurvey/samples.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "json.hpp"
#include "quotesurvey/country.hpp"
#include "quotesurvey/error.hpp"
#include "quotesurvey/text.hpp"

namespace quotesurvey {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  while (true) {
    const auto comma = line.find(',');
    fields.push_back(text::trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& value) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::vector<SurveyRow> parse_survey_csv(std::istream& in, const std::string& source) {
  std::vector<SurveyRow> rows;
  std::set<std::pair<std::string, int>> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (header) {
      header = false;
      if (fields.size() != 6 || text::to_lower_ascii(fields[0]) != "country") {
        throw FormatError(fmt::format("{}: expected header 'country,year,vuf,uf,f,vf'", source));
      }
      continue;
    }
    const auto fail = [&](std::string_view what) {
      return FormatError(fmt::format("{}:{}: {}", source, line_no, what));
    };
    if (fields.size() != 6) throw fail("expected 6 fields");
    SurveyRow row;
    row.country = std::string(fields[0]);
    if (!is_valid_country_code(row.country)) throw fail("invalid country code");
    if (!parse_number(fields[1], row.year)) throw fail("invalid year");
    for (std::size_t i = 0; i < 4; ++i) {
      if (!parse_number(fields[2 + i], row.counts[i]) || row.counts[i] < 0.0) {
        throw fail("invalid count");
      }
    }
    if (!seen.emplace(row.country, row.year).second) throw fail("duplicate (country, year)");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SurveyRow> load_survey_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open survey table '{}'", path.string()));
  return parse_survey_csv(in, path.string());
}

void write_survey_csv(std::ostream& out, std::span<const SurveyRow> rows) {
  out << "country,year,vuf,uf,f,vf\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.country, r.year, r.counts[0], r.counts[1],
                       r.counts[2], r.counts[3]);
  }
}

Aggregation aggregate_cells(std::span<const AttributedQuote> quotes,
                            std::span<const SurveyRow> surveys, std::size_t bins,
                            std::span<const std::string> excluded_countries) {
  const auto excluded = [&](const std::string& country) {
    return std::find(excluded_countries.begin(), excluded_countries.end(), country) !=
           excluded_countries.end();
  };

  std::map<std::pair<std::string, int>, std::vector<double>> scores;
  for (const auto& q : quotes) {
    if (excluded(q.country)) continue;
    if (!q.quote.sentiment) {
      throw std::invalid_argument(fmt::format("quote '{}' has no sentiment", q.quote.quote_id));
    }
    scores[{q.country, q.year}].push_back(*q.quote.sentiment);
  }

  std::map<std::pair<std::string, int>, const SurveyRow*> by_cell;
  for (const auto& row : surveys) by_cell[{row.country, row.year}] = &row;

  Aggregation result;
  for (auto& [cell, values] : scores) {
    Sample sample{cell.first, cell.second, SentimentHistogram::from_scores(values, bins), {}};
    if (const auto it = by_cell.find(cell); it != by_cell.end()) {
      sample.survey = encode_survey(it->second->counts);
    }
    result.samples.push_back(std::move(sample));
  }
  for (const auto& [cell, row] : by_cell) {
    if (excluded(cell.first)) continue;
    if (!scores.contains(cell)) {
      result.warnings.push_back(
          fmt::format("survey cell {}/{} has no quotes and is dropped", cell.first, cell.second));
    }
  }
  return result;
}

void write_samples(std::ostream& out, std::span<const Sample> samples) {
  nlohmann::ordered_json doc;
  doc["bins"] = samples.empty() ? 0 : samples.front().histogram.bin_count();
  auto& cells = doc["cells"] = nlohmann::ordered_json::array();
  for (const auto& s : samples) {
    nlohmann::ordered_json cell;
    cell["country"] = s.country;
    cell["year"] = s.year;
    cell["n_quotes"] = s.n_quotes();
    cell["counts"] = s.histogram.counts();
    if (s.survey) {
      cell["survey"] = s.survey->probabilities();
    } else {
      cell["survey"] = nullptr;
    }
    cells.push_back(std::move(cell));
  }
  out << doc.dump(1) << '\n';
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open samples file '{}'", path.string()));
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  const auto fail = [&](std::string_view what) {
    return FormatError(fmt::format("{}: {}", path.string(), what));
  };
  if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array()) {
    throw fail("not a samples document");
  }
  std::vector<Sample> samples;
  try {
    for (const auto& cell : doc["cells"]) {
      Sample s{cell.at("country").get<std::string>(), cell.at("year").get<int>(),
               SentimentHistogram::from_counts(cell.at("counts").get<std::vector<std::size_t>>()),
               {}};
      if (!cell.at("survey").is_null()) {
        s.survey = SurveyDistribution::from_probabilities(
            cell.at("survey").get<std::array<double, 4>>());
      }
      samples.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  return samples;
}

void write_histogram_csv(std::ostream& out, std::span<const Sample> samples) {
  out << "country,year,n_quotes,bin,lower,upper,probability\n";
  for (const auto& s : samples) {
    const auto bins = s.histogram.bin_count();
    const double width = 2.0 / static_cast<double>(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      out << fmt::format("{},{},{},{},{},{},{}\n", s.country, s.year, s.n_quotes(), b,
                         -1.0 + width * static_cast<double>(b),
                         -1.0 + width * static_cast<double>(b + 1),
                         s.histogram.probabilities()[b]);
    }
  }
}

}  // namespace quotesurvey
