#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "quotesurvey/demography.hpp"
#include "quotesurvey/distribution.hpp"

namespace quotesurvey {

/// One row of the ground-truth table: respondent counts or proportions in
/// (VUF, UF, F, VF) order.
struct SurveyRow {
  std::string country;
  int year = 0;
  std::array<double, 4> counts{};
};

/// `country,year,vuf,uf,f,vf` with a header line.
std::vector<SurveyRow> parse_survey_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<SurveyRow> load_survey_csv(const std::filesystem::path& path);
void write_survey_csv(std::ostream& out, std::span<const SurveyRow> rows);

struct Aggregation {
  std::vector<Sample> samples;       // sorted by (country, year)
  std::vector<std::string> warnings;  // survey rows without quotes, etc.
};

/// Builds one histogram per (country, year) from the attributed quotes and
/// joins the survey rows. Cells of `excluded_countries` are left out.
Aggregation aggregate_cells(std::span<const AttributedQuote> quotes,
                            std::span<const SurveyRow> surveys, std::size_t bins,
                            std::span<const std::string> excluded_countries = {});

/// JSON document holding histogram counts and survey probabilities.
void write_samples(std::ostream& out, std::span<const Sample> samples);
std::vector<Sample> read_samples(const std::filesystem::path& path);

/// `country,year,n_quotes,bin,lower,upper,probability` rows.
void write_histogram_csv(std::ostream& out, std::span<const Sample> samples);

}  // namespace quotesurvey
