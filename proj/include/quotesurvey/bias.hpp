#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "quotesurvey/corpus.hpp"

namespace quotesurvey {

struct OutletStats {
  std::string outlet;
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::vector<double> scores;
};

/// Statistics of the `top_n` outlets by quote count (ties by name).
/// Every quote must be scored. Throws DataError with fewer than two outlets.
std::vector<OutletStats> outlet_statistics(std::span<const QuoteRecord> quotes, std::size_t top_n);

struct OutletTest {
  std::string outlet;
  std::size_t n = 0;
  double mean = 0.0;
  double t = 0.0;
  double p = 1.0;
  bool degenerate = false;
  bool testable = true;  // false when either side has fewer than two scores
  bool excluded = false;
};

struct BiasReport {
  std::vector<OutletTest> tested;  // in outlet-count order
  double alpha = 0.05;
  std::size_t top_n = 30;
  std::size_t removed_quotes = 0;
};

struct BiasResult {
  std::vector<QuoteRecord> kept;
  BiasReport report;
};

/// Tests each of the `top_n` most common outlets against all other quotes
/// pooled (Welch t-test) and removes every quote of outlets with p < alpha.
/// No multiple-comparison correction is applied.
BiasResult detect_and_filter(std::span<const QuoteRecord> quotes, std::size_t top_n = 30,
                             double alpha = 0.05, std::size_t jobs = 1);

nlohmann::ordered_json to_json(const BiasReport& report);
/// `outlet,mean,n,p,excluded` rows.
void write_bias_csv(std::ostream& out, const BiasReport& report);

}  // namespace quotesurvey
