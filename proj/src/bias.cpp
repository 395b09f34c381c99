#include "quotesurvey/bias.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "quotesurvey/error.hpp"
#include "quotesurvey/parallel.hpp"
#include "quotesurvey/stats.hpp"

namespace quotesurvey {

std::vector<OutletStats> outlet_statistics(std::span<const QuoteRecord> quotes,
                                           std::size_t top_n) {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  std::map<std::string, std::vector<double>> by_outlet;
  for (const auto& q : quotes) {
    if (!q.sentiment) {
      throw std::invalid_argument(fmt::format("quote '{}' has no sentiment score", q.quote_id));
    }
    by_outlet[q.outlet].push_back(*q.sentiment);
  }
  if (by_outlet.size() < 2) {
    throw DataError(fmt::format("outlet comparison needs at least 2 outlets, found {}",
                                by_outlet.size()));
  }

  std::vector<OutletStats> all;
  all.reserve(by_outlet.size());
  for (auto& [outlet, scores] : by_outlet) {
    OutletStats s;
    s.outlet = outlet;
    s.n = scores.size();
    s.mean = stats::mean(scores);
    s.variance = stats::sample_variance(scores);
    s.scores = std::move(scores);
    all.push_back(std::move(s));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const OutletStats& a, const OutletStats& b) { return a.n > b.n; });
  if (all.size() > top_n) all.resize(top_n);
  return all;
}

BiasResult detect_and_filter(std::span<const QuoteRecord> quotes, std::size_t top_n,
                             double alpha, std::size_t jobs) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in [0, 1)");
  const auto top = outlet_statistics(quotes, top_n);

  BiasResult result;
  result.report.alpha = alpha;
  result.report.top_n = top_n;
  result.report.tested.resize(top.size());

  parallel_for(top.size(), jobs, [&](std::size_t i) {
    const auto& outlet = top[i];
    std::vector<double> rest;
    rest.reserve(quotes.size() - outlet.n);
    for (const auto& q : quotes) {
      if (q.outlet != outlet.outlet) rest.push_back(*q.sentiment);
    }
    OutletTest test;
    test.outlet = outlet.outlet;
    test.n = outlet.n;
    test.mean = outlet.mean;
    if (outlet.scores.size() < 2 || rest.size() < 2) {
      test.testable = false;
    } else {
      const auto tt = stats::welch_t_test(outlet.scores, rest);
      test.t = tt.t;
      test.p = tt.p;
      test.degenerate = tt.degenerate;
      test.excluded = tt.p < alpha;
    }
    result.report.tested[i] = std::move(test);
  });

  std::unordered_set<std::string> excluded;
  for (const auto& t : result.report.tested) {
    if (t.excluded) excluded.insert(t.outlet);
  }
  for (const auto& q : quotes) {
    if (excluded.contains(q.outlet)) {
      ++result.report.removed_quotes;
    } else {
      result.kept.push_back(q);
    }
  }
  return result;
}

nlohmann::ordered_json to_json(const BiasReport& report) {
  nlohmann::ordered_json doc;
  doc["alpha"] = report.alpha;
  doc["top_n"] = report.top_n;
  doc["removed_quotes"] = report.removed_quotes;
  auto& tested = doc["tested"] = nlohmann::ordered_json::array();
  for (const auto& t : report.tested) {
    nlohmann::ordered_json row;
    row["outlet"] = t.outlet;
    row["n"] = t.n;
    row["mean"] = t.mean;
    // Infinite t (zero-variance separation) is written as null.
    row["t_statistic"] = std::isfinite(t.t) ? nlohmann::ordered_json(t.t) : nullptr;
    row["p_value"] = t.p;
    row["degenerate"] = t.degenerate;
    row["testable"] = t.testable;
    row["excluded"] = t.excluded;
    tested.push_back(std::move(row));
  }
  return doc;
}

void write_bias_csv(std::ostream& out, const BiasReport& report) {
  out << "outlet,mean,n,p,excluded\n";
  for (const auto& t : report.tested) {
    out << fmt::format("{},{},{},{},{}\n", t.outlet, t.mean, t.n, t.p, t.excluded ? 1 : 0);
  }
}

}  // namespace quotesurvey
