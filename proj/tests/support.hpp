#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quotesurvey/corpus.hpp"
#include "quotesurvey/distribution.hpp"

namespace qs_test {

namespace fs = std::filesystem;

inline quotesurvey::QuoteRecord quote(std::string id, std::string text,
                                      std::optional<std::string> speaker = std::nullopt,
                                      std::string outlet = "a.example", int year = 2020,
                                      std::optional<double> sentiment = std::nullopt) {
  quotesurvey::QuoteRecord q;
  q.quote_id = std::move(id);
  q.text = std::move(text);
  q.speaker = std::move(speaker);
  q.outlet = std::move(outlet);
  q.date = std::chrono::year{year} / std::chrono::month{6} / std::chrono::day{15};
  q.sentiment = sentiment;
  return q;
}

inline quotesurvey::Sample sample(std::string country, int year, std::vector<std::size_t> counts,
                                  std::optional<std::array<double, 4>> survey = std::nullopt) {
  quotesurvey::Sample s{std::move(country), year,
                        quotesurvey::SentimentHistogram::from_counts(std::move(counts)), std::nullopt};
  if (survey) s.survey = quotesurvey::encode_survey(*survey);
  return s;
}

/// Random point on the probability simplex with `n` entries, some possibly zero.
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n, double zero_rate = 0.0) {
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = u(rng) < zero_rate ? 0.0 : expo(rng);
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    return p;
  }
  for (auto& v : p) v /= total;
  return p;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("quotesurvey-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream out(path_ / name, std::ios::binary);
    out << content;
    return path_ / name;
  }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qs_test
