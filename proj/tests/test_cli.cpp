#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "json.hpp"
#include "quotesurvey/cli.hpp"
#include "support.hpp"

using namespace quotesurvey;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv(kConfigEnvVar);
    syn_ = (dir_ / "syn").string();
    ASSERT_EQ(run({"synth", "-o", syn_, "--seed", "3", "--countries", "5", "--first-year", "2015",
                   "--last-year", "2018", "--quotes-per-cell", "150:400", "--speakers-per-country", "6"})
                  .code,
              0);
  }

  std::vector<std::string> pipeline_inputs() const {
    return {"--quotes", syn_ + "/quotes.jsonl", "--speakers", syn_ + "/speakers.tsv",
            "--survey", syn_ + "/survey.csv", "--scorer", "passthrough"};
  }

  qs_test::TempDir dir_;
  std::string syn_;
};

}  // namespace

TEST_F(CliTest, StagedRunProducesReports) {
  const std::string w = (dir_ / "w").string();
  EXPECT_EQ(run({"filter", "-q", syn_ + "/quotes.jsonl", "--speakers", syn_ + "/speakers.tsv", "-o", w}).code, 0);
  EXPECT_EQ(run({"score", "-o", w, "--scorer", "passthrough"}).code, 0);
  EXPECT_EQ(run({"bias", "-o", w}).code, 0);
  EXPECT_EQ(run({"attribute", "-o", w, "--speakers", syn_ + "/speakers.tsv"}).code, 0);
  EXPECT_EQ(run({"aggregate", "-o", w, "--survey", syn_ + "/survey.csv"}).code, 0);
  const auto loco = run({"eval-loco", "-o", w});
  EXPECT_EQ(loco.code, 0) << loco.err;
  EXPECT_NE(loco.out.find("LOCO:"), std::string::npos);
  for (const char* f : {"loco_report.json", "loco_cells.csv", "loco_distributions.csv", "loco_loss_vs_quotes.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "w" / f)) << f;
  }
  EXPECT_EQ(run({"eval-scv", "-o", w}).code, 0);
  EXPECT_EQ(run({"correlate", "-o", w, "--report", w + "/scv_report.json"}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "w" / "scv_correlation.json"));
}

TEST_F(CliTest, PipelineMatchesStagedRun) {
  const std::string w = (dir_ / "staged").string();
  ASSERT_EQ(run({"filter", "-q", syn_ + "/quotes.jsonl", "--speakers", syn_ + "/speakers.tsv", "-o", w}).code, 0);
  ASSERT_EQ(run({"score", "-o", w, "--scorer", "passthrough"}).code, 0);
  ASSERT_EQ(run({"bias", "-o", w}).code, 0);
  ASSERT_EQ(run({"attribute", "-o", w, "--speakers", syn_ + "/speakers.tsv"}).code, 0);
  ASSERT_EQ(run({"aggregate", "-o", w, "--survey", syn_ + "/survey.csv"}).code, 0);
  ASSERT_EQ(run({"eval-loco", "-o", w}).code, 0);

  auto args = pipeline_inputs();
  args.insert(args.begin(), "pipeline");
  args.insert(args.end(), {"-o", (dir_ / "single").string(), "--jobs", "4"});
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_ / "staged")) {
    const auto name = entry.path().filename().string();
    EXPECT_EQ(qs_test::slurp(entry.path()), qs_test::slurp(dir_ / "single" / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 15u);
}

TEST_F(CliTest, MissingInputIsDataError) {
  const auto missing = (dir_ / "nope.jsonl").string();
  const auto r = run({"filter", "-q", missing, "-o", (dir_ / "w").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(missing), std::string::npos);
  const auto s = run({"eval-loco", "-o", (dir_ / "empty").string()});
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.err.find("samples.json"), std::string::npos);
}

TEST_F(CliTest, SynthIsDeterministic) {
  const auto a = (dir_ / "a").string(), b = (dir_ / "b").string();
  ASSERT_EQ(run({"synth", "--seed", "7", "--countries", "4", "--quotes-per-cell", "100", "-o", a}).code, 0);
  ASSERT_EQ(run({"synth", "--seed", "7", "--countries", "4", "--quotes-per-cell", "100", "-o", b}).code, 0);
  for (const char* f : {"quotes.jsonl", "survey.csv", "speakers.tsv", "truth.json"}) {
    EXPECT_EQ(qs_test::slurp(dir_ / "a" / f), qs_test::slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, UsageErrors) {
  const auto unknown = run({"eval-loco", "--bogus"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("--k-max"), std::string::npos);  // help text follows the error
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"bias", "--alpha", "2"}).code, 1);
  EXPECT_EQ(run({"synth", "--quotes-per-cell", "abc", "-o", (dir_ / "x").string()}).code, 1);
  EXPECT_EQ(run({"synth", "--biased-outlet", "noshift", "-o", (dir_ / "x").string()}).code, 1);
}

TEST_F(CliTest, HelpPerSubcommand) {
  const auto r = run({"predict", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--country"), std::string::npos);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, PassthroughWithoutScoresIsDataError) {
  const auto q = dir_.write("q.jsonl",
                            "{\"quoteID\":\"1\",\"quotation\":\"The US said\",\"speaker\":\"A\","
                            "\"date\":\"2020-01-01\",\"urls\":[\"http://a.com/x\"]}\n");
  const std::string w = (dir_ / "w").string();
  ASSERT_EQ(run({"filter", "-q", q.string(), "-o", w}).code, 0);
  const auto r = run({"score", "-o", w, "--scorer", "passthrough"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"score", "-o", w}).code, 0);  // bundled lexicon
}

TEST_F(CliTest, ConfigPrecedence) {
  const std::string w = (dir_ / "w").string();
  ASSERT_EQ(run({"pipeline", "--quotes", syn_ + "/quotes.jsonl", "--speakers", syn_ + "/speakers.tsv",
                 "--survey", syn_ + "/survey.csv", "--scorer", "passthrough", "-o", w})
                .code,
            0);
  const auto cfg = dir_.write("c.toml",
                              "out-dir = \"" + (dir_ / "cfg").string() +
                                  "\"\nk-max = 4\n\n[eval-loco]\nk-max = 2\ninput = \"" + w +
                                  "/samples.json\"\n");
  ASSERT_EQ(run({"eval-loco", "--config", cfg.string()}).code, 0);
  auto report = nlohmann::json::parse(qs_test::slurp(dir_ / "cfg" / "loco_report.json"));
  EXPECT_EQ(report["config"]["k_range"].size(), 2u);  // section beats top level

  ASSERT_EQ(run({"eval-loco", "--config", cfg.string(), "--k-max", "3"}).code, 0);
  report = nlohmann::json::parse(qs_test::slurp(dir_ / "cfg" / "loco_report.json"));
  EXPECT_EQ(report["config"]["k_range"].size(), 3u);  // command line beats config

  setenv(kConfigEnvVar, cfg.string().c_str(), 1);
  ASSERT_EQ(run({"eval-loco", "--k-max", "1"}).code, 0);
  unsetenv(kConfigEnvVar);
  report = nlohmann::json::parse(qs_test::slurp(dir_ / "cfg" / "loco_report.json"));
  EXPECT_EQ(report["config"]["k_range"].size(), 1u);

  EXPECT_EQ(run({"eval-loco", "--config", (dir_ / "missing.toml").string()}).code, 2);
  const auto bad = dir_.write("bad.toml", "[eval-loco]\nnot-an-option = 1\n");
  EXPECT_EQ(run({"eval-loco", "--config", bad.string()}).code, 1);
}

TEST_F(CliTest, PredictUnsurveyedCountry) {
  const std::string w = (dir_ / "w").string();
  // Drop one country's surveys so its cells become prediction targets.
  std::istringstream survey(qs_test::slurp(syn_ + "/survey.csv"));
  std::string kept, line;
  std::getline(survey, line);
  kept = line + "\n";
  std::string dropped_country;
  while (std::getline(survey, line)) {
    if (dropped_country.empty()) dropped_country = line.substr(0, 2);
    if (line.substr(0, 2) != dropped_country) kept += line + "\n";
  }
  const auto partial = dir_.write("partial.csv", kept);
  auto args = pipeline_inputs();
  args[5] = partial.string();
  args.insert(args.begin(), "pipeline");
  args.insert(args.end(), {"-o", w});
  ASSERT_EQ(run(args).code, 0);
  const auto r = run({"predict", "-o", w, "--country", dropped_country});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(qs_test::slurp(dir_ / "w" / "predictions.json"));
  EXPECT_EQ(doc["predictions"].size(), 4u);
  EXPECT_TRUE(doc["predictions"][0].contains("modal"));
  EXPECT_EQ(run({"predict", "-o", w, "--country", "ZW"}).code, 2);
}
