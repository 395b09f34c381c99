#include <gtest/gtest.h>

#include <sstream>

#include "quotesurvey/demography.hpp"
#include "quotesurvey/error.hpp"
#include "support.hpp"

using namespace quotesurvey;
using qs_test::quote;

namespace {

SpeakerTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_speakers(in);
}

}  // namespace

TEST(LoadSpeakers, SingleLine) {
  const auto t = parse("Jane Doe\tFR\n");
  ASSERT_EQ(t.speakers.size(), 1u);
  const auto& rec = t.speakers.at("jane doe");
  EXPECT_EQ(rec.nationalities, std::vector<std::string>{"FR"});
  EXPECT_EQ(t.skipped_lines, 0u);
}

TEST(LoadSpeakers, DuplicateNamesMerge) {
  const auto t = parse("Jane Doe\tFR\njane  DOE\tDE\n");
  ASSERT_EQ(t.speakers.size(), 1u);
  EXPECT_EQ(t.speakers.at("jane doe").nationalities, (std::vector<std::string>{"FR", "DE"}));
}

TEST(LoadSpeakers, InvalidCodeSkipsLine) {
  const auto t = parse("X\tZZ\nY\tFR,QQ\nZ\tIT\n");
  EXPECT_EQ(t.skipped_lines, 2u);
  EXPECT_EQ(t.speakers.size(), 1u);
  EXPECT_TRUE(t.speakers.contains("z"));
}

TEST(LoadSpeakers, CapsAtThreeAndDropsDuplicates) {
  const auto t = parse("A B\tFR,DE,FR\nA B\tIT,ES\n");
  const auto& nats = t.speakers.at("a b").nationalities;
  EXPECT_EQ(nats, (std::vector<std::string>{"FR", "DE", "IT"}));
  EXPECT_EQ(t.truncated, 1u);
}

TEST(LoadSpeakers, CommentsBlankAndMalformed) {
  const auto t = parse("# header\n\nno tab here\n\tFR\nOk Name\t FR , DE \n");
  EXPECT_EQ(t.speakers.size(), 1u);
  EXPECT_EQ(t.skipped_lines, 2u);
  EXPECT_EQ(t.speakers.at("ok name").nationalities, (std::vector<std::string>{"FR", "DE"}));
}

TEST(LoadSpeakers, MissingFileIsIoError) {
  EXPECT_THROW(load_speakers("/nonexistent/speakers.tsv"), IoError);
}

TEST(LoadSpeakers, WriteRoundTrip) {
  const std::vector<SpeakerRecord> recs{{"José Martí", {"CU"}}, {"Jane Doe", {"FR", "DE"}}};
  std::ostringstream out;
  write_speakers(out, recs);
  const auto t = parse(out.str());
  EXPECT_EQ(t.speakers.at("jose marti").name, "José Martí");
  EXPECT_EQ(t.speakers.at("jane doe").nationalities, (std::vector<std::string>{"FR", "DE"}));
}

TEST(Attribute, DualNationalityYieldsTwoCopies) {
  const auto t = parse("Jane Doe\tFR,DE\n");
  const std::vector<QuoteRecord> quotes{quote("1", "x", std::string("Jane Doe"), "a", 2019, 0.2)};
  const auto r = attribute(quotes, t.speakers);
  ASSERT_EQ(r.quotes.size(), 2u);
  EXPECT_EQ(r.quotes[0].country, "FR");
  EXPECT_EQ(r.quotes[1].country, "DE");
  EXPECT_EQ(r.quotes[0].year, 2019);
  EXPECT_EQ(r.quotes[1].quote.quote_id, "1");
}

TEST(Attribute, UnknownAndMissingSpeakersDropped) {
  const auto t = parse("Jane Doe\tFR\n");
  const std::vector<QuoteRecord> quotes{quote("1", "x", std::string("John Roe")), quote("2", "x"),
                                        quote("3", "x", std::string("JANE DOE"))};
  const auto r = attribute(quotes, t.speakers);
  ASSERT_EQ(r.quotes.size(), 1u);
  EXPECT_EQ(r.quotes[0].quote.quote_id, "3");
  EXPECT_EQ(r.stats.unmatched_name, 1u);
  EXPECT_EQ(r.stats.unknown_speaker, 1u);
  EXPECT_EQ(r.stats.emitted, 1u);
}

TEST(Attribute, EmptyInput) {
  const auto r = attribute({}, parse("Jane Doe\tFR\n").speakers);
  EXPECT_TRUE(r.quotes.empty());
}

TEST(Attribute, OutputCountIsSumOfNationalities) {
  const auto t = parse("A\tFR\nB\tFR,DE\nC\tFR,DE,IT\n");
  std::vector<QuoteRecord> quotes;
  std::size_t expected = 0;
  for (int i = 0; i < 60; ++i) {
    const std::string who = i % 4 == 3 ? "Nobody" : std::string(1, static_cast<char>('A' + i % 4));
    quotes.push_back(quote(std::to_string(i), "x", who));
    if (i % 4 != 3) expected += static_cast<std::size_t>(i % 4 + 1);
  }
  const auto r = attribute(quotes, t.speakers);
  EXPECT_EQ(r.quotes.size(), expected);
  for (const auto& q : r.quotes) EXPECT_FALSE(q.country.empty());
}

TEST(Attribute, WriteReadRoundTrip) {
  qs_test::TempDir dir;
  const auto t = parse("Jane Doe\tFR,DE\n");
  const std::vector<QuoteRecord> quotes{quote("1", "U.S. news", std::string("Jane Doe"), "a.example", 2019, 0.2)};
  const auto r = attribute(quotes, t.speakers);
  {
    std::ofstream out(dir / "a.jsonl");
    for (const auto& q : r.quotes) write_attributed(out, q, QuoteSchema{});
  }
  const auto back = read_attributed(dir / "a.jsonl", QuoteSchema{});
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].country, "DE");
  EXPECT_EQ(back[1].year, 2019);
  EXPECT_EQ(back[1].quote.sentiment, 0.2);
  dir.write("bad.jsonl", "{\"quoteID\":\"1\"}\n");
  EXPECT_THROW(read_attributed(dir / "bad.jsonl", QuoteSchema{}), FormatError);
}
