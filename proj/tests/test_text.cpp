#include <gtest/gtest.h>

#include "quotesurvey/country.hpp"
#include "quotesurvey/text.hpp"

using namespace quotesurvey;

TEST(Text, TrimAndLower) {
  EXPECT_EQ(text::trim("  a b \t\n"), "a b");
  EXPECT_EQ(text::trim("   "), "");
  EXPECT_EQ(text::to_lower_ascii("U.S. Army"), "u.s. army");
}

TEST(Text, TokenizeSplitsOnPunctuationAndWhitespace) {
  const auto tokens = text::tokenize("Hello, world! It's   fine.");
  const std::vector<std::string> expected{"Hello", "world", "It", "s", "fine"};
  EXPECT_EQ(tokens, expected);
}

TEST(Text, TokenizeKeepsInnerMarksWhenAsked) {
  const auto tokens = text::tokenize("don't re-elect 'quoted' end-", true);
  const std::vector<std::string> expected{"don't", "re-elect", "quoted", "end"};
  EXPECT_EQ(tokens, expected);
}

TEST(Text, TokenizeNormalizesTypographicApostrophe) {
  const auto tokens = text::tokenize("isn’t", true);
  ASSERT_EQ(tokens.size(), 1u);
  EXPECT_EQ(tokens[0], "isn't");
}

TEST(Text, TokenizeHandlesNonAsciiLetters) {
  const auto tokens = text::tokenize("Zürich café");
  const std::vector<std::string> expected{"Zürich", "café"};
  EXPECT_EQ(tokens, expected);
}

TEST(Text, NormalizeNameFoldsCaseWhitespaceAndDiacritics) {
  EXPECT_EQ(text::normalize_name("  Jane   Doe "), "jane doe");
  EXPECT_EQ(text::normalize_name("José Martí"), "jose marti");
  EXPECT_EQ(text::normalize_name("Łukasz Żak"), "lukasz zak");
  EXPECT_EQ(text::normalize_name("ANGELA\tMERKEL"), "angela merkel");
}

TEST(Country, ValidatesAlpha2Codes) {
  EXPECT_TRUE(is_valid_country_code("US"));
  EXPECT_TRUE(is_valid_country_code("FR"));
  EXPECT_TRUE(is_valid_country_code("ZW"));
  EXPECT_FALSE(is_valid_country_code("ZZ"));
  EXPECT_FALSE(is_valid_country_code("us"));
  EXPECT_FALSE(is_valid_country_code("USA"));
  EXPECT_FALSE(is_valid_country_code(""));
}
