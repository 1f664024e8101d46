#include <gtest/gtest.h>

#include "lv/config.hpp"

TEST(Config, ParsesSectionKeysAndComments) {
  const auto c = lv::ConfigFile::parse(
      "# experiment\n"
      "descriptor.name = hog   # trailing comment\n"
      "\n"
      "descriptor.cell=8\r\n"
      "   \t\n"
      "seed=42\n");
  ASSERT_EQ(c.entries.size(), 3u);
  EXPECT_EQ(*c.get("descriptor.name"), "hog");
  EXPECT_EQ(*c.get("descriptor.cell"), "8");
  EXPECT_EQ(*c.get("seed"), "42");
  EXPECT_EQ(c.get("classifier.name"), nullptr);
}

TEST(Config, LaterLinesWin) {
  const auto c = lv::ConfigFile::parse("seed=1\nprotocol.k=5\nseed=2\n");
  ASSERT_EQ(c.entries.size(), 2u);
  EXPECT_EQ(*c.get("seed"), "2");
  EXPECT_EQ(c.entries[0].first, "seed");
}

TEST(Config, EmptyValueIsKept) {
  const auto c = lv::ConfigFile::parse("output.dir=\n");
  ASSERT_NE(c.get("output.dir"), nullptr);
  EXPECT_TRUE(c.get("output.dir")->empty());
}

TEST(Config, MalformedLinesName) {
  for (const char* bad : {"seed\n", "=5\n", "seed=1\njust words\n"}) {
    try {
      lv::ConfigFile::parse(bad);
      ADD_FAILURE() << bad;
    } catch (const lv::Error& e) {
      EXPECT_EQ(e.code(), lv::Errc::InvalidParams) << bad;
    }
  }
  try {
    lv::ConfigFile::parse("a=1\n\nbroken\n");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Config, TokensFollowTheKeyTable) {
  const auto c = lv::ConfigFile::parse("classifier.name=fine-knn\nann.hidden=50\nseed=3\n");
  const auto all = lv::config_tokens(c, [](std::string_view) { return true; });
  EXPECT_EQ(all, (std::vector<std::string>{"--classifier", "fine-knn", "--g", "50", "--seed", "3"}));
  const auto some = lv::config_tokens(c, [](std::string_view f) { return f != "--g"; });
  EXPECT_EQ(some, (std::vector<std::string>{"--classifier", "fine-knn", "--seed", "3"}));
  EXPECT_EQ(lv::config_flag("ann.split"), "--split");
  EXPECT_TRUE(lv::config_flag("nope").empty());
}

TEST(Config, UnknownKeyIsRejected) {
  const auto c = lv::ConfigFile::parse("descriptor.nmae=hog\n");
  try {
    lv::config_tokens(c, [](std::string_view) { return true; });
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::UnknownName);
  }
}

TEST(Config, MissingFile) {
  try {
    lv::ConfigFile::load("/nonexistent/lv.conf");
    FAIL();
  } catch (const lv::Error& e) {
    EXPECT_EQ(e.code(), lv::Errc::NotFound);
  }
}
