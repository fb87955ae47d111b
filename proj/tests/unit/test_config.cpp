#include "builders.hpp"

#include "xpa/config.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

using namespace xpa;

namespace {

Config parse(const std::string& text)
{
    std::istringstream in(text);
    return Config::parse(in, "test.cfg");
}

} // namespace

TEST(Config, ParsesKeysCommentsAndBlanks)
{
    const auto c = parse("# header\nbeta = 0.9\n\n  seed=42   # trailing\nname = two words\n");
    EXPECT_EQ(c.get("name"), "two words");
    EXPECT_DOUBLE_EQ(c.get_double("beta", 0), 0.9);
    EXPECT_EQ(c.get_int("seed", 0), 42);
    EXPECT_EQ(c.get_or("absent", "fallback"), "fallback");
    EXPECT_DOUBLE_EQ(c.get_double("absent", 1.5), 1.5);
}

TEST(Config, MissingKeyNamesIt)
{
    const auto c = parse("a = 1\n");
    try {
        c.get("videos");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("'videos'"), std::string::npos) << e.what();
    }
}

TEST(Config, MalformedAndDuplicateLines)
{
    EXPECT_THROW(parse("just words\n"), ConfigError);
    EXPECT_THROW(parse(" = 3\n"), ConfigError);
    EXPECT_THROW(parse("a = 1\na = 2\n"), ConfigError);
    const auto c = parse("n = abc\nk = 1.5\n");
    EXPECT_THROW(c.get_double("n", 0), ConfigError);
    EXPECT_THROW(c.get_int("k", 0), ConfigError);
}

TEST(Config, ConfigErrorIsInputError)
{
    EXPECT_THROW(parse("oops\n"), InputError);
}

TEST(Config, PathsResolveAgainstConfigDir)
{
    const auto dir = fixture::scratch("cfg_paths");
    fixture::write_file(dir / "sub" / "x.cfg", "videos = data/v.csv\nabs = /tmp/a.csv\n");
    const auto c = Config::load(dir / "sub" / "x.cfg");
    EXPECT_EQ(c.get_path("videos"), dir / "sub" / "data/v.csv");
    EXPECT_EQ(c.get_path("abs"), std::filesystem::path("/tmp/a.csv"));
    EXPECT_FALSE(c.get_optional_path("users").has_value());
    EXPECT_THROW(Config::load(dir / "missing.cfg"), ConfigError);
}

TEST(Config, EnvironmentOverrides)
{
    EXPECT_EQ(Config::env_name("XPA_", "topic.gun-control.keywords"), "XPA_TOPIC_GUN_CONTROL_KEYWORDS");
    auto c = parse("beta = 0.85\n");
    ::setenv("XPATEST_BETA", "0.5", 1);
    ::setenv("XPATEST_SEED", "9", 1);
    c.apply_env("XPATEST_", {"seed", "alpha_disparity"});
    ::unsetenv("XPATEST_BETA");
    ::unsetenv("XPATEST_SEED");
    EXPECT_EQ(c.get("beta"), "0.5");
    EXPECT_EQ(c.get("seed"), "9");
    EXPECT_FALSE(c.has("alpha_disparity"));
}
