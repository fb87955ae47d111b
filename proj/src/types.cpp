#include "xpa/types.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace xpa {

std::string to_string(Leaning l)
{
    switch (l) {
    case Leaning::Left: return "L";
    case Leaning::Center: return "C";
    case Leaning::Right: return "R";
    }
    return "?";
}

std::string to_string(UserClass c)
{
    switch (c) {
    case UserClass::Liberal: return "liberal";
    case UserClass::Neutral: return "neutral";
    case UserClass::Conservative: return "conservative";
    }
    return "?";
}

std::string to_string(TweetType t)
{
    switch (t) {
    case TweetType::Original: return "original";
    case TweetType::Retweet: return "retweet";
    case TweetType::Quote: return "quote";
    case TweetType::Reply: return "reply";
    }
    return "?";
}

namespace {

std::string lower(std::string s)
{
    for (auto& ch : s)
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

} // namespace

Leaning parse_leaning(const std::string& s)
{
    const auto v = lower(s);
    if (v == "l" || v == "left")
        return Leaning::Left;
    if (v == "c" || v == "center" || v == "centre")
        return Leaning::Center;
    if (v == "r" || v == "right")
        return Leaning::Right;
    throw InputError("unknown leaning '" + s + "'");
}

TweetType parse_tweet_type(const std::string& s)
{
    const auto v = lower(s);
    if (v == "original" || v == "tweet")
        return TweetType::Original;
    if (v == "retweet")
        return TweetType::Retweet;
    if (v == "quote")
        return TweetType::Quote;
    if (v == "reply")
        return TweetType::Reply;
    throw InputError("unknown tweet type '" + s + "'");
}

UserStatus parse_user_status(const std::string& s)
{
    const auto v = lower(s);
    if (v == "active")
        return UserStatus::Active;
    if (v == "unavailable" || v == "protected" || v == "suspended" || v == "banned")
        return UserStatus::Unavailable;
    throw InputError("unknown user status '" + s + "'");
}

Timestamp day_start(Timestamp t)
{
    return std::chrono::floor<std::chrono::days>(t);
}

std::int64_t day_index(Timestamp publish, Timestamp t)
{
    const auto d0 = std::chrono::floor<std::chrono::days>(publish);
    const auto d1 = std::chrono::floor<std::chrono::days>(t);
    return (d1 - d0).count();
}

Timestamp parse_timestamp(const std::string& s)
{
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    auto read = [&](std::size_t pos, std::size_t len, int& out) {
        if (pos + len > s.size())
            return false;
        const char* first = s.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    const bool shape = s.size() >= 19 && s[4] == '-' && s[7] == '-' && (s[10] == 'T' || s[10] == ' ')
                       && s[13] == ':' && s[16] == ':';
    if (!shape || !read(0, 4, y) || !read(5, 2, mo) || !read(8, 2, d) || !read(11, 2, h) || !read(14, 2, mi)
        || !read(17, 2, se))
        throw InputError("malformed timestamp '" + s + "'");
    if (s.size() > 19 && !(s.size() == 20 && s[19] == 'Z'))
        throw InputError("malformed timestamp '" + s + "'");
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || se > 60)
        throw InputError("invalid timestamp '" + s + "'");
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
}

std::string format_timestamp(Timestamp t)
{
    using namespace std::chrono;
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{t - dp};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

std::vector<std::string> tokenize(const std::string& text)
{
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        out.push_back(std::move(cur));
    return out;
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace xpa
