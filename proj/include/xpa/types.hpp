#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace xpa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using Timestamp = std::chrono::sys_seconds;

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Input could not be parsed or violates a schema/integrity rule.
class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A precondition on argument values does not hold (bad parameter, empty sample).
class DomainError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// Iterative procedure did not converge.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual)
    {
    }
    double residual() const { return residual_; }

private:
    double residual_;
};

// A metric is undefined for an entity (zero reactions, zero views, ...).
// Functions return std::nullopt; this alias documents intent.
using MaybeMetric = std::optional<double>;

enum class Leaning
{
    Left,
    Center,
    Right
};

enum class UserClass
{
    Liberal,
    Neutral,
    Conservative
};

enum class TweetType
{
    Original,
    Retweet,
    Quote,
    Reply
};

enum class UserStatus
{
    Active,
    Unavailable
};

std::string to_string(Leaning l);
std::string to_string(UserClass c);
std::string to_string(TweetType t);
Leaning parse_leaning(const std::string& s);
TweetType parse_tweet_type(const std::string& s);
UserStatus parse_user_status(const std::string& s);

struct VideoRecord
{
    std::string video_id;
    std::string channel_id;
    Timestamp publish_time;
    std::int64_t duration_s = 1;
    std::vector<std::string> title_tokens;
    std::vector<std::string> description_tokens;
    std::int64_t likes = 0;
    std::int64_t dislikes = 0;
    std::optional<Leaning> leaning_label;
};

// Day-indexed attention series, day 0 = publish calendar date (UTC).
struct DailySeries
{
    std::string video_id;
    Vector views;
    Vector watch_minutes;
    Vector tweets;

    Eigen::Index length() const { return views.size(); }
};

struct TweetRecord
{
    std::string tweet_id;
    std::string video_id;
    std::string author_id;
    Timestamp timestamp;
    TweetType type = TweetType::Original;
    std::optional<std::string> parent_id;
    std::vector<std::string> text_tokens;
};

struct UserRecord
{
    std::string user_id;
    std::vector<std::string> follower_ids;     // sorted, unique
    std::vector<std::string> profile_hashtags; // sorted, unique, lowercase
    UserStatus status = UserStatus::Active;
};

// Start of the UTC calendar day containing t.
Timestamp day_start(Timestamp t);

// Calendar-day index of t relative to the publish date (day 0).
std::int64_t day_index(Timestamp publish, Timestamp t);

// Parses "YYYY-MM-DDTHH:MM:SSZ" (also accepts a space separator and no 'Z').
Timestamp parse_timestamp(const std::string& s);
std::string format_timestamp(Timestamp t);

// Lowercases and splits on every non-alphanumeric character.
std::vector<std::string> tokenize(const std::string& text);

// Shortest round-trip decimal representation.
std::string format_double(double v);

} // namespace xpa
