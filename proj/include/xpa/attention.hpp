#pragma once

#include "xpa/types.hpp"

#include <algorithm>
#include <optional>
#include <span>

namespace xpa {

inline constexpr Eigen::Index kHorizonDays = 120;

// Sum of the first min(at_day, T) entries.
template <typename Derived>
double total_views(const Eigen::MatrixBase<Derived>& views, Eigen::Index at_day = kHorizonDays)
{
    if (at_day < 1)
        throw DomainError("total_views: at_day must be >= 1");
    return views.head(std::min(at_day, views.size())).sum();
}

// Smallest t with cumsum[t] >= half of the horizon total; nullopt if that total is 0.
template <typename Derived>
std::optional<Eigen::Index> half_life(const Eigen::MatrixBase<Derived>& values,
                                      Eigen::Index horizon = kHorizonDays)
{
    const auto n = std::min(horizon, values.size());
    const double total = values.head(n).sum();
    if (!(total > 0))
        return std::nullopt;
    double cum = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        cum += values(t);
        if (2 * cum >= total)
            return t;
    }
    return n - 1;
}

// cumsum[day] / cumsum[horizon-1], clamped to [0, 1].
template <typename Derived>
MaybeMetric accumulation_fraction(const Eigen::MatrixBase<Derived>& values, Eigen::Index day,
                                  Eigen::Index horizon = kHorizonDays)
{
    const auto n = std::min(horizon, values.size());
    const double total = values.head(n).sum();
    if (!(total > 0) || day < 0)
        return std::nullopt;
    const double upto = values.head(std::min(day + 1, n)).sum();
    return std::clamp(upto / total, 0.0, 1.0);
}

MaybeMetric fraction_of_likes(std::int64_t likes, std::int64_t dislikes);

// Minutes between first and last tweet.
MaybeMetric tweeting_lifetime(std::span<const TweetRecord> tweets);

// Mean gap in minutes between consecutive (time-sorted) tweets.
MaybeMetric inter_arrival(std::span<const TweetRecord> tweets);

struct TweetTypeCounts
{
    std::size_t total = 0;
    std::size_t original = 0;
    std::size_t retweet = 0;
    std::size_t quote = 0;
    std::size_t reply = 0;
};

// Tweets with calendar-day index < at_day.
TweetTypeCounts count_tweet_types(const VideoRecord& video, std::span<const TweetRecord> tweets,
                                  std::int64_t at_day = kHorizonDays);

// Tweets bucketed by calendar day since publish, length `days`.
Vector daily_tweet_counts(const VideoRecord& video, std::span<const TweetRecord> tweets, Eigen::Index days);

struct AttentionSummary
{
    std::string video_id;
    double view_120 = 0;
    TweetTypeCounts tweets;
    MaybeMetric fraction_of_likes;
    std::optional<Eigen::Index> viewing_half_life;
    std::optional<Eigen::Index> tweeting_half_life;
    MaybeMetric tweeting_lifetime_min;
    MaybeMetric inter_arrival_min;
};

AttentionSummary summarize_attention(const VideoRecord& video, const DailySeries& series,
                                     std::span<const TweetRecord> tweets, Eigen::Index horizon = kHorizonDays);

} // namespace xpa
