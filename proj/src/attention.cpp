#include "xpa/attention.hpp"

#include "xpa/ingest.hpp"

#include <vector>

namespace xpa {

MaybeMetric fraction_of_likes(std::int64_t likes, std::int64_t dislikes)
{
    const auto total = likes + dislikes;
    if (likes < 0 || dislikes < 0 || total <= 0)
        return std::nullopt;
    return static_cast<double>(likes) / static_cast<double>(total);
}

namespace {

std::vector<Timestamp> sorted_times(std::span<const TweetRecord> tweets)
{
    std::vector<const TweetRecord*> order;
    for (const auto& t : tweets)
        order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return tweet_order(*a, *b); });
    std::vector<Timestamp> out;
    out.reserve(order.size());
    for (const auto* t : order)
        out.push_back(t->timestamp);
    return out;
}

double minutes_between(Timestamp a, Timestamp b)
{
    return static_cast<double>((b - a).count()) / 60.0;
}

} // namespace

MaybeMetric tweeting_lifetime(std::span<const TweetRecord> tweets)
{
    if (tweets.empty())
        return std::nullopt;
    const auto times = sorted_times(tweets);
    return minutes_between(times.front(), times.back());
}

MaybeMetric inter_arrival(std::span<const TweetRecord> tweets)
{
    if (tweets.size() < 2)
        return std::nullopt;
    const auto times = sorted_times(tweets);
    double gaps = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        gaps += minutes_between(times[i - 1], times[i]);
    return gaps / static_cast<double>(times.size() - 1);
}

TweetTypeCounts count_tweet_types(const VideoRecord& video, std::span<const TweetRecord> tweets,
                                  std::int64_t at_day)
{
    TweetTypeCounts c;
    for (const auto& t : tweets) {
        if (day_index(video.publish_time, t.timestamp) >= at_day)
            continue;
        ++c.total;
        switch (t.type) {
        case TweetType::Original: ++c.original; break;
        case TweetType::Retweet: ++c.retweet; break;
        case TweetType::Quote: ++c.quote; break;
        case TweetType::Reply: ++c.reply; break;
        }
    }
    return c;
}

Vector daily_tweet_counts(const VideoRecord& video, std::span<const TweetRecord> tweets, Eigen::Index days)
{
    Vector s = Vector::Zero(days);
    for (const auto& t : tweets) {
        const auto d = day_index(video.publish_time, t.timestamp);
        if (d >= 0 && d < days)
            s[d] += 1;
    }
    return s;
}

AttentionSummary summarize_attention(const VideoRecord& video, const DailySeries& series,
                                     std::span<const TweetRecord> tweets, Eigen::Index horizon)
{
    AttentionSummary a;
    a.video_id = video.video_id;
    a.view_120 = total_views(series.views, horizon);
    a.tweets = count_tweet_types(video, tweets, horizon);
    a.fraction_of_likes = fraction_of_likes(video.likes, video.dislikes);
    a.viewing_half_life = half_life(series.views, horizon);
    a.tweeting_half_life = half_life(series.tweets, horizon);
    a.tweeting_lifetime_min = tweeting_lifetime(tweets);
    a.inter_arrival_min = inter_arrival(tweets);
    return a;
}

} // namespace xpa
