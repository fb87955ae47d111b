#include "builders.hpp"

#include "xpa/ingest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace xpa;
using fixture::at;
using fixture::tweet;

namespace {

struct Files
{
    std::filesystem::path dir;
    CorpusPaths paths;
};

Files write_corpus(const std::string& name, const std::string& videos, const std::string& series,
                   const std::string& tweets, const std::string& users = "")
{
    Files f;
    f.dir = fixture::scratch(name);
    f.paths.videos = f.dir / "videos.csv";
    f.paths.series = f.dir / "series.csv";
    f.paths.tweets = f.dir / "tweets.jsonl";
    fixture::write_file(f.paths.videos,
                        "video_id,channel_id,publish_time,duration_s,likes,dislikes,title,description\n" + videos);
    fixture::write_file(f.paths.series, "video_id,day,view_count,watch_time_min,tweet_count\n" + series);
    fixture::write_file(f.paths.tweets, tweets);
    if (!users.empty()) {
        f.paths.users = f.dir / "users.jsonl";
        fixture::write_file(f.paths.users, users);
    }
    return f;
}

const std::string kOneVideo = "v1,c1,2018-01-01T00:00:00Z,100,5,1,\"Gun control, tonight\",desc\n";
const std::string kOneSeries = "v1,0,10,5,1\nv1,1,20,5,0\n";

std::string tweet_line(const std::string& id, const std::string& video, const std::string& ts,
                       const std::string& type = "original", const std::string& parent = "")
{
    return "{\"tweet_id\":\"" + id + "\",\"video_id\":\"" + video + "\",\"author_id\":\"a" + id +
           "\",\"timestamp\":\"" + ts + "\",\"type\":\"" + type + "\",\"parent_id\":" +
           (parent.empty() ? "null" : "\"" + parent + "\"") + ",\"text\":\"hello\"}\n";
}

} // namespace

TEST(LoadCorpus, EmptyTweetFileGivesNoTweets)
{
    auto f = write_corpus("empty_tweets", kOneVideo, kOneSeries, "");
    const auto c = load_corpus(f.paths);
    EXPECT_EQ(c.videos().size(), 1u);
    EXPECT_EQ(c.tweet_count(), 0u);
}

TEST(LoadCorpus, OneVideoOneTweet)
{
    auto f = write_corpus("one_one", kOneVideo, kOneSeries, tweet_line("t1", "v1", "2018-01-01T05:00:00Z"));
    const auto c = load_corpus(f.paths);
    EXPECT_EQ(c.videos().size(), 1u);
    EXPECT_EQ(c.tweet_count(), 1u);
    ASSERT_NE(c.series("v1"), nullptr);
    EXPECT_EQ(c.series("v1")->length(), 2);
    EXPECT_DOUBLE_EQ(c.series("v1")->views[1], 20);
    const auto& v = *c.video("v1");
    EXPECT_EQ(v.title_tokens, (std::vector<std::string>{"gun", "control", "tonight"}));
}

TEST(LoadCorpus, TweetWithUnknownVideoNamesIt)
{
    auto f = write_corpus("unknown_video", kOneVideo, kOneSeries, tweet_line("t1", "v404", "2018-01-01T05:00:00Z"));
    try {
        load_corpus(f.paths);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("v404"), std::string::npos) << e.what();
    }
}

TEST(LoadCorpus, DuplicateTweetIdIsAnError)
{
    auto f = write_corpus("dup_tweet", kOneVideo, kOneSeries,
                          tweet_line("t1", "v1", "2018-01-01T05:00:00Z") +
                              tweet_line("t1", "v1", "2018-01-01T06:00:00Z"));
    EXPECT_THROW(load_corpus(f.paths), InputError);
}

TEST(LoadCorpus, MalformedLineReportsPosition)
{
    auto f = write_corpus("malformed", kOneVideo, kOneSeries,
                          tweet_line("t1", "v1", "2018-01-01T05:00:00Z") + "{not json\n");
    try {
        load_corpus(f.paths);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("tweets.jsonl:2"), std::string::npos) << e.what();
    }
}

TEST(LoadCorpus, MalformedCsvNumberReportsLine)
{
    auto f = write_corpus("bad_csv", kOneVideo, "v1,0,ten,5,1\n", "");
    try {
        load_corpus(f.paths);
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("series.csv"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find('2'), std::string::npos) << e.what();
    }
}

TEST(LoadCorpus, PrePublishTweetIsRejected)
{
    auto f = write_corpus("prepublish", kOneVideo, kOneSeries, tweet_line("t1", "v1", "2017-12-31T23:59:59Z"));
    EXPECT_THROW(load_corpus(f.paths), InputError);
}

TEST(LoadCorpus, DanglingParentIsKeptAndFlagged)
{
    auto f = write_corpus("dangling", kOneVideo, kOneSeries,
                          tweet_line("t1", "v1", "2018-01-01T05:00:00Z") +
                              tweet_line("t2", "v1", "2018-01-01T06:00:00Z", "retweet", "t_gone"));
    const auto c = load_corpus(f.paths);
    EXPECT_EQ(c.tweet_count(), 2u);
    EXPECT_EQ(c.dangling_parents(), std::vector<std::string>{"t2"});
}

TEST(LoadCorpus, ParentRequiredExactlyForNonOriginals)
{
    auto f = write_corpus("parent_rule", kOneVideo, kOneSeries,
                          tweet_line("t1", "v1", "2018-01-01T05:00:00Z", "retweet"));
    EXPECT_THROW(load_corpus(f.paths), InputError);
}

TEST(LoadCorpus, UnsupportedSchemaVersion)
{
    auto f = write_corpus("schema", kOneVideo, kOneSeries, "");
    EXPECT_THROW(load_corpus(f.paths, "999"), InputError);
}

TEST(LoadCorpus, MissingFileIsInputError)
{
    CorpusPaths p;
    p.videos = "/nonexistent/videos.csv";
    EXPECT_THROW(load_corpus(p), InputError);
}

TEST(LoadCorpus, UsersNormalizeHashtagsAndDropSelfFollow)
{
    auto f = write_corpus("users", kOneVideo, kOneSeries, "",
                          "{\"user_id\":\"a\",\"followers\":[\"b\",\"a\",\"b\"],\"profile_hashtags\":[\"#MAGA\",\"nra\"],"
                          "\"status\":\"unavailable\"}\n");
    const auto c = load_corpus(f.paths);
    const auto* u = c.user("a");
    ASSERT_NE(u, nullptr);
    EXPECT_EQ(u->follower_ids, std::vector<std::string>{"b"});
    EXPECT_EQ(u->profile_hashtags, (std::vector<std::string>{"maga", "nra"}));
    EXPECT_EQ(u->status, UserStatus::Unavailable);
}

namespace {

Corpus filter_corpus(double views_day0, int tweets_in_window, int tweets_after = 0)
{
    CorpusBuilder b;
    b.add_video(fixture::video("v1"));
    DailySeries s;
    s.video_id = "v1";
    s.views = Vector::Zero(200);
    s.views[0] = views_day0;
    s.watch_minutes = Vector::Zero(200);
    s.tweets = Vector::Zero(200);
    b.add_series(s);
    const auto t0 = at("2018-01-01T00:00:00Z");
    for (int i = 0; i < tweets_in_window; ++i)
        b.add_tweet(tweet("t" + std::to_string(i), fixture::plus_minutes(t0, i)));
    for (int i = 0; i < tweets_after; ++i)
        b.add_tweet(tweet("late" + std::to_string(i), fixture::plus_minutes(t0, 120 * 1440 + i)));
    return b.build();
}

} // namespace

TEST(FilterVideos, NinetyNineViewsExcluded)
{
    EXPECT_TRUE(filter_videos(filter_corpus(99, 200)).ids.empty());
}

TEST(FilterVideos, BoundaryIsInclusive)
{
    EXPECT_EQ(filter_videos(filter_corpus(100, 100)).ids, std::vector<std::string>{"v1"});
}

TEST(FilterVideos, TweetsAfterWindowDoNotCount)
{
    EXPECT_TRUE(filter_videos(filter_corpus(1000, 99, 50)).ids.empty());
}

TEST(FilterVideos, EmptyCorpus)
{
    CorpusBuilder b;
    EXPECT_TRUE(filter_videos(b.build()).ids.empty());
}

TEST(FilterVideos, MissingSeriesIsExcludedAndReported)
{
    CorpusBuilder b;
    b.add_video(fixture::video("v1"));
    const auto set = filter_videos(b.build());
    EXPECT_TRUE(set.ids.empty());
    EXPECT_EQ(set.missing_series, std::vector<std::string>{"v1"});
}

TEST(FilterVideos, IdempotentAndMonotone)
{
    std::mt19937_64 rng(11);
    CorpusBuilder b;
    const auto t0 = at("2018-01-01T00:00:00Z");
    int tid = 0;
    for (int v = 0; v < 40; ++v) {
        const auto id = "v" + std::to_string(v);
        b.add_video(fixture::video(id));
        DailySeries s;
        s.video_id = id;
        s.views = Vector::Constant(130, static_cast<double>(rng() % 5));
        s.watch_minutes = Vector::Zero(130);
        s.tweets = Vector::Zero(130);
        b.add_series(s);
        const int n = static_cast<int>(rng() % 250);
        for (int i = 0; i < n; ++i)
            b.add_tweet(tweet("t" + std::to_string(tid++), fixture::plus_minutes(t0, static_cast<double>(rng() % 200000)),
                              "u", TweetType::Original, "", id));
    }
    const auto c = b.build();
    FilterOptions lo;
    const auto base = filter_videos(c, lo);
    EXPECT_EQ(filter_videos(c, lo).ids, base.ids);
    for (double mv : {100.0, 200.0, 400.0})
        for (std::size_t mt : {100u, 150u, 220u}) {
            FilterOptions hi{mv, mt, 120};
            const auto sub = filter_videos(c, hi).ids;
            for (const auto& id : sub)
                EXPECT_NE(std::find(base.ids.begin(), base.ids.end(), id), base.ids.end());
        }
}

TEST(MatchTopic, TitlePhrase)
{
    std::istringstream kw("gun control\n# comment\n\n");
    const auto keywords = parse_keywords(kw);
    ASSERT_EQ(keywords.size(), 1u);
    EXPECT_TRUE(match_topic(fixture::video("v1", "The Gun-Control debate"), {}, keywords));
}

TEST(MatchTopic, NoKeywordAnywhere)
{
    const KeywordList kw{{"gun", "control"}};
    std::vector<TweetRecord> tw{tweet("t1", at("2018-01-01T01:00:00Z"))};
    tw[0].text_tokens = tokenize("control of guns");
    EXPECT_FALSE(match_topic(fixture::video("v1", "cooking show"), tw, kw));
}

TEST(MatchTopic, WholeTokenOnly)
{
    const KeywordList kw{{"blm"}};
    EXPECT_FALSE(match_topic(fixture::video("v1", "blmxyz rally"), {}, kw));
    EXPECT_TRUE(match_topic(fixture::video("v1", "#BLM rally"), {}, kw));
}

TEST(MatchTopic, MatchInTweetText)
{
    const KeywordList kw{{"black", "lives", "matter"}};
    std::vector<TweetRecord> tw{tweet("t1", at("2018-01-01T01:00:00Z"))};
    tw[0].text_tokens = tokenize("Black Lives Matter!");
    EXPECT_TRUE(match_topic(fixture::video("v1", "news"), tw, kw));
}

TEST(MatchTopic, DescriptionMatch)
{
    auto v = fixture::video("v1", "news");
    v.description_tokens = tokenize("about abortion rights");
    EXPECT_TRUE(match_topic(v, {}, {{"abortion"}}));
}

TEST(MatchTopic, EmptyKeywordListIsAnError)
{
    EXPECT_THROW(match_topic(fixture::video("v1", "x"), {}, {}), DomainError);
}

TEST(MatchTopic, InvariantToKeywordOrder)
{
    KeywordList kw{{"planned", "parenthood"}, {"abortion"}, {"pro", "life"}};
    auto v = fixture::video("v1", "a pro life rally");
    const bool r = match_topic(v, {}, kw);
    std::reverse(kw.begin(), kw.end());
    EXPECT_EQ(match_topic(v, {}, kw), r);
    EXPECT_TRUE(r);
}

TEST(MatchTopic, ShippedKeywordFilesLoad)
{
    for (const char* topic : {"abortion", "gun_control", "blm"}) {
        const auto kw = load_keywords(std::filesystem::path(XPA_DATA_DIR) / "keywords" / (std::string(topic) + ".txt"));
        EXPECT_GE(kw.size(), 3u) << topic;
    }
}

TEST(EarlyAdopters, TenUsersGiveFirstTwo)
{
    const auto t0 = at("2018-01-01T00:00:00Z");
    std::vector<TweetRecord> tw;
    for (int i = 9; i >= 0; --i)
        tw.push_back(tweet("t" + std::to_string(i), fixture::plus_minutes(t0, i), "u" + std::to_string(i)));
    EXPECT_EQ(extract_early_adopters(tw), (std::vector<std::string>{"u0", "u1"}));
}

TEST(EarlyAdopters, SingleUserCeiling)
{
    std::vector<TweetRecord> tw{tweet("t1", at("2018-01-01T00:00:00Z"), "solo"),
                                tweet("t2", at("2018-01-01T01:00:00Z"), "solo")};
    EXPECT_EQ(extract_early_adopters(tw), std::vector<std::string>{"solo"});
}

TEST(EarlyAdopters, TieBrokenByTweetId)
{
    // 6 distinct users -> ceil(1.2) = 2; users b and c tie for second place
    const auto t0 = at("2018-01-01T00:00:00Z");
    std::vector<TweetRecord> tw{
        tweet("9", fixture::plus_minutes(t0, 1), "c"), tweet("3", t0, "a"),
        tweet("8", fixture::plus_minutes(t0, 1), "b"), tweet("20", fixture::plus_minutes(t0, 2), "d"),
        tweet("21", fixture::plus_minutes(t0, 3), "e"), tweet("22", fixture::plus_minutes(t0, 4), "f")};
    EXPECT_EQ(extract_early_adopters(tw), (std::vector<std::string>{"a", "b"}));
}

TEST(EarlyAdopters, ZeroTweetsGiveEmpty)
{
    EXPECT_TRUE(extract_early_adopters({}).empty());
}

TEST(EarlyAdopters, FractionOutOfRange)
{
    EXPECT_THROW(extract_early_adopters({}, 0.0), DomainError);
    EXPECT_THROW(extract_early_adopters({}, 1.5), DomainError);
}

TEST(EarlyAdopters, PrefixOfDistinctOrderWithoutDuplicates)
{
    std::mt19937_64 rng(5);
    const auto t0 = at("2018-01-01T00:00:00Z");
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<TweetRecord> tw;
        const int n = 1 + static_cast<int>(rng() % 80);
        for (int i = 0; i < n; ++i)
            tw.push_back(tweet(std::to_string(i), fixture::plus_minutes(t0, static_cast<double>(rng() % 30)),
                               "u" + std::to_string(rng() % 25)));
        const auto all = extract_early_adopters(tw, 1.0);
        auto sorted = all;
        std::sort(sorted.begin(), sorted.end());
        EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
        const auto part = extract_early_adopters(tw, 0.2);
        ASSERT_LE(part.size(), all.size());
        EXPECT_TRUE(std::equal(part.begin(), part.end(), all.begin()));
        EXPECT_EQ(part.size(), static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(all.size()))));
    }
}

TEST(EarlyAdopters, AvailabilityDropsUnavailableAndUnknown)
{
    CorpusBuilder b;
    UserRecord a{"a", {}, {}, UserStatus::Active};
    UserRecord x{"x", {}, {}, UserStatus::Unavailable};
    b.add_user(a);
    b.add_user(x);
    const auto c = b.build();
    EXPECT_EQ(available_adopters({"a", "x", "ghost"}, c), std::vector<std::string>{"a"});
}

TEST(Ids, NumericIdsOrderNumerically)
{
    EXPECT_TRUE(id_less("9", "10"));
    EXPECT_FALSE(id_less("10", "9"));
    EXPECT_TRUE(id_less("a10", "a9"));
}

TEST(Timestamps, ParseAndFormatRoundTrip)
{
    const auto t = at("2018-03-04T05:06:07Z");
    EXPECT_EQ(format_timestamp(t), "2018-03-04T05:06:07Z");
    EXPECT_EQ(at("2018-03-04 05:06:07"), t);
    EXPECT_EQ(day_index(at("2018-03-04T23:00:00Z"), at("2018-03-05T00:30:00Z")), 1);
    EXPECT_THROW(at("2018-13-04T05:06:07Z"), InputError);
}
