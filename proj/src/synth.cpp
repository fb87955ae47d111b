#include "xpa/synth.hpp"

#include "xpa/csv.hpp"
#include "xpa/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

namespace xpa::synth {

namespace {

namespace fs = std::filesystem;

std::string pad(const char* prefix, long long n, int width)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*lld", prefix, width, n);
    return buf;
}

struct Rng
{
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t s) : eng(s) {}
    double uniform(double a = 0, double b = 1) { return std::uniform_real_distribution<double>(a, b)(eng); }
    long long integer(long long a, long long b) { return std::uniform_int_distribution<long long>(a, b)(eng); }
    bool chance(double p) { return uniform() < p; }
    double lognormal(double median, double sigma) { return median * std::exp(sigma * std::normal_distribution<double>()(eng)); }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(integer(0, static_cast<long long>(v.size()) - 1))]; }
};

enum class Side
{
    Liberal,
    Conservative,
    Neutral
};

struct User
{
    std::string id;
    Side side;
    std::vector<std::string> followers;
    std::vector<std::string> hashtags;
    bool unavailable = false;
};

struct Tweet
{
    std::string id;
    std::string author;
    long long t; // seconds since epoch
    std::string type;
    std::string parent;
    std::string text;
};

const std::vector<std::string> kLeftTags = {"resist", "theresistance", "bluewave", "voteblue", "imwithher", "nevertrump"};
const std::vector<std::string> kRightTags = {"maga", "trump", "kag", "americafirst", "trump2020", "draintheswamp"};
const std::vector<std::string> kNeutralTags = {"music", "travel", "dogs", "coffee", "football"};

} // namespace

FixtureSummary write_fixture(const fs::path& dir, const FixtureOptions& o)
{
    fs::create_directories(dir);
    Rng rng(o.seed);

    // ---- users
    std::vector<User> users;
    auto add_users = [&](int n, Side side) {
        for (int i = 0; i < n; ++i)
            users.push_back({pad("u", static_cast<long long>(users.size()) + 1, 5), side, {}, {}, false});
    };
    add_users(o.liberal_users, Side::Liberal);
    add_users(o.conservative_users, Side::Conservative);
    add_users(o.neutral_users, Side::Neutral);
    std::vector<std::vector<std::size_t>> by_side(3);
    for (std::size_t i = 0; i < users.size(); ++i)
        by_side[static_cast<std::size_t>(users[i].side)].push_back(i);

    std::vector<std::vector<std::string>> pools(3);
    const char* pool_prefix[3] = {"fl", "fr", "fn"};
    const int pool_size[3] = {300, 300, 200};
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < pool_size[s]; ++k)
            pools[static_cast<std::size_t>(s)].push_back(pad(pool_prefix[s], k, 4));

    for (auto& u : users) {
        const auto side = static_cast<std::size_t>(u.side);
        const int nf = static_cast<int>(rng.integer(30, 50));
        for (int k = 0; k < nf; ++k) {
            const double r = rng.uniform();
            std::size_t pool;
            if (u.side == Side::Neutral)
                pool = r < 0.45 ? 0 : (r < 0.9 ? 1 : 2);
            else
                pool = r < 0.85 ? side : (r < 0.9 ? 1 - side : 2);
            u.followers.push_back(rng.pick(pools[pool]));
        }
        // a few followers among the users themselves, mostly same side
        const int nu = static_cast<int>(rng.integer(3, 10));
        const auto& mates = by_side[u.side == Side::Neutral ? static_cast<std::size_t>(rng.integer(0, 1)) : side];
        for (int k = 0; k < nu; ++k) {
            const auto& f = users[rng.chance(0.9) ? rng.pick(mates) : rng.pick(by_side[2])];
            if (f.id != u.id)
                u.followers.push_back(f.id);
        }
        if (u.side == Side::Liberal && rng.chance(0.35)) {
            u.hashtags.push_back(rng.pick(kLeftTags));
            if (rng.chance(0.5))
                u.hashtags.push_back("notmypresident");
        } else if (u.side == Side::Conservative && rng.chance(0.35)) {
            u.hashtags.push_back(rng.pick(kRightTags));
            if (rng.chance(0.5))
                u.hashtags.push_back(rng.chance(0.5) ? "nra" : "2a");
        }
        if (rng.chance(0.4))
            u.hashtags.push_back(rng.pick(kNeutralTags));
        u.unavailable = rng.chance(0.03);
        std::sort(u.followers.begin(), u.followers.end());
        u.followers.erase(std::unique(u.followers.begin(), u.followers.end()), u.followers.end());
    }

    {
        std::ofstream out(dir / "users.jsonl");
        for (const auto& u : users) {
            nlohmann::json j;
            j["user_id"] = u.id;
            j["followers"] = u.followers;
            std::vector<std::string> tags;
            for (const auto& h : u.hashtags)
                tags.push_back("#" + h);
            j["profile_hashtags"] = tags;
            j["status"] = u.unavailable ? "unavailable" : "active";
            out << j.dump() << '\n';
        }
    }

    // ---- videos
    enum Kind { KLeft, KRight, KCenter, KOff, KLow };
    std::vector<Kind> kinds;
    kinds.insert(kinds.end(), static_cast<std::size_t>(o.left_videos), KLeft);
    kinds.insert(kinds.end(), static_cast<std::size_t>(o.right_videos), KRight);
    kinds.insert(kinds.end(), static_cast<std::size_t>(o.center_videos), KCenter);
    kinds.insert(kinds.end(), static_cast<std::size_t>(o.offtopic_videos), KOff);
    kinds.insert(kinds.end(), static_cast<std::size_t>(o.low_tweet_videos), KLow);
    std::shuffle(kinds.begin(), kinds.end(), rng.eng);

    std::ofstream vout(dir / "videos.csv"), sout(dir / "series.csv"), tout(dir / "tweets.jsonl"),
        lout(dir / "channel_labels.csv");
    csv::Writer vw(vout), sw(sout), lw(lout);
    vw.row({"video_id", "channel_id", "publish_time", "duration_s", "likes", "dislikes", "title", "description"});
    sw.row({"video_id", "day", "view_count", "watch_time_min", "tweet_count"});
    lw.row({"channel_id", "leaning"});
    std::vector<std::string> labeled_channels;

    const long long epoch0 = 1514764800; // 2018-01-01T00:00:00Z
    long long tweet_no = 0;
    FixtureSummary summary;
    summary.users = users.size();
    for (std::size_t vi = 0; vi < kinds.size(); ++vi) {
        const Kind kind = kinds[vi];
        const std::string vid = pad("v", static_cast<long long>(vi) + 1, 3);
        const char* side_code = kind == KLeft ? "L" : kind == KRight ? "R" : kind == KCenter ? "C" : "X";
        const std::string channel = std::string("ch") + side_code + pad("", static_cast<long long>(vi) % 12, 2);
        if (kind != KOff && kind != KLow && std::find(labeled_channels.begin(), labeled_channels.end(), channel) ==
                                                 labeled_channels.end()) {
            labeled_channels.push_back(channel);
        }
        const long long publish = epoch0 + static_cast<long long>(vi) * 86400 + rng.integer(0, 20 * 3600);
        const auto duration = static_cast<long long>(std::exp(rng.uniform(std::log(120.0), std::log(1200.0))));

        double total_views, tau, awp;
        long long ntweets;
        switch (kind) {
        case KLeft:
            total_views = rng.lognormal(60000, 0.3);
            tau = rng.uniform(0.8, 2.0);
            awp = rng.uniform(0.55, 0.75);
            ntweets = rng.integer(110, 160);
            break;
        case KRight:
            total_views = rng.lognormal(8000, 0.3);
            tau = rng.uniform(12, 25);
            awp = rng.uniform(0.25, 0.45);
            ntweets = rng.integer(300, 450);
            break;
        case KCenter:
            total_views = rng.lognormal(20000, 0.3);
            tau = rng.uniform(3, 8);
            awp = rng.uniform(0.4, 0.6);
            ntweets = rng.integer(110, 200);
            break;
        case KOff:
            total_views = rng.lognormal(20000, 0.3);
            tau = rng.uniform(2, 6);
            awp = rng.uniform(0.3, 0.7);
            ntweets = rng.integer(110, 150);
            break;
        default:
            total_views = rng.lognormal(5000, 0.3);
            tau = rng.uniform(2, 6);
            awp = rng.uniform(0.3, 0.7);
            ntweets = rng.integer(20, 60);
            break;
        }

        // exponential decay shape over the series
        const int T = o.series_days;
        std::vector<double> w(static_cast<std::size_t>(T));
        double wsum = 0;
        for (int t = 0; t < T; ++t) {
            w[static_cast<std::size_t>(t)] = std::exp(-t / tau) + 1e-4;
            wsum += w[static_cast<std::size_t>(t)];
        }
        std::vector<double> cdf(w.size());
        double acc = 0;
        for (std::size_t t = 0; t < w.size(); ++t) {
            acc += w[t] / wsum;
            cdf[t] = acc;
        }

        // audience and tweets
        std::vector<std::size_t> audience;
        const std::size_t aud_size = static_cast<std::size_t>(std::max<long long>(8, ntweets * 2 / 3));
        for (std::size_t k = 0; k < aud_size; ++k) {
            const double r = rng.uniform();
            std::size_t side;
            if (kind == KLeft)
                side = r < 0.85 ? 0 : 2;
            else if (kind == KRight)
                side = r < 0.85 ? 1 : 2;
            else
                side = r < 0.4 ? 0 : (r < 0.8 ? 1 : 2);
            audience.push_back(rng.pick(by_side[side]));
        }
        const long long day0 = publish - publish % 86400;
        std::vector<Tweet> tweets;
        for (long long k = 0; k < ntweets; ++k) {
            const double r = rng.uniform();
            const auto day = static_cast<long long>(std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
            const long long lo = day == 0 ? publish : day0 + day * 86400;
            const long long t = rng.integer(lo, day0 + (day + 1) * 86400 - 1);
            tweets.push_back({"", users[audience[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(audience.size()) - 1))]].id, t, "original", "", ""});
        }
        std::sort(tweets.begin(), tweets.end(), [](const Tweet& a, const Tweet& b) { return a.t < b.t; });
        std::size_t last_original = 0;
        for (std::size_t k = 0; k < tweets.size(); ++k) {
            auto& tw = tweets[k];
            tw.id = pad("t", ++tweet_no, 7);
            if (k > 0) {
                const double r = rng.uniform();
                tw.type = r < 0.45 ? "original" : r < 0.8 ? "retweet" : r < 0.92 ? "reply" : "quote";
            }
            if (tw.type == "original") {
                last_original = k;
            } else if (rng.chance(0.02)) {
                tw.parent = pad("t_missing_", tweet_no, 7);
            } else {
                const std::size_t p = rng.chance(0.6) ? last_original
                                                      : static_cast<std::size_t>(rng.integer(0, static_cast<long long>(k) - 1));
                tw.parent = tweets[p].id;
            }
            const bool on_topic = kind != KOff && rng.chance(0.5);
            tw.text = on_topic ? "Thoughts on " + o.keyword + " tonight" : "watch this video";
        }

        // series rows
        std::vector<long long> tweets_per_day(static_cast<std::size_t>(T), 0);
        for (const auto& tw : tweets) {
            const auto d = (tw.t - day0) / 86400;
            if (d < T)
                ++tweets_per_day[static_cast<std::size_t>(d)];
        }
        long long view_sum = 0;
        for (int t = 0; t < T; ++t) {
            const auto views = static_cast<long long>(std::llround(total_views * w[static_cast<std::size_t>(t)] / wsum));
            view_sum += views;
            const double watch = static_cast<double>(views) * static_cast<double>(duration) * awp / 60.0;
            sw.row({vid, std::to_string(t), std::to_string(views), format_double(std::round(watch * 100) / 100),
                    std::to_string(tweets_per_day[static_cast<std::size_t>(t)])});
        }
        const auto reactions = std::max<long long>(1, view_sum / 50);
        const auto likes = static_cast<long long>(std::llround(static_cast<double>(reactions) * rng.uniform(0.7, 0.95)));
        const std::string title = kind == KOff ? "Easy pasta recipe" : "Debate on " + o.keyword;
        vw.row({vid, channel, format_timestamp(Timestamp(std::chrono::seconds(publish))), std::to_string(duration),
                std::to_string(likes), std::to_string(reactions - likes), title, "Uploaded clip " + vid});

        for (const auto& tw : tweets) {
            nlohmann::json j;
            j["tweet_id"] = tw.id;
            j["video_id"] = vid;
            j["author_id"] = tw.author;
            j["timestamp"] = format_timestamp(Timestamp(std::chrono::seconds(tw.t)));
            j["type"] = tw.type;
            j["parent_id"] = tw.parent.empty() ? nlohmann::json(nullptr) : nlohmann::json(tw.parent);
            j["text"] = tw.text;
            tout << j.dump() << '\n';
        }
        summary.tweets += tweets.size();
        ++summary.videos;
    }
    std::sort(labeled_channels.begin(), labeled_channels.end());
    for (const auto& ch : labeled_channels)
        lw.row({ch, ch.substr(2, 1)});

    std::ofstream cfg(dir / "config.txt");
    cfg << "# synthetic fixture, seed " << o.seed << "\n"
        << "videos = videos.csv\n"
        << "series = series.csv\n"
        << "tweets = tweets.jsonl\n"
        << "users = users.jsonl\n"
        << "channel_labels = channel_labels.csv\n"
        << "output_dir = " << o.output_dir << "\n"
        << "topics = " << o.topic << "\n"
        << "topic." << o.topic << ".keywords = " << o.keywords_path << "\n"
        << "seeds_left = " << o.seeds_left_path << "\n"
        << "seeds_right = " << o.seeds_right_path << "\n"
        << "video_leaning = " << o.video_leaning << "\n"
        << "engagement_bins = " << o.engagement_bins << "\n"
        << "bootstrap = 1000\n"
        << "seed = 20170101\n";
    return summary;
}

} // namespace xpa::synth
