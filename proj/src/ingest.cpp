#include "xpa/ingest.hpp"

#include "xpa/csv.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

namespace xpa {

namespace {

std::ifstream open_input(const std::filesystem::path& p)
{
    std::ifstream in(p);
    if (!in)
        throw InputError("cannot open '" + p.string() + "'");
    return in;
}

std::string json_string(const nlohmann::json& j, const char* key, bool required, const std::string& where)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        if (required)
            throw InputError(where + ": missing key '" + key + "'");
        return {};
    }
    if (it->is_string())
        return it->get<std::string>();
    if (it->is_number_integer())
        return std::to_string(it->get<long long>());
    throw InputError(where + ": key '" + key + "' must be a string");
}

std::vector<std::string> json_string_list(const nlohmann::json& j, const char* key, const std::string& where)
{
    std::vector<std::string> out;
    auto it = j.find(key);
    if (it == j.end() || it->is_null())
        return out;
    if (it->is_string()) {
        out = tokenize(it->get<std::string>());
        return out;
    }
    if (!it->is_array())
        throw InputError(where + ": key '" + key + "' must be an array");
    for (const auto& e : *it) {
        if (e.is_string())
            out.push_back(e.get<std::string>());
        else if (e.is_number_integer())
            out.push_back(std::to_string(e.get<long long>()));
        else
            throw InputError(where + ": key '" + key + "' has a non-string entry");
    }
    return out;
}

void sort_unique(std::vector<std::string>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool all_digits(const std::string& s)
{
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

} // namespace

bool id_less(const std::string& a, const std::string& b)
{
    if (all_digits(a) && all_digits(b) && a.size() != b.size())
        return a.size() < b.size();
    return a < b;
}

bool tweet_order(const TweetRecord& a, const TweetRecord& b)
{
    if (a.timestamp != b.timestamp)
        return a.timestamp < b.timestamp;
    return id_less(a.tweet_id, b.tweet_id);
}

const VideoRecord* Corpus::video(const std::string& id) const
{
    auto it = video_index_.find(id);
    return it == video_index_.end() ? nullptr : &videos_[it->second];
}

const DailySeries* Corpus::series(const std::string& video_id) const
{
    auto it = series_.find(video_id);
    return it == series_.end() ? nullptr : &it->second;
}

std::span<const TweetRecord> Corpus::tweets(const std::string& video_id) const
{
    auto it = tweets_.find(video_id);
    if (it == tweets_.end())
        return {};
    return it->second;
}

const UserRecord* Corpus::user(const std::string& id) const
{
    auto it = users_.find(id);
    return it == users_.end() ? nullptr : &it->second;
}

void CorpusBuilder::add_video(VideoRecord v)
{
    if (v.duration_s <= 0)
        throw InputError("video '" + v.video_id + "': duration must be positive");
    if (v.likes < 0 || v.dislikes < 0)
        throw InputError("video '" + v.video_id + "': negative reaction count");
    if (c_.video_index_.count(v.video_id))
        throw InputError("duplicate video_id '" + v.video_id + "'");
    c_.video_index_[v.video_id] = c_.videos_.size();
    c_.videos_.push_back(std::move(v));
}

void CorpusBuilder::add_series(DailySeries s)
{
    if (s.views.size() < 1 || s.watch_minutes.size() != s.views.size() || s.tweets.size() != s.views.size())
        throw InputError("series '" + s.video_id + "': arrays must be nonempty and of equal length");
    if ((s.views.array() < 0).any() || (s.watch_minutes.array() < 0).any() || (s.tweets.array() < 0).any())
        throw InputError("series '" + s.video_id + "': negative entry");
    auto id = s.video_id;
    c_.series_[id] = std::move(s);
}

void CorpusBuilder::add_tweet(TweetRecord t)
{
    if (t.parent_id.has_value() == (t.type == TweetType::Original))
        throw InputError("tweet '" + t.tweet_id + "': parent_id must be present iff type is not original");
    pending_.push_back(std::move(t));
}

void CorpusBuilder::add_user(UserRecord u)
{
    sort_unique(u.follower_ids);
    u.follower_ids.erase(std::remove(u.follower_ids.begin(), u.follower_ids.end(), u.user_id),
                         u.follower_ids.end());
    sort_unique(u.profile_hashtags);
    if (c_.users_.count(u.user_id))
        throw InputError("duplicate user_id '" + u.user_id + "'");
    auto id = u.user_id;
    c_.users_[id] = std::move(u);
}

Corpus CorpusBuilder::build()
{
    for (const auto& [id, s] : c_.series_)
        if (!c_.video_index_.count(id))
            throw InputError("series references unknown video '" + id + "'");

    std::unordered_set<std::string> ids;
    for (const auto& t : pending_) {
        if (!ids.insert(t.tweet_id).second)
            throw InputError("duplicate tweet_id '" + t.tweet_id + "'");
        const auto* v = c_.video(t.video_id);
        if (!v)
            throw InputError("tweet '" + t.tweet_id + "' references unknown video '" + t.video_id + "'");
        if (t.timestamp < v->publish_time)
            throw InputError("tweet '" + t.tweet_id + "' precedes publish time of video '" + t.video_id + "'");
    }
    for (const auto& t : pending_)
        if (t.parent_id && !ids.count(*t.parent_id))
            c_.dangling_.push_back(t.tweet_id);
    std::sort(c_.dangling_.begin(), c_.dangling_.end(), id_less);

    c_.tweet_total_ = pending_.size();
    for (auto& t : pending_) {
        auto vid = t.video_id;
        c_.tweets_[vid].push_back(std::move(t));
    }
    pending_.clear();
    for (auto& [vid, list] : c_.tweets_)
        std::sort(list.begin(), list.end(), tweet_order);
    return std::move(c_);
}

Corpus load_corpus(const CorpusPaths& paths, const std::string& schema_version)
{
    if (schema_version != kSchemaVersion)
        throw InputError("unsupported schema version '" + schema_version + "'");
    CorpusBuilder b;

    std::unordered_map<std::string, Leaning> channel_leaning;
    if (!paths.channel_labels.empty()) {
        auto in = open_input(paths.channel_labels);
        csv::Reader r(in, paths.channel_labels.string());
        r.read_header({"channel_id", "leaning"});
        csv::Row row;
        while (r.next(row)) {
            try {
                channel_leaning[r.field(row, "channel_id")] = parse_leaning(r.field(row, "leaning"));
            } catch (const InputError& e) {
                r.fail(row.line, e.what());
            }
        }
    }

    {
        auto in = open_input(paths.videos);
        csv::Reader r(in, paths.videos.string());
        r.read_header({"video_id", "channel_id", "publish_time", "duration_s", "likes", "dislikes", "title",
                       "description"});
        const bool has_leaning = r.has_column("leaning");
        csv::Row row;
        while (r.next(row)) {
            VideoRecord v;
            try {
                v.video_id = r.field(row, "video_id");
                v.channel_id = r.field(row, "channel_id");
                v.publish_time = parse_timestamp(r.field(row, "publish_time"));
                v.duration_s = csv::parse_int(r.field(row, "duration_s"), r, row.line);
                v.likes = csv::parse_int(r.field(row, "likes"), r, row.line);
                v.dislikes = csv::parse_int(r.field(row, "dislikes"), r, row.line);
                v.title_tokens = tokenize(r.field(row, "title"));
                v.description_tokens = tokenize(r.field(row, "description"));
                if (has_leaning && !r.field(row, "leaning").empty())
                    v.leaning_label = parse_leaning(r.field(row, "leaning"));
                if (auto it = channel_leaning.find(v.channel_id); it != channel_leaning.end())
                    v.leaning_label = it->second;
                b.add_video(std::move(v));
            } catch (const InputError& e) {
                if (std::string(e.what()).rfind(paths.videos.string(), 0) == 0)
                    throw;
                r.fail(row.line, e.what());
            }
        }
    }

    {
        auto in = open_input(paths.series);
        csv::Reader r(in, paths.series.string());
        r.read_header({"video_id", "day", "view_count", "watch_time_min", "tweet_count"});
        struct Entry
        {
            double views, watch, tweets;
        };
        std::map<std::string, std::map<long long, Entry>> acc;
        csv::Row row;
        while (r.next(row)) {
            const auto day = csv::parse_int(r.field(row, "day"), r, row.line);
            if (day < 0)
                r.fail(row.line, "negative day index");
            Entry e{csv::parse_double(r.field(row, "view_count"), r, row.line),
                    csv::parse_double(r.field(row, "watch_time_min"), r, row.line),
                    csv::parse_double(r.field(row, "tweet_count"), r, row.line)};
            if (e.views < 0 || e.watch < 0 || e.tweets < 0 || !std::isfinite(e.views + e.watch + e.tweets))
                r.fail(row.line, "series entries must be finite and nonnegative");
            auto& days = acc[r.field(row, "video_id")];
            if (!days.emplace(day, e).second)
                r.fail(row.line, "duplicate day");
        }
        for (auto& [vid, days] : acc) {
            const auto len = days.rbegin()->first + 1;
            DailySeries s;
            s.video_id = vid;
            s.views = Vector::Zero(len);
            s.watch_minutes = Vector::Zero(len);
            s.tweets = Vector::Zero(len);
            for (const auto& [d, e] : days) {
                s.views[d] = e.views;
                s.watch_minutes[d] = e.watch;
                s.tweets[d] = e.tweets;
            }
            b.add_series(std::move(s));
        }
    }

    {
        auto in = open_input(paths.tweets);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            const std::string where = paths.tweets.string() + ":" + std::to_string(lineno);
            try {
                const auto j = nlohmann::json::parse(line);
                TweetRecord t;
                t.tweet_id = json_string(j, "tweet_id", true, where);
                t.video_id = json_string(j, "video_id", true, where);
                t.author_id = json_string(j, "author_id", true, where);
                t.timestamp = parse_timestamp(json_string(j, "timestamp", true, where));
                t.type = parse_tweet_type(json_string(j, "type", true, where));
                auto parent = json_string(j, "parent_id", false, where);
                if (!parent.empty())
                    t.parent_id = parent;
                t.text_tokens = tokenize(json_string(j, "text", false, where));
                b.add_tweet(std::move(t));
            } catch (const nlohmann::json::exception& e) {
                throw InputError(where + ": " + e.what());
            } catch (const InputError& e) {
                if (std::string(e.what()).rfind(where, 0) == 0)
                    throw;
                throw InputError(where + ": " + e.what());
            }
        }
    }

    if (!paths.users.empty()) {
        auto in = open_input(paths.users);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            const std::string where = paths.users.string() + ":" + std::to_string(lineno);
            try {
                const auto j = nlohmann::json::parse(line);
                UserRecord u;
                u.user_id = json_string(j, "user_id", true, where);
                u.follower_ids = json_string_list(j, "followers", where);
                for (auto h : json_string_list(j, "profile_hashtags", where)) {
                    h.erase(0, h.find_first_not_of('#'));
                    for (auto& ch : h)
                        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                    if (!h.empty())
                        u.profile_hashtags.push_back(std::move(h));
                }
                auto status = json_string(j, "status", false, where);
                u.status = status.empty() ? UserStatus::Active : parse_user_status(status);
                b.add_user(std::move(u));
            } catch (const nlohmann::json::exception& e) {
                throw InputError(where + ": " + e.what());
            } catch (const InputError& e) {
                if (std::string(e.what()).rfind(where, 0) == 0)
                    throw;
                throw InputError(where + ": " + e.what());
            }
        }
    }

    return b.build();
}

VideoSet filter_videos(const Corpus& corpus, const FilterOptions& opts)
{
    VideoSet out;
    for (const auto& v : corpus.videos()) {
        const auto* s = corpus.series(v.video_id);
        if (!s) {
            out.missing_series.push_back(v.video_id);
            continue;
        }
        const auto n = std::min<Eigen::Index>(opts.window_days, s->length());
        const double views = s->views.head(n).sum();
        std::size_t tweets = 0;
        for (const auto& t : corpus.tweets(v.video_id))
            if (day_index(v.publish_time, t.timestamp) < opts.window_days)
                ++tweets;
        if (views >= opts.min_views && tweets >= opts.min_tweets)
            out.ids.push_back(v.video_id);
    }
    return out;
}

KeywordList parse_keywords(std::istream& in)
{
    KeywordList out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#')
            continue;
        auto tokens = tokenize(line);
        if (!tokens.empty())
            out.push_back(std::move(tokens));
    }
    return out;
}

KeywordList load_keywords(const std::filesystem::path& path)
{
    auto in = open_input(path);
    return parse_keywords(in);
}

bool contains_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase)
{
    if (phrase.empty() || phrase.size() > tokens.size())
        return false;
    return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) != tokens.end();
}

bool match_topic(const VideoRecord& video, std::span<const TweetRecord> tweets, const KeywordList& keywords)
{
    if (keywords.empty())
        throw DomainError("match_topic: empty keyword list");
    auto any = [&](std::span<const std::string> tokens) {
        return std::any_of(keywords.begin(), keywords.end(),
                           [&](const auto& phrase) { return contains_phrase(tokens, phrase); });
    };
    if (any(video.title_tokens) || any(video.description_tokens))
        return true;
    return std::any_of(tweets.begin(), tweets.end(), [&](const TweetRecord& t) { return any(t.text_tokens); });
}

std::vector<std::string> extract_early_adopters(std::span<const TweetRecord> tweets, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw DomainError("extract_early_adopters: fraction must lie in (0, 1]");
    std::vector<const TweetRecord*> order;
    order.reserve(tweets.size());
    for (const auto& t : tweets)
        order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return tweet_order(*a, *b); });

    std::vector<std::string> authors;
    std::unordered_set<std::string> seen;
    for (const auto* t : order)
        if (seen.insert(t->author_id).second)
            authors.push_back(t->author_id);
    if (authors.empty())
        return authors;
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(authors.size()) - 1e-9));
    authors.resize(std::clamp<std::size_t>(k, 1, authors.size()));
    return authors;
}

std::vector<std::string> available_adopters(const std::vector<std::string>& adopters, const Corpus& corpus)
{
    std::vector<std::string> out;
    for (const auto& a : adopters) {
        const auto* u = corpus.user(a);
        if (u && u->status == UserStatus::Active)
            out.push_back(a);
    }
    return out;
}

} // namespace xpa
