#pragma once

#include "xpa/types.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace xpa {

struct CorpusPaths
{
    std::filesystem::path videos;
    std::filesystem::path series;
    std::filesystem::path tweets;
    std::filesystem::path users;          // optional
    std::filesystem::path channel_labels; // optional, `channel_id,leaning`
};

inline constexpr const char* kSchemaVersion = "1";

// Immutable in-memory corpus. Tweets are grouped per video and ordered by
// (timestamp, tweet_id).
class Corpus
{
public:
    const std::vector<VideoRecord>& videos() const { return videos_; }
    const VideoRecord* video(const std::string& id) const;
    const DailySeries* series(const std::string& video_id) const;
    std::span<const TweetRecord> tweets(const std::string& video_id) const;
    std::size_t tweet_count() const { return tweet_total_; }
    const UserRecord* user(const std::string& id) const;
    const std::unordered_map<std::string, UserRecord>& users() const { return users_; }
    // Tweets whose parent_id does not resolve within the corpus.
    const std::vector<std::string>& dangling_parents() const { return dangling_; }

    friend Corpus load_corpus(const CorpusPaths&, const std::string&);
    friend class CorpusBuilder;

private:
    std::vector<VideoRecord> videos_;
    std::unordered_map<std::string, std::size_t> video_index_;
    std::unordered_map<std::string, DailySeries> series_;
    std::unordered_map<std::string, std::vector<TweetRecord>> tweets_;
    std::size_t tweet_total_ = 0;
    std::unordered_map<std::string, UserRecord> users_;
    std::vector<std::string> dangling_;
};

// Programmatic construction with the same integrity checks as load_corpus.
class CorpusBuilder
{
public:
    void add_video(VideoRecord v);
    void add_series(DailySeries s);
    void add_tweet(TweetRecord t);
    void add_user(UserRecord u);
    Corpus build();

private:
    Corpus c_;
    std::vector<TweetRecord> pending_;
};

Corpus load_corpus(const CorpusPaths& paths, const std::string& schema_version = kSchemaVersion);

// Orders numeric ids numerically, otherwise lexicographically.
bool id_less(const std::string& a, const std::string& b);
bool tweet_order(const TweetRecord& a, const TweetRecord& b);

struct FilterOptions
{
    double min_views = 100;
    std::size_t min_tweets = 100;
    std::int64_t window_days = 120;
};

struct VideoSet
{
    std::vector<std::string> ids;           // corpus order
    std::vector<std::string> missing_series; // excluded: no daily series
};

VideoSet filter_videos(const Corpus& corpus, const FilterOptions& opts = {});

// One phrase per entry, already tokenized.
using KeywordList = std::vector<std::vector<std::string>>;

KeywordList parse_keywords(std::istream& in);
KeywordList load_keywords(const std::filesystem::path& path);

bool contains_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase);

bool match_topic(const VideoRecord& video, std::span<const TweetRecord> tweets, const KeywordList& keywords);

// Distinct authors by first tweet; returns the first ceil(fraction * U).
std::vector<std::string> extract_early_adopters(std::span<const TweetRecord> tweets, double fraction = 0.2);

// Drops adopters that are unknown or Unavailable in the user table.
std::vector<std::string> available_adopters(const std::vector<std::string>& adopters, const Corpus& corpus);

} // namespace xpa
