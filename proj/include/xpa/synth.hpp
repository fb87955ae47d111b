#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace xpa::synth {

// Synthetic corpus with planted group differences: left videos get more views
// and higher watch percentages, right videos more tweets and slower decay.
struct FixtureOptions
{
    std::uint64_t seed = 2018;
    int left_videos = 36;
    int right_videos = 36;
    int center_videos = 10;
    int offtopic_videos = 4;  // no keyword anywhere
    int low_tweet_videos = 4; // fail the 100-tweet filter
    int liberal_users = 400;
    int conservative_users = 400;
    int neutral_users = 200;
    int series_days = 150;
    std::string topic = "gun_control";
    std::string keyword = "gun control";
    // written verbatim into config.txt
    std::string keywords_path = "../keywords/gun_control.txt";
    std::string seeds_left_path = "../hashtags/seed_left.txt";
    std::string seeds_right_path = "../hashtags/seed_right.txt";
    std::string output_dir = "out";
    std::string video_leaning = "scores";
    int engagement_bins = 4;
};

struct FixtureSummary
{
    std::size_t videos = 0;
    std::size_t tweets = 0;
    std::size_t users = 0;
};

// Writes videos.csv, series.csv, tweets.jsonl, users.jsonl, channel_labels.csv
// and config.txt into dir.
FixtureSummary write_fixture(const std::filesystem::path& dir, const FixtureOptions& opts = {});

} // namespace xpa::synth
