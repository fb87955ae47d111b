#pragma once

#include "xpa/config.hpp"
#include "xpa/hip.hpp"
#include "xpa/ingest.hpp"
#include "xpa/stats.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>

namespace xpa::report {

inline constexpr const char* kVersion = "1.0.0";

// Comparison metrics, in report order.
inline constexpr std::array<const char*, 22> kMetrics = {
    "view_120",
    "relative_engagement",
    "fraction_of_likes",
    "viral_potential",
    "tweet_120",
    "retweet_120",
    "reply_120",
    "original_tweet_120",
    "quote_120",
    "viewing_half_life",
    "tweeting_half_life",
    "tweeting_lifetime",
    "tweeting_inter_arrival",
    "cascade_start_time_isolated",
    "cascade_start_time_small",
    "cascade_start_time_large",
    "gini_indegree",
    "gini_closeness",
    "gini_betweenness",
    "network_density",
    "max_indegree",
    "global_efficiency",
};

struct TopicSpec
{
    std::string name;
    std::filesystem::path keywords;
};

enum class VideoLeaningMode
{
    Scores, // adopter scores classified by calibrated thresholds
    Labels  // channel labels used as given
};

struct PipelineOptions
{
    CorpusPaths corpus;
    std::filesystem::path output_dir;
    std::vector<TopicSpec> topics;
    std::filesystem::path seeds_left;
    std::filesystem::path seeds_right;
    FilterOptions filter;
    double adopter_fraction = 0.2;
    std::size_t engagement_bins = 1000;
    hip::FitOptions hip;
    double beta = 0.85;
    double alpha_disparity = 0.05;
    double cooc_min = 0.001;
    double entropy_max = 0.1;
    double ratio_min = 0.9;
    double lib_max = 1.0 / 3;
    double con_min = 2.0 / 3;
    int cv_folds = 10;
    VideoLeaningMode video_leaning = VideoLeaningMode::Scores;
    std::size_t bootstrap = 1000;
    std::uint64_t seed = 20170101;
    double significance = 0.05;

    // Recorded in the manifest (config values minus output_dir).
    std::map<std::string, std::string> parameters;

    static PipelineOptions from_config(const Config& cfg);
    // Keys understood by from_config, for env overrides and docs.
    static const std::vector<std::string>& known_keys();
};

enum class QuintileMetric
{
    Tweets,
    Followers,
    Views
};

std::string to_string(QuintileMetric m);

struct QuintileVideo
{
    std::string video_id;
    double engagement = 0;
    Leaning leaning = Leaning::Left;
    double tweets = 0;
    double followers = 0;
    double views = 0;
};

// Five equal-count groups by descending engagement; the remainder goes to the
// earliest groups and ties break by video id. Empty when fewer than 5 videos.
std::vector<std::vector<std::size_t>> quintile_groups(std::span<const QuintileVideo> videos);

struct QuintileRow
{
    int quintile = 1; // 1 = highest engagement
    Leaning leaning = Leaning::Left;
    std::size_t n = 0;
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double mean = 0;
};

// Rows per quintile for Left and Right; nullopt when fewer than 5 videos.
std::optional<std::vector<QuintileRow>> quintile_breakdown(std::span<const QuintileVideo> videos,
                                                            QuintileMetric metric);

struct BootstrapRow
{
    std::string metric;
    std::size_t n = 0;
    std::size_t m = 0;
    bool defined = false;
    stats::BootstrapResult result;
};

struct TopicReport
{
    std::string topic;
    std::vector<stats::ComparisonResult> comparisons; // kMetrics order
    std::vector<BootstrapRow> bootstrap;
    std::vector<stats::AccumulationPoint> accumulation_views;
    std::vector<stats::AccumulationPoint> accumulation_tweets;
};

// Stage runner. Each stage reads its inputs from the corpus and/or the CSV
// files earlier stages wrote into output_dir, so stages can be re-run alone.
class Pipeline
{
public:
    explicit Pipeline(PipelineOptions opts);
    ~Pipeline();

    void ingest();
    void leaning();
    void metrics();
    void cascades();
    void network();
    void fit_hip();
    std::vector<TopicReport> compare();
    // Accumulation, CCDFs, cascade-timing histograms, quintiles, manifest.
    std::vector<TopicReport> report();

    // All stages in dependency order.
    std::vector<TopicReport> run_all();

    const std::vector<std::string>& warnings() const { return warnings_; }
    const PipelineOptions& options() const { return opts_; }

private:
    const Corpus& corpus();
    void warn(std::string msg);
    void write_manifest(const std::vector<TopicReport>& reports);

    PipelineOptions opts_;
    std::unique_ptr<Corpus> corpus_;
    std::vector<std::string> warnings_;
    std::map<std::string, long long> counts_;
};

// Runs a stage and prefixes any error with the stage name, keeping its category.
void run_stage(const std::string& stage, const std::function<void()>& f);

} // namespace xpa::report
