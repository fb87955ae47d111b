#include "xpa/report.hpp"

#include "xpa/attention.hpp"
#include "xpa/cascades.hpp"
#include "xpa/csv.hpp"
#include "xpa/engagement.hpp"
#include "xpa/leaning.hpp"
#include "xpa/network.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

namespace xpa::report {

namespace fs = std::filesystem;

// ---------------------------------------------------------------- options

const std::vector<std::string>& PipelineOptions::known_keys()
{
    static const std::vector<std::string> keys = {
        "videos", "series", "tweets", "users", "channel_labels", "output_dir", "topics", "seeds_left",
        "seeds_right", "min_views", "min_tweets", "window_days", "early_adopter_fraction", "engagement_bins",
        "fit_days", "hip_restarts", "hip_max_iter", "beta", "alpha_disparity", "cooc_min", "entropy_max", "ratio_min", "lib_max",
        "con_min", "cv_folds", "video_leaning", "bootstrap", "seed", "significance"};
    return keys;
}

PipelineOptions PipelineOptions::from_config(const Config& cfg)
{
    PipelineOptions o;
    o.corpus.videos = cfg.get_path("videos");
    o.corpus.series = cfg.get_path("series");
    o.corpus.tweets = cfg.get_path("tweets");
    if (auto p = cfg.get_optional_path("users"))
        o.corpus.users = *p;
    if (auto p = cfg.get_optional_path("channel_labels"))
        o.corpus.channel_labels = *p;
    o.output_dir = cfg.get_path("output_dir");
    std::stringstream topics(cfg.get("topics"));
    std::string name;
    while (std::getline(topics, name, ',')) {
        name.erase(0, name.find_first_not_of(' '));
        name.erase(name.find_last_not_of(' ') + 1);
        if (name.empty())
            continue;
        o.topics.push_back({name, cfg.get_path("topic." + name + ".keywords")});
    }
    if (o.topics.empty())
        throw ConfigError("config: 'topics' names no topic");
    o.seeds_left = cfg.get_path("seeds_left");
    o.seeds_right = cfg.get_path("seeds_right");
    o.filter.min_views = cfg.get_double("min_views", o.filter.min_views);
    o.filter.min_tweets = static_cast<std::size_t>(cfg.get_int("min_tweets", static_cast<long long>(o.filter.min_tweets)));
    o.filter.window_days = cfg.get_int("window_days", o.filter.window_days);
    o.adopter_fraction = cfg.get_double("early_adopter_fraction", o.adopter_fraction);
    o.engagement_bins = static_cast<std::size_t>(cfg.get_int("engagement_bins", 1000));
    o.hip.fit_days = cfg.get_int("fit_days", o.hip.fit_days);
    o.hip.restarts = static_cast<int>(cfg.get_int("hip_restarts", o.hip.restarts));
    o.hip.optimizer.max_iter = static_cast<int>(cfg.get_int("hip_max_iter", o.hip.optimizer.max_iter));
    o.beta = cfg.get_double("beta", o.beta);
    o.alpha_disparity = cfg.get_double("alpha_disparity", o.alpha_disparity);
    o.cooc_min = cfg.get_double("cooc_min", o.cooc_min);
    o.entropy_max = cfg.get_double("entropy_max", o.entropy_max);
    o.ratio_min = cfg.get_double("ratio_min", o.ratio_min);
    o.lib_max = cfg.get_double("lib_max", o.lib_max);
    o.con_min = cfg.get_double("con_min", o.con_min);
    o.cv_folds = static_cast<int>(cfg.get_int("cv_folds", o.cv_folds));
    const auto mode = cfg.get_or("video_leaning", "scores");
    if (mode == "scores")
        o.video_leaning = VideoLeaningMode::Scores;
    else if (mode == "labels")
        o.video_leaning = VideoLeaningMode::Labels;
    else
        throw ConfigError("config: video_leaning must be 'scores' or 'labels', got '" + mode + "'");
    o.bootstrap = static_cast<std::size_t>(cfg.get_int("bootstrap", 1000));
    o.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(o.seed)));
    o.hip.seed = o.seed;
    o.significance = cfg.get_double("significance", o.significance);
    if (o.engagement_bins < 1 || o.bootstrap < 2 || o.cv_folds < 2)
        throw ConfigError("config: engagement_bins >= 1, bootstrap >= 2 and cv_folds >= 2 required");
    for (const auto& [k, v] : cfg.values())
        if (k != "output_dir")
            o.parameters[k] = v;
    return o;
}

// ---------------------------------------------------------------- quintiles

std::string to_string(QuintileMetric m)
{
    switch (m) {
    case QuintileMetric::Tweets: return "tweets";
    case QuintileMetric::Followers: return "followers";
    case QuintileMetric::Views: return "views";
    }
    return "tweets";
}

std::vector<std::vector<std::size_t>> quintile_groups(std::span<const QuintileVideo> videos)
{
    const auto n = videos.size();
    if (n < 5)
        return {};
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
        if (videos[a].engagement != videos[b].engagement)
            return videos[a].engagement > videos[b].engagement;
        return id_less(videos[a].video_id, videos[b].video_id);
    });
    std::vector<std::vector<std::size_t>> groups(5);
    std::size_t pos = 0;
    for (std::size_t g = 0; g < 5; ++g) {
        const std::size_t size = n / 5 + (g < n % 5 ? 1 : 0);
        groups[g].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                         order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return groups;
}

std::optional<std::vector<QuintileRow>> quintile_breakdown(std::span<const QuintileVideo> videos,
                                                            QuintileMetric metric)
{
    const auto groups = quintile_groups(videos);
    if (groups.empty())
        return std::nullopt;
    auto value = [&](const QuintileVideo& v) {
        switch (metric) {
        case QuintileMetric::Tweets: return v.tweets;
        case QuintileMetric::Followers: return v.followers;
        case QuintileMetric::Views: return v.views;
        }
        return v.tweets;
    };
    std::vector<QuintileRow> rows;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (auto side : {Leaning::Left, Leaning::Right}) {
            std::vector<double> xs;
            for (auto i : groups[g])
                if (videos[i].leaning == side)
                    xs.push_back(value(videos[i]));
            QuintileRow r;
            r.quintile = static_cast<int>(g) + 1;
            r.leaning = side;
            r.n = xs.size();
            if (!xs.empty()) {
                r.q1 = stats::quantile(xs, 0.25);
                r.median = stats::quantile(xs, 0.5);
                r.q3 = stats::quantile(xs, 0.75);
                r.mean = stats::view(xs).mean();
            } else {
                r.q1 = r.median = r.q3 = r.mean = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(r);
        }
    return rows;
}

// ---------------------------------------------------------------- stage plumbing

void run_stage(const std::string& stage, const std::function<void()>& f)
{
    const std::string prefix = "stage '" + stage + "': ";
    try {
        f();
    } catch (const ConfigError& e) {
        throw ConfigError(prefix + e.what());
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(prefix + e.what(), e.residual());
    } catch (const std::exception& e) {
        throw std::runtime_error(prefix + e.what());
    }
}

namespace {

struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::unordered_map<std::string, std::size_t> col;

    const std::string& at(std::size_t r, const std::string& name) const { return rows[r][col.at(name)]; }
};

Table read_table(const fs::path& path, const std::vector<std::string>& required)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string() + " (run the producing stage first)");
    csv::Reader reader(in, path.string());
    reader.read_header(required);
    Table t;
    t.header = reader.header();
    for (std::size_t i = 0; i < t.header.size(); ++i)
        t.col[t.header[i]] = i;
    csv::Row row;
    while (reader.next(row)) {
        row.fields.resize(t.header.size());
        t.rows.push_back(row.fields);
    }
    return t;
}

class TableWriter
{
public:
    TableWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path), w_(out_)
    {
        if (!out_)
            throw InputError("cannot write " + path.string());
        w_.row(header);
    }
    void row(const std::vector<std::string>& fields) { w_.row(fields); }

private:
    std::ofstream out_;
    csv::Writer w_;
};

std::string fmt(double v)
{
    return format_double(v);
}

std::string fmt(const MaybeMetric& v)
{
    return v ? format_double(*v) : std::string();
}

std::string fmt_index(const std::optional<Eigen::Index>& v)
{
    return v ? std::to_string(*v) : std::string();
}

MaybeMetric parse_maybe(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    return std::stod(s);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep))
        if (!part.empty())
            out.push_back(part);
    return out;
}

std::vector<std::string> read_lines(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        line.erase(0, line.find_first_not_of(" \t\r"));
        line.erase(line.find_last_not_of(" \t\r") + 1);
        if (!line.empty()) {
            std::transform(line.begin(), line.end(), line.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (line[0] == '#')
                line.erase(0, 1);
            out.push_back(line);
        }
    }
    return out;
}

// Video ids of a topic, in videos.csv order.
std::vector<std::string> topic_videos(const Table& videos, const std::string& topic)
{
    std::vector<std::string> out;
    for (std::size_t r = 0; r < videos.rows.size(); ++r) {
        const auto ts = split(videos.at(r, "topics"), ';');
        if (std::find(ts.begin(), ts.end(), topic) != ts.end())
            out.push_back(videos.at(r, "video_id"));
    }
    return out;
}

std::vector<std::string> all_topic_videos(const Table& videos)
{
    std::vector<std::string> out;
    for (std::size_t r = 0; r < videos.rows.size(); ++r)
        if (!videos.at(r, "topics").empty())
            out.push_back(videos.at(r, "video_id"));
    return out;
}

std::unordered_map<std::string, std::size_t> key_index(const Table& t, const std::string& key)
{
    std::unordered_map<std::string, std::size_t> idx;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        idx[t.at(r, key)] = r;
    return idx;
}

std::vector<std::string> early_adopters(const Corpus& c, const std::string& video_id, double fraction)
{
    return available_adopters(extract_early_adopters(c.tweets(video_id), fraction), c);
}

} // namespace

// ---------------------------------------------------------------- pipeline

Pipeline::Pipeline(PipelineOptions opts) : opts_(std::move(opts)) {}
Pipeline::~Pipeline() = default;

const Corpus& Pipeline::corpus()
{
    if (!corpus_)
        corpus_ = std::make_unique<Corpus>(load_corpus(opts_.corpus));
    return *corpus_;
}

void Pipeline::warn(std::string msg)
{
    warnings_.push_back(std::move(msg));
}

void Pipeline::ingest()
{
    run_stage("ingest", [&] {
        const auto& c = corpus();
        fs::create_directories(opts_.output_dir);
        const auto set = filter_videos(c, opts_.filter);
        for (const auto& id : set.missing_series)
            warn("video " + id + " has no daily series; excluded");
        std::vector<std::pair<std::string, KeywordList>> topics;
        for (const auto& t : opts_.topics)
            topics.emplace_back(t.name, load_keywords(t.keywords));
        TableWriter out(opts_.output_dir / "videos.csv", {"video_id", "topics", "view_120", "tweet_120"});
        long long matched = 0;
        for (const auto& id : set.ids) {
            const auto* v = c.video(id);
            const auto tweets = c.tweets(id);
            std::string names;
            for (const auto& [name, kw] : topics)
                if (match_topic(*v, tweets, kw))
                    names += (names.empty() ? "" : ";") + name;
            matched += !names.empty();
            const auto counts = count_tweet_types(*v, tweets, opts_.filter.window_days);
            out.row({id, names, fmt(total_views(c.series(id)->views, opts_.filter.window_days)),
                     std::to_string(counts.total)});
        }
        counts_["videos_total"] = static_cast<long long>(c.videos().size());
        counts_["tweets_total"] = static_cast<long long>(c.tweet_count());
        counts_["users_total"] = static_cast<long long>(c.users().size());
        counts_["videos_missing_series"] = static_cast<long long>(set.missing_series.size());
        counts_["videos_filtered"] = static_cast<long long>(set.ids.size());
        counts_["videos_topic_matched"] = matched;
        counts_["dangling_parents"] = static_cast<long long>(c.dangling_parents().size());
    });
}

void Pipeline::leaning()
{
    run_stage("leaning", [&] {
        const auto& c = corpus();
        const auto videos = read_table(opts_.output_dir / "videos.csv", {"video_id", "topics"});
        const auto seeds_left = read_lines(opts_.seeds_left);
        const auto seeds_right = read_lines(opts_.seeds_right);
        for (const auto& topic : opts_.topics) {
            const fs::path dir = opts_.output_dir / topic.name;
            fs::create_directories(dir);
            const auto vids = topic_videos(videos, topic.name);

            std::set<std::string, decltype(&id_less)> authors(&id_less);
            for (const auto& v : vids)
                for (const auto& t : c.tweets(v))
                    if (const auto* u = c.user(t.author_id); u && u->status == UserStatus::Active)
                        authors.insert(t.author_id);
            const std::vector<std::string> users(authors.begin(), authors.end());
            std::vector<leaning::HashtagSet> profiles;
            std::vector<std::vector<std::string>> followers;
            for (const auto& u : users) {
                profiles.push_back(c.user(u)->profile_hashtags);
                followers.push_back(c.user(u)->follower_ids);
            }

            std::vector<leaning::ExpansionCandidate> cands;
            const auto lists = leaning::expand_hashtags(profiles, seeds_left, seeds_right, opts_.cooc_min,
                                                        opts_.entropy_max, &cands);
            {
                TableWriter out(dir / "hashtags.csv",
                                {"hashtag", "side", "left_cooc", "right_cooc", "entropy", "accepted"});
                for (const auto& h : cands)
                    out.row({h.hashtag, h.accepted ? (h.left_cooc > h.right_cooc ? "L" : "R") : "",
                             std::to_string(h.left_cooc), std::to_string(h.right_cooc), fmt(h.entropy),
                             h.accepted ? "1" : "0"});
            }
            const auto seeds = leaning::assign_seed_users(profiles, lists, opts_.ratio_min);
            const auto graph = leaning::shared_audience_graph(followers);
            const auto backbone = leaning::disparity_filter(graph, opts_.alpha_disparity);
            leaning::PropagationOptions popts;
            popts.beta = opts_.beta;
            const auto prop = leaning::label_propagation(backbone, seeds, popts);

            std::size_t n_lib = 0, n_con = 0;
            for (auto s : seeds) {
                n_lib += s == leaning::SeedLabel::Liberal;
                n_con += s == leaning::SeedLabel::Conservative;
            }
            {
                TableWriter out(dir / "cv.csv", {"class", "precision", "recall", "f1", "seeds"});
                if (n_lib >= static_cast<std::size_t>(opts_.cv_folds) &&
                    n_con >= static_cast<std::size_t>(opts_.cv_folds)) {
                    const auto cv = leaning::crossvalidate_seeds(backbone, seeds, opts_.cv_folds, opts_.seed, popts);
                    out.row({"liberal", fmt(cv.liberal.precision), fmt(cv.liberal.recall), fmt(cv.liberal.f1),
                             std::to_string(n_lib)});
                    out.row({"conservative", fmt(cv.conservative.precision), fmt(cv.conservative.recall),
                             fmt(cv.conservative.f1), std::to_string(n_con)});
                } else {
                    warn(topic.name + ": too few seed users for cross-validation; skipped");
                }
            }

            std::unordered_map<std::string, double> score_of;
            {
                TableWriter out(dir / "user_leaning.csv", {"entity_id", "score", "class", "seed"});
                for (std::size_t i = 0; i < users.size(); ++i) {
                    const double s = prop.scores[i].score;
                    score_of[users[i]] = s;
                    const char* seed = seeds[i] == leaning::SeedLabel::Liberal        ? "liberal"
                                       : seeds[i] == leaning::SeedLabel::Conservative ? "conservative"
                                                                                       : "";
                    out.row({users[i], fmt(s), to_string(leaning::classify_user(s, opts_.lib_max, opts_.con_min)),
                             seed});
                }
            }

            // video scores from early adopters
            std::vector<MaybeMetric> vscore;
            std::vector<std::size_t> nadopt;
            std::array<std::vector<double>, 3> labeled;
            for (const auto& v : vids) {
                std::vector<double> s;
                for (const auto& a : early_adopters(c, v, opts_.adopter_fraction))
                    if (auto it = score_of.find(a); it != score_of.end())
                        s.push_back(it->second);
                nadopt.push_back(s.size());
                vscore.push_back(leaning::video_leaning_score(s));
                const auto& label = c.video(v)->leaning_label;
                if (label && vscore.back())
                    labeled[static_cast<std::size_t>(*label)].push_back(*vscore.back());
            }

            std::optional<leaning::LeaningThresholds> thr;
            if (opts_.video_leaning == VideoLeaningMode::Scores) {
                thr = leaning::find_thresholds(labeled[0], labeled[1], labeled[2]);
                TableWriter out(dir / "thresholds.csv", {"thr_lc", "thr_cr", "n_left", "n_center", "n_right"});
                out.row({fmt(thr->thr_lc), fmt(thr->thr_cr), std::to_string(labeled[0].size()),
                         std::to_string(labeled[1].size()), std::to_string(labeled[2].size())});
            }
            TableWriter out(dir / "video_leaning.csv", {"entity_id", "score", "class", "label", "adopters"});
            std::array<long long, 3> classes{};
            long long unclassified = 0;
            for (std::size_t i = 0; i < vids.size(); ++i) {
                const auto& label = c.video(vids[i])->leaning_label;
                std::optional<Leaning> cls;
                if (opts_.video_leaning == VideoLeaningMode::Labels)
                    cls = label;
                else if (vscore[i])
                    cls = leaning::classify_video(*vscore[i], *thr);
                if (cls)
                    ++classes[static_cast<std::size_t>(*cls)];
                else
                    ++unclassified;
                out.row({vids[i], fmt(vscore[i]), cls ? to_string(*cls) : "", label ? to_string(*label) : "",
                         std::to_string(nadopt[i])});
            }
            counts_[topic.name + ".users"] = static_cast<long long>(users.size());
            counts_[topic.name + ".seed_liberal"] = static_cast<long long>(n_lib);
            counts_[topic.name + ".seed_conservative"] = static_cast<long long>(n_con);
            counts_[topic.name + ".videos"] = static_cast<long long>(vids.size());
            counts_[topic.name + ".videos_left"] = classes[0];
            counts_[topic.name + ".videos_center"] = classes[1];
            counts_[topic.name + ".videos_right"] = classes[2];
            counts_[topic.name + ".videos_unclassified"] = unclassified;
            counts_[topic.name + ".backbone_edges"] = static_cast<long long>(backbone.nonZeros() / 2);
            counts_[topic.name + ".audience_edges"] = static_cast<long long>(graph.nonZeros() / 2);
        }
    });
}

void Pipeline::metrics()
{
    run_stage("metrics", [&] {
        const auto& c = corpus();
        const auto videos = read_table(opts_.output_dir / "videos.csv", {"video_id", "topics"});
        // engagement map over every corpus video with a defined watch percentage
        std::vector<EngagementSample> samples;
        for (const auto& v : c.videos())
            if (const auto* s = c.series(v.video_id))
                if (auto w = avg_watch_percentage(*s, v.duration_s))
                    samples.push_back({static_cast<double>(v.duration_s), *w});
        const auto map = EngagementMap::build(samples, opts_.engagement_bins);
        {
            std::ofstream mout(opts_.output_dir / "engagement_map.csv");
            map.write_csv(mout);
        }
        TableWriter out(opts_.output_dir / "video_metrics.csv",
                        {"video_id", "view_120", "avg_watch_percentage", "relative_engagement", "fraction_of_likes",
                         "tweet_120", "retweet_120", "reply_120", "original_tweet_120", "quote_120",
                         "viewing_half_life", "tweeting_half_life", "tweeting_lifetime", "tweeting_inter_arrival",
                         "adopters", "adopter_followers"});
        for (const auto& id : all_topic_videos(videos)) {
            const auto* v = c.video(id);
            const auto* s = c.series(id);
            const auto a = summarize_attention(*v, *s, c.tweets(id));
            const auto awp = avg_watch_percentage(*s, v->duration_s);
            const MaybeMetric re = awp ? map.relative_engagement(static_cast<double>(v->duration_s), *awp) : std::nullopt;
            const auto adopters = early_adopters(c, id, opts_.adopter_fraction);
            double followers = 0;
            for (const auto& u : adopters)
                followers += static_cast<double>(c.user(u)->follower_ids.size());
            out.row({id, fmt(a.view_120), fmt(awp), fmt(re), fmt(a.fraction_of_likes),
                     std::to_string(a.tweets.total), std::to_string(a.tweets.retweet), std::to_string(a.tweets.reply),
                     std::to_string(a.tweets.original), std::to_string(a.tweets.quote),
                     fmt_index(a.viewing_half_life), fmt_index(a.tweeting_half_life), fmt(a.tweeting_lifetime_min),
                     fmt(a.inter_arrival_min), std::to_string(adopters.size()), fmt(followers)});
        }
    });
}

void Pipeline::cascades()
{
    run_stage("cascades", [&] {
        const auto& c = corpus();
        const auto videos = read_table(opts_.output_dir / "videos.csv", {"video_id", "topics"});
        TableWriter out(opts_.output_dir / "cascades.csv",
                        {"video_id", "root_tweet_id", "size", "size_class", "start_time_pct", "truncated"});
        long long truncated = 0;
        for (const auto& id : all_topic_videos(videos)) {
            const auto* v = c.video(id);
            const auto& views = c.series(id)->views;
            for (const auto& cas : build_cascades(c.tweets(id), v->publish_time)) {
                truncated += cas.truncated;
                out.row({id, cas.root_tweet_id, std::to_string(cas.size()), to_string(cas.size_class),
                         fmt(cascade_start_time(cas.root_time, v->publish_time, views)), cas.truncated ? "1" : "0"});
            }
        }
        counts_["cascades_truncated"] = truncated;
    });
}

void Pipeline::network()
{
    run_stage("network", [&] {
        const auto& c = corpus();
        const auto videos = read_table(opts_.output_dir / "videos.csv", {"video_id", "topics"});
        TableWriter out(opts_.output_dir / "network.csv",
                        {"video_id", "nodes", "edges", "density", "max_indegree", "global_efficiency",
                         "transitivity", "gini_indegree", "gini_closeness", "gini_betweenness"});
        for (const auto& id : all_topic_videos(videos)) {
            const auto adopters = early_adopters(c, id, opts_.adopter_fraction);
            if (adopters.empty()) {
                out.row({id, "0", "0", "", "", "", "", "", "", ""});
                continue;
            }
            const auto g = AdopterNetwork::from_users(adopters, c);
            const auto s = network_summary(g);
            out.row({id, std::to_string(s.nodes), std::to_string(s.edges), fmt(s.density), fmt(s.max_indegree),
                     fmt(s.global_efficiency), fmt(s.transitivity), fmt(s.gini_indegree), fmt(s.gini_closeness),
                     fmt(s.gini_betweenness)});
        }
    });
}

void Pipeline::fit_hip()
{
    run_stage("fit-hip", [&] {
        const auto& c = corpus();
        const auto videos = read_table(opts_.output_dir / "videos.csv", {"video_id", "topics"});
        TableWriter out(opts_.output_dir / "hip.csv",
                        {"video_id", "gamma", "eta", "alpha", "C", "c", "theta", "residual", "viral_potential",
                         "supercritical_flag", "branching", "rel_rmse", "converged_restarts", "status"});
        long long failed = 0;
        for (const auto& id : all_topic_videos(videos)) {
            const auto* s = c.series(id);
            auto fo = opts_.hip;
            fo.fit_days = std::min(fo.fit_days, s->length());
            hip::FitResult fr;
            std::string status = "ok";
            try {
                fr = hip::fit(s->views, s->tweets, fo);
            } catch (const hip::FitError& e) {
                fr = e.best();
                status = "not_converged";
            }
            MaybeMetric nu;
            const auto vp = hip::viral_potential(fr.params);
            if (vp.supercritical)
                status = status == "ok" ? "supercritical" : status;
            else if (status == "ok")
                nu = vp.value;
            failed += status != "ok";
            const auto& p = fr.params;
            out.row({id, fmt(p.gamma), fmt(p.eta), fmt(p.alpha), fmt(p.C), fmt(p.c), fmt(p.theta), fmt(fr.residual),
                     fmt(nu), vp.supercritical ? "1" : "0", fmt(hip::branching_factor(p)), fmt(fr.rel_rmse),
                     std::to_string(fr.converged_restarts), status});
        }
        if (failed)
            warn(std::to_string(failed) + " HIP fits without a usable viral potential");
        counts_["hip_unusable"] = failed;
    });
}

namespace {

struct TopicData
{
    std::vector<std::string> left, right; // video ids
    std::unordered_map<std::string, Leaning> leaning;
};

TopicData topic_groups(const fs::path& dir)
{
    const auto t = read_table(dir / "video_leaning.csv", {"entity_id", "class"});
    TopicData d;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& cls = t.at(r, "class");
        if (cls.empty())
            continue;
        const auto l = parse_leaning(cls);
        const auto& id = t.at(r, "entity_id");
        d.leaning[id] = l;
        if (l == Leaning::Left)
            d.left.push_back(id);
        else if (l == Leaning::Right)
            d.right.push_back(id);
    }
    return d;
}

std::uint64_t metric_seed(std::uint64_t seed, const std::string& topic, std::size_t metric)
{
    // FNV-1a over the topic name, mixed with the metric index
    std::uint64_t h = 1469598103934665603ULL ^ seed;
    for (unsigned char ch : topic)
        h = (h ^ ch) * 1099511628211ULL;
    return (h ^ (metric + 1)) * 1099511628211ULL;
}

} // namespace

std::vector<TopicReport> Pipeline::compare()
{
    std::vector<TopicReport> reports;
    run_stage("compare", [&] {
        const auto metrics = read_table(opts_.output_dir / "video_metrics.csv", {"video_id"});
        const auto hipt = read_table(opts_.output_dir / "hip.csv", {"video_id", "viral_potential"});
        const auto net = read_table(opts_.output_dir / "network.csv", {"video_id"});
        const auto cas = read_table(opts_.output_dir / "cascades.csv", {"video_id", "size_class", "start_time_pct"});
        const auto mi = key_index(metrics, "video_id");
        const auto hi = key_index(hipt, "video_id");
        const auto ni = key_index(net, "video_id");
        std::unordered_map<std::string, std::vector<std::size_t>> cas_rows;
        for (std::size_t r = 0; r < cas.rows.size(); ++r)
            cas_rows[cas.at(r, "video_id")].push_back(r);

        auto lookup = [&](const std::string& metric, const std::string& id) -> MaybeMetric {
            static const std::unordered_map<std::string, std::string> net_cols = {
                {"gini_indegree", "gini_indegree"},   {"gini_closeness", "gini_closeness"},
                {"gini_betweenness", "gini_betweenness"}, {"network_density", "density"},
                {"max_indegree", "max_indegree"},     {"global_efficiency", "global_efficiency"}};
            if (metric == "viral_potential") {
                auto it = hi.find(id);
                return it == hi.end() ? std::nullopt : parse_maybe(hipt.at(it->second, "viral_potential"));
            }
            if (auto nc = net_cols.find(metric); nc != net_cols.end()) {
                auto it = ni.find(id);
                return it == ni.end() ? std::nullopt : parse_maybe(net.at(it->second, nc->second));
            }
            auto it = mi.find(id);
            if (it == mi.end())
                return std::nullopt;
            return parse_maybe(metrics.at(it->second, metric));
        };
        auto values = [&](const std::string& metric, const std::vector<std::string>& ids, long long& undefined) {
            std::vector<double> out;
            const std::string prefix = "cascade_start_time_";
            if (metric.rfind(prefix, 0) == 0) {
                const auto cls = metric.substr(prefix.size());
                for (const auto& id : ids)
                    if (auto it = cas_rows.find(id); it != cas_rows.end())
                        for (auto r : it->second)
                            if (cas.at(r, "size_class") == cls)
                                out.push_back(std::stod(cas.at(r, "start_time_pct")));
                return out;
            }
            for (const auto& id : ids) {
                if (auto v = lookup(metric, id))
                    out.push_back(*v);
                else
                    ++undefined;
            }
            return out;
        };

        for (const auto& topic : opts_.topics) {
            const fs::path dir = opts_.output_dir / topic.name;
            const auto groups = topic_groups(dir);
            if (groups.left.empty() || groups.right.empty())
                warn(topic.name + ": a leaning group is empty; comparison rows are undefined");
            TopicReport rep;
            rep.topic = topic.name;
            TableWriter cmp(dir / "comparison.csv", {"metric", "topic", "direction", "p", "stars", "n_left", "n_right",
                                                     "u_statistic", "p_greater", "p_less", "undefined_excluded"});
            TableWriter boot(dir / "bootstrap.csv", {"metric", "topic", "direction", "p", "t", "df", "mean_left",
                                                     "mean_right", "n_left", "n_right", "degenerate", "test"});
            for (std::size_t k = 0; k < kMetrics.size(); ++k) {
                const std::string metric = kMetrics[k];
                long long undefined = 0;
                const auto l = values(metric, groups.left, undefined);
                const auto r = values(metric, groups.right, undefined);
                auto res = stats::compare_groups(metric, l, r, opts_.significance);
                if (res.defined)
                    cmp.row({metric, topic.name, to_string(res.direction), fmt(res.p), res.stars,
                             std::to_string(res.n), std::to_string(res.m), fmt(res.u_bar), fmt(res.p_greater),
                             fmt(res.p_less), std::to_string(undefined)});
                else
                    cmp.row({metric, topic.name, "undefined", "", "", std::to_string(res.n), std::to_string(res.m), "",
                             "", "", std::to_string(undefined)});
                rep.comparisons.push_back(res);

                BootstrapRow b;
                b.metric = metric;
                b.n = l.size();
                b.m = r.size();
                if (!l.empty() && !r.empty()) {
                    b.defined = true;
                    b.result = stats::bootstrap_compare(l, r, opts_.bootstrap, metric_seed(opts_.seed, topic.name, k),
                                                        opts_.significance);
                    const auto& br = b.result;
                    boot.row({metric, topic.name, to_string(br.direction), fmt(br.p), fmt(br.t), fmt(br.df),
                              fmt(br.mean_left), fmt(br.mean_right), std::to_string(b.n), std::to_string(b.m),
                              br.degenerate ? "1" : "0", "welch"});
                } else {
                    boot.row({metric, topic.name, "undefined", "", "", "", "", "", std::to_string(b.n),
                              std::to_string(b.m), "", "welch"});
                }
                rep.bootstrap.push_back(b);
            }
            reports.push_back(std::move(rep));
        }
    });
    return reports;
}

std::vector<TopicReport> Pipeline::report()
{
    auto reports = compare();
    run_stage("report", [&] {
        const auto& c = corpus();
        const auto metrics = read_table(opts_.output_dir / "video_metrics.csv",
                                        {"video_id", "relative_engagement", "tweet_120", "view_120",
                                         "adopter_followers"});
        const auto mi = key_index(metrics, "video_id");
        const auto cas = read_table(opts_.output_dir / "cascades.csv", {"video_id", "size_class", "start_time_pct"});
        for (auto& rep : reports) {
            const fs::path dir = opts_.output_dir / rep.topic;
            const auto groups = topic_groups(dir);

            // accumulation statistic per day and CCDFs of per-video fractions
            auto series_of = [&](const std::vector<std::string>& ids, bool views) {
                std::vector<Vector> out;
                for (const auto& id : ids)
                    out.push_back(views ? c.series(id)->views : c.series(id)->tweets);
                return out;
            };
            TableWriter acc(dir / "accumulation.csv",
                            {"quantity", "day", "u_statistic", "n_left", "n_right", "dropped"});
            TableWriter ccdf(dir / "ccdf.csv", {"quantity", "day", "leaning", "fraction", "ccdf"});
            for (const bool views : {true, false}) {
                const char* q = views ? "views" : "tweets";
                const auto ls = series_of(groups.left, views);
                const auto rs = series_of(groups.right, views);
                auto pts = stats::accumulation_series(ls, rs, 0, kHorizonDays - 1);
                for (const auto& p : pts)
                    acc.row({q, std::to_string(p.day), std::isnan(p.u_bar) ? "" : fmt(p.u_bar), std::to_string(p.n),
                             std::to_string(p.m), std::to_string(p.dropped)});
                (views ? rep.accumulation_views : rep.accumulation_tweets) = std::move(pts);
                for (const Eigen::Index day : {Eigen::Index{0}, Eigen::Index{29}})
                    for (const auto& [side, ss] : {std::pair{"L", &ls}, std::pair{"R", &rs}}) {
                        std::vector<double> f;
                        for (const auto& s : *ss)
                            if (auto v = accumulation_fraction(s, day))
                                f.push_back(*v);
                        std::sort(f.begin(), f.end());
                        for (std::size_t i = 0; i < f.size(); ++i) {
                            if (i + 1 < f.size() && f[i + 1] == f[i])
                                continue;
                            // P(X >= f[i]) over distinct values
                            const auto first = std::lower_bound(f.begin(), f.end(), f[i]) - f.begin();
                            ccdf.row({q, std::to_string(day), side, fmt(f[i]),
                                      fmt(static_cast<double>(f.size() - static_cast<std::size_t>(first)) /
                                          static_cast<double>(f.size()))});
                        }
                    }
            }

            // cascade start-time histograms, 10 bins on [0, 1]
            constexpr int bins = 10;
            std::map<std::pair<std::string, std::string>, std::array<long long, bins>> hist;
            for (std::size_t r = 0; r < cas.rows.size(); ++r) {
                auto it = groups.leaning.find(cas.at(r, "video_id"));
                if (it == groups.leaning.end() || it->second == Leaning::Center)
                    continue;
                const double v = std::stod(cas.at(r, "start_time_pct"));
                const int b = std::min(bins - 1, static_cast<int>(v * bins));
                hist[{to_string(it->second), cas.at(r, "size_class")}][static_cast<std::size_t>(b)]++;
            }
            TableWriter h(dir / "cascade_start_hist.csv",
                          {"leaning", "size_class", "bin_lo", "bin_hi", "count", "density"});
            for (const char* side : {"L", "R"})
                for (const char* cls : {"isolated", "small", "large"}) {
                    const auto counts = hist[{side, cls}];
                    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), 0LL));
                    for (int b = 0; b < bins; ++b) {
                        const double width = 1.0 / bins;
                        const auto cnt = static_cast<double>(counts[static_cast<std::size_t>(b)]);
                        h.row({side, cls, fmt(b * width), fmt((b + 1) * width),
                               std::to_string(counts[static_cast<std::size_t>(b)]),
                               total > 0 ? fmt(cnt / (total * width)) : ""});
                    }
                }

            // engagement quintiles
            std::vector<QuintileVideo> qv;
            for (const auto* ids : {&groups.left, &groups.right})
                for (const auto& id : *ids) {
                    auto it = mi.find(id);
                    if (it == mi.end())
                        continue;
                    const auto re = parse_maybe(metrics.at(it->second, "relative_engagement"));
                    if (!re)
                        continue;
                    qv.push_back({id, *re, groups.leaning.at(id), std::stod(metrics.at(it->second, "tweet_120")),
                                  std::stod(metrics.at(it->second, "adopter_followers")),
                                  std::stod(metrics.at(it->second, "view_120"))});
                }
            TableWriter qt(dir / "quintiles.csv", {"metric", "quintile", "leaning", "n", "q1", "median", "q3", "mean"});
            bool any = false;
            for (auto m : {QuintileMetric::Tweets, QuintileMetric::Followers, QuintileMetric::Views})
                if (auto rows = quintile_breakdown(qv, m)) {
                    any = true;
                    for (const auto& r : *rows) {
                        auto num = [&](double v) { return std::isnan(v) ? std::string() : fmt(v); };
                        qt.row({to_string(m), std::to_string(r.quintile), to_string(r.leaning), std::to_string(r.n),
                                num(r.q1), num(r.median), num(r.q3), num(r.mean)});
                    }
                }
            if (!any)
                warn(rep.topic + ": fewer than 5 videos with relative engagement; quintiles undefined");
        }
        write_manifest(reports);
    });
    return reports;
}

void Pipeline::write_manifest(const std::vector<TopicReport>& reports)
{
    nlohmann::json j;
    j["tool"] = "xpa";
    j["version"] = kVersion;
    j["schema_version"] = kSchemaVersion;
    j["parameters"] = opts_.parameters;
    j["counts"] = counts_;
    j["bootstrap_test"] = "welch two-sided t-test on resample means";
    j["mwu_exact_limit"] = 400;
    nlohmann::json topics = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json t;
        t["topic"] = r.topic;
        nlohmann::json undefined = nlohmann::json::array();
        for (const auto& cmp : r.comparisons)
            if (!cmp.defined)
                undefined.push_back(cmp.metric);
        t["undefined_metrics"] = undefined;
        topics.push_back(t);
    }
    j["topics"] = topics;
    j["warnings"] = warnings_;
    std::ofstream out(opts_.output_dir / "manifest.json");
    out << j.dump(2) << '\n';
}

std::vector<TopicReport> Pipeline::run_all()
{
    ingest();
    leaning();
    metrics();
    cascades();
    network();
    fit_hip();
    return report();
}

} // namespace xpa::report
