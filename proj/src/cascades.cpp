#include "xpa/cascades.hpp"

#include "xpa/ingest.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace xpa {

std::string to_string(SizeClass c)
{
    switch (c) {
    case SizeClass::Isolated: return "isolated";
    case SizeClass::Small: return "small";
    case SizeClass::Large: return "large";
    }
    return "isolated";
}

SizeClass size_class_of(std::size_t size)
{
    if (size == 0)
        throw DomainError("size_class_of: cascade size must be >= 1");
    if (size == 1)
        return SizeClass::Isolated;
    return size <= 4 ? SizeClass::Small : SizeClass::Large;
}

std::vector<Cascade> build_cascades(std::span<const TweetRecord> tweets, std::optional<Timestamp> publish,
                                    std::int64_t horizon)
{
    const std::size_t n = tweets.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return tweet_order(tweets[a], tweets[b]); });

    std::unordered_map<std::string, std::size_t> index;
    index.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (!index.emplace(tweets[i].tweet_id, i).second)
            throw InputError("build_cascades: duplicate tweet_id " + tweets[i].tweet_id);

    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(n, none);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = tweets[i];
        if (t.type == TweetType::Original || !t.parent_id)
            continue;
        if (auto it = index.find(*t.parent_id); it != index.end())
            parent[i] = it->second;
    }

    // resolve roots iteratively; state 0 = unvisited, 1 = on current path, 2 = done
    std::vector<std::size_t> root(n, none);
    std::vector<char> state(n, 0);
    std::vector<std::size_t> path;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cur = i;
        path.clear();
        while (state[cur] == 0 && parent[cur] != none) {
            state[cur] = 1;
            path.push_back(cur);
            cur = parent[cur];
        }
        if (state[cur] == 1) {
            std::string cycle;
            auto start = std::find(path.begin(), path.end(), cur);
            for (auto it = start; it != path.end(); ++it)
                cycle += (cycle.empty() ? "" : " -> ") + tweets[*it].tweet_id;
            throw InputError("build_cascades: parent cycle " + cycle + " -> " + tweets[cur].tweet_id);
        }
        const std::size_t r = state[cur] == 2 ? root[cur] : cur;
        state[cur] = 2;
        root[cur] = r;
        for (auto p : path) {
            state[p] = 2;
            root[p] = r;
        }
    }

    std::unordered_map<std::size_t, std::size_t> slot;
    std::vector<Cascade> out;
    for (auto i : order) {
        if (root[i] != i)
            continue;
        slot.emplace(i, out.size());
        Cascade c;
        c.root_tweet_id = tweets[i].tweet_id;
        c.root_time = tweets[i].timestamp;
        out.push_back(std::move(c));
    }
    for (auto i : order) {
        auto& c = out[slot.at(root[i])];
        c.members.push_back(tweets[i].tweet_id);
        if (publish && day_index(*publish, tweets[i].timestamp) >= horizon)
            c.truncated = true;
    }
    for (auto& c : out) {
        // the root precedes its descendants in tweet order unless timestamps disagree
        auto it = std::find(c.members.begin(), c.members.end(), c.root_tweet_id);
        std::rotate(c.members.begin(), it, it + 1);
        c.size_class = size_class_of(c.members.size());
    }
    return out;
}

GroupFractions group_fractions(std::span<const Cascade> cascades)
{
    if (cascades.empty())
        throw DomainError("group_fractions: no cascades");
    std::array<std::size_t, 3> nc{}, nt{};
    std::size_t tweets = 0;
    for (const auto& c : cascades) {
        const auto k = static_cast<std::size_t>(c.size_class);
        ++nc[k];
        nt[k] += c.size();
        tweets += c.size();
    }
    GroupFractions g;
    for (std::size_t k = 0; k < 3; ++k) {
        g.cascades[k] = static_cast<double>(nc[k]) / static_cast<double>(cascades.size());
        g.tweets[k] = static_cast<double>(nt[k]) / static_cast<double>(tweets);
    }
    return g;
}

double cascade_start_time(Timestamp root_time, Timestamp publish, const Eigen::Ref<const Vector>& views,
                          Eigen::Index horizon)
{
    if (root_time < publish)
        throw DomainError("cascade_start_time: root tweet precedes publish time");
    const auto n = std::min(horizon, views.size());
    const double total = views.head(n).sum();
    if (!(total > 0))
        throw DomainError("cascade_start_time: video has no views within the horizon");
    const auto d = day_index(publish, root_time);
    if (d >= horizon)
        return 1.0;
    const Timestamp day_begin = d == 0 ? publish : day_start(publish) + std::chrono::days(d);
    const Timestamp day_end = day_start(publish) + std::chrono::days(d + 1);
    const double span = static_cast<double>((day_end - day_begin).count());
    const double frac = static_cast<double>((root_time - day_begin).count()) / span;
    const auto di = static_cast<Eigen::Index>(d);
    const double before = views.head(std::min(di, n)).sum();
    const double today = di < n ? views[di] : 0.0;
    return std::clamp((before + frac * today) / total, 0.0, 1.0);
}

} // namespace xpa
