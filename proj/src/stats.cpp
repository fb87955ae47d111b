#include "xpa/stats.hpp"

#include "xpa/attention.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace xpa::stats {

Vector average_ranks(const Sample& x)
{
    const auto N = x.size();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    Vector ranks(N);
    for (Eigen::Index i = 0; i < N;) {
        Eigen::Index j = i;
        while (j + 1 < N && x[order[j + 1]] == x[order[i]])
            ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Eigen::Index k = i; k <= j; ++k)
            ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

namespace {

Vector pooled(const Sample& a, const Sample& b)
{
    Vector all(a.size() + b.size());
    all << a, b;
    return all;
}

void require_nonempty(const Sample& left, const Sample& right, const char* who)
{
    if (left.size() == 0 || right.size() == 0)
        throw DomainError(std::string(who) + ": both samples must be nonempty");
    if (!left.allFinite() || !right.allFinite())
        throw DomainError(std::string(who) + ": samples must be finite");
}

double mann_whitney_u(const Vector& ranks, Eigen::Index n)
{
    const double rank_sum = ranks.head(n).sum();
    const double nn = static_cast<double>(n);
    return rank_sum - nn * (nn + 1) / 2;
}

double normal_sf(double z)
{
    return 0.5 * std::erfc(z / std::sqrt(2.0));
}

// P(S >= s_obs) and P(S <= s_obs) for S = sum of doubled ranks of a random
// k-subset of the pooled sample.
std::pair<double, double> exact_tails(const Vector& ranks, Eigen::Index k, long long s_obs)
{
    const auto N = ranks.size();
    std::vector<long long> r2(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i)
        r2[static_cast<std::size_t>(i)] = std::llround(2 * ranks[i]);
    const long long smax = 2 * N * k + 2;
    const auto width = static_cast<std::size_t>(smax + 1);
    // dp[j][s]: number of j-subsets of the items seen so far with doubled rank sum s
    std::vector<std::vector<double>> dp(static_cast<std::size_t>(k + 1), std::vector<double>(width, 0.0));
    dp[0][0] = 1;
    for (const auto r : r2) {
        for (auto j = static_cast<std::size_t>(k); j >= 1; --j) {
            auto& cur = dp[j];
            const auto& prev = dp[j - 1];
            for (auto s = width; s-- > static_cast<std::size_t>(r);)
                cur[s] += prev[s - static_cast<std::size_t>(r)];
        }
    }
    const auto& dist = dp[static_cast<std::size_t>(k)];
    double total = 0, ge = 0, le = 0;
    for (std::size_t s = 0; s < width; ++s) {
        total += dist[s];
        if (static_cast<long long>(s) >= s_obs)
            ge += dist[s];
        if (static_cast<long long>(s) <= s_obs)
            le += dist[s];
    }
    return {ge / total, le / total};
}

} // namespace

double normalized_mwu(const Sample& left, const Sample& right)
{
    require_nonempty(left, right, "normalized_mwu");
    const Vector ranks = average_ranks(pooled(left, right));
    const double u = mann_whitney_u(ranks, left.size());
    return u / (static_cast<double>(left.size()) * static_cast<double>(right.size()));
}

MwuTest mwu_one_sided(const Sample& left, const Sample& right, Alternative alt, std::size_t exact_limit)
{
    require_nonempty(left, right, "mwu_one_sided");
    const auto n = left.size();
    const auto m = right.size();
    const Vector all = pooled(left, right);
    const Vector ranks = average_ranks(all);
    MwuTest res;
    res.u = mann_whitney_u(ranks, n);

    if ((all.array() == all[0]).all()) {
        res.p = 1;
        res.exact = static_cast<std::size_t>(n * m) <= exact_limit;
        return res;
    }

    if (static_cast<std::size_t>(n * m) <= exact_limit) {
        res.exact = true;
        // enumerate over the smaller group; the other sum is determined
        const bool use_left = n <= m;
        const Eigen::Index k = use_left ? n : m;
        Vector ordered(all.size());
        if (use_left)
            ordered = ranks;
        else
            ordered << ranks.tail(m), ranks.head(n);
        const long long total = std::llround(2 * ranks.sum());
        const long long s_left = std::llround(2 * ranks.head(n).sum());
        const long long s_sub = use_left ? s_left : total - s_left;
        auto [ge, le] = exact_tails(ordered, k, s_sub);
        // large left sum <=> small right sum
        const double p_greater = use_left ? ge : le;
        const double p_less = use_left ? le : ge;
        res.p = alt == Alternative::Greater ? p_greater : p_less;
    } else {
        const double nn = static_cast<double>(n), mm = static_cast<double>(m), N = nn + mm;
        // tie correction
        std::vector<double> sorted(all.data(), all.data() + all.size());
        std::sort(sorted.begin(), sorted.end());
        double ties = 0;
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i])
                ++j;
            const double t = static_cast<double>(j - i);
            ties += t * t * t - t;
            i = j;
        }
        const double var = nn * mm / 12.0 * ((N + 1) - ties / (N * (N - 1)));
        if (!(var > 0)) {
            res.p = 1;
            return res;
        }
        const double sd = std::sqrt(var);
        const double mu = nn * mm / 2;
        if (alt == Alternative::Greater)
            res.p = normal_sf((res.u - mu - 0.5) / sd);
        else
            res.p = 1 - normal_sf((res.u - mu + 0.5) / sd);
    }
    res.p = std::clamp(res.p, std::numeric_limits<double>::min(), 1.0);
    return res;
}

std::string to_string(Direction d)
{
    switch (d) {
    case Direction::LeftGreater: return "L>R";
    case Direction::LeftLess: return "L<R";
    case Direction::None: return "none";
    }
    return "none";
}

std::string significance_stars(double p)
{
    if (p < 0.001)
        return "***";
    if (p < 0.01)
        return "**";
    if (p < 0.05)
        return "*";
    return "";
}

ComparisonResult compare_groups(const std::string& metric, const std::vector<double>& left,
                                const std::vector<double>& right, double alpha)
{
    ComparisonResult r;
    r.metric = metric;
    r.n = left.size();
    r.m = right.size();
    if (left.empty() || right.empty())
        return r;
    r.defined = true;
    r.u_bar = normalized_mwu(view(left), view(right));
    r.p_greater = mwu_one_sided(view(left), view(right), Alternative::Greater).p;
    r.p_less = mwu_one_sided(view(left), view(right), Alternative::Less).p;
    r.p = std::min(r.p_greater, r.p_less);
    if (r.p_greater < alpha && r.p_greater <= r.p_less)
        r.direction = Direction::LeftGreater;
    else if (r.p_less < alpha)
        r.direction = Direction::LeftLess;
    r.stars = r.direction == Direction::None ? "" : significance_stars(r.p);
    return r;
}

std::vector<AccumulationPoint> accumulation_series(const std::vector<Vector>& left, const std::vector<Vector>& right,
                                                   Eigen::Index first_day, Eigen::Index last_day,
                                                   Eigen::Index horizon)
{
    std::vector<AccumulationPoint> out;
    for (Eigen::Index day = first_day; day <= last_day; ++day) {
        AccumulationPoint pt;
        pt.day = day;
        std::vector<double> l, r;
        for (const auto& s : left) {
            if (auto f = accumulation_fraction(s, day, horizon))
                l.push_back(*f);
            else
                ++pt.dropped;
        }
        for (const auto& s : right) {
            if (auto f = accumulation_fraction(s, day, horizon))
                r.push_back(*f);
            else
                ++pt.dropped;
        }
        pt.n = l.size();
        pt.m = r.size();
        pt.u_bar = (l.empty() || r.empty()) ? std::numeric_limits<double>::quiet_NaN()
                                            : normalized_mwu(view(l), view(r));
        out.push_back(pt);
    }
    return out;
}

WelchResult welch_t_test(const Sample& a, const Sample& b)
{
    if (a.size() < 2 || b.size() < 2)
        throw DomainError("welch_t_test: each sample needs at least two values");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double ma = a.mean(), mb = b.mean();
    const double va = (a.array() - ma).square().sum() / (na - 1);
    const double vb = (b.array() - mb).square().sum() / (nb - 1);
    const double se2 = va / na + vb / nb;
    WelchResult r;
    if (!(se2 > 0)) {
        r.p = ma == mb ? 1.0 : std::numeric_limits<double>::min();
        r.t = ma == mb ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), ma - mb);
        return r;
    }
    r.t = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 / ((va / na) * (va / na) / (na - 1) + (vb / nb) * (vb / nb) / (nb - 1));
    const boost::math::students_t dist(r.df);
    r.p = 2 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
    r.p = std::clamp(r.p, std::numeric_limits<double>::min(), 1.0);
    return r;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double resample_mean(const std::vector<double>& v, std::mt19937_64& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
    double sum = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        sum += v[pick(rng)];
    return sum / static_cast<double>(v.size());
}

} // namespace

BootstrapResult bootstrap_compare(const std::vector<double>& left, const std::vector<double>& right,
                                  std::size_t n_boot, std::uint64_t seed, double alpha)
{
    if (left.empty() || right.empty())
        throw DomainError("bootstrap_compare: both groups must be nonempty");
    if (n_boot < 2)
        throw DomainError("bootstrap_compare: need at least two replicates");
    BootstrapResult res;
    res.degenerate = left.size() == 1 || right.size() == 1;
    Vector ml(static_cast<Eigen::Index>(n_boot)), mr(static_cast<Eigen::Index>(n_boot));
    for (std::size_t b = 0; b < n_boot; ++b) {
        // per-replicate streams keep replicates independent of scheduling
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
        ml[static_cast<Eigen::Index>(b)] = resample_mean(left, rng);
        mr[static_cast<Eigen::Index>(b)] = resample_mean(right, rng);
    }
    res.mean_left = ml.mean();
    res.mean_right = mr.mean();
    const auto w = welch_t_test(ml, mr);
    res.p = w.p;
    res.t = w.t;
    res.df = w.df;
    if (res.p < alpha)
        res.direction = res.mean_left > res.mean_right ? Direction::LeftGreater : Direction::LeftLess;
    return res;
}

double quantile(std::vector<double> x, double q)
{
    if (x.empty())
        throw DomainError("quantile: empty sample");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

} // namespace xpa::stats
