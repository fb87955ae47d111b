#include "oracles.hpp"

#include "xpa/stats.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace xpa;
using namespace xpa::stats;

namespace {

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, int levels)
{
    std::vector<double> v(n);
    for (auto& x : v)
        x = static_cast<double>(rng() % static_cast<unsigned>(levels));
    return v;
}

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double mean, double sd)
{
    std::normal_distribution<double> d(mean, sd);
    std::vector<double> v(n);
    for (auto& x : v)
        x = d(rng);
    return v;
}

// P(U >= u_obs) over all C(N, n) splits of the pooled sample.
double enumerate_p_greater(const std::vector<double>& l, const std::vector<double>& r)
{
    std::vector<double> all = l;
    all.insert(all.end(), r.begin(), r.end());
    const auto N = all.size(), n = l.size();
    const double u_obs = oracle::mwu_pairs(l, r);
    double hit = 0, total = 0;
    for (unsigned mask = 0; mask < (1u << N); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n)
            continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < N; ++i)
            ((mask >> i) & 1 ? a : b).push_back(all[i]);
        total += 1;
        hit += oracle::mwu_pairs(a, b) >= u_obs - 1e-12;
    }
    return hit / total;
}

} // namespace

TEST(NormalizedMwu, IdenticalMultisets)
{
    const std::vector<double> a{3, 1, 2, 2}, b{2, 3, 2, 1};
    EXPECT_DOUBLE_EQ(normalized_mwu(view(a), view(b)), 0.5);
}

TEST(NormalizedMwu, WorkedExample)
{
    const std::vector<double> l{3, 2}, r{1, 2};
    EXPECT_DOUBLE_EQ(normalized_mwu(view(l), view(r)), 0.875);
}

TEST(NormalizedMwu, Dominance)
{
    const std::vector<double> l{10, 11, 12}, r{1, 2};
    EXPECT_DOUBLE_EQ(normalized_mwu(view(l), view(r)), 1.0);
    EXPECT_DOUBLE_EQ(normalized_mwu(view(r), view(l)), 0.0);
}

TEST(NormalizedMwu, EmptyOrNonFinite)
{
    const std::vector<double> e, a{1}, bad{std::nan("")};
    EXPECT_THROW(normalized_mwu(view(e), view(a)), DomainError);
    EXPECT_THROW(normalized_mwu(view(a), view(e)), DomainError);
    EXPECT_THROW(normalized_mwu(view(bad), view(a)), DomainError);
}

TEST(NormalizedMwu, PairEnumerationAndAntisymmetry)
{
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 200; ++rep) {
        const auto l = draw(rng, 1 + rng() % 60, 1 + static_cast<int>(rng() % 20));
        const auto r = draw(rng, 1 + rng() % 60, 1 + static_cast<int>(rng() % 20));
        const double u = normalized_mwu(view(l), view(r));
        EXPECT_EQ(u, oracle::mwu_pairs(l, r));
        EXPECT_EQ(u + normalized_mwu(view(r), view(l)), 1.0);
    }
}

TEST(AverageRanks, Ties)
{
    const Vector x = (Vector(5) << 10, 20, 10, 30, 20).finished();
    const Vector r = average_ranks(x);
    EXPECT_EQ(r, (Vector(5) << 1.5, 3.5, 1.5, 5, 3.5).finished());
}

TEST(OneSidedMwu, ExactSeparated)
{
    const std::vector<double> l{1, 2, 3}, r{4, 5, 6};
    const auto g = mwu_one_sided(view(l), view(r), Alternative::Greater);
    const auto s = mwu_one_sided(view(l), view(r), Alternative::Less);
    EXPECT_TRUE(g.exact);
    EXPECT_DOUBLE_EQ(g.p, 1.0);
    EXPECT_DOUBLE_EQ(s.p, 1.0 / 20);
}

TEST(OneSidedMwu, SinglePair)
{
    const std::vector<double> l{2}, r{1};
    EXPECT_DOUBLE_EQ(mwu_one_sided(view(l), view(r), Alternative::Greater).p, 0.5);
}

TEST(OneSidedMwu, AllIdenticalGivesOne)
{
    const std::vector<double> l(30, 4.0), r(40, 4.0), sl(3, 1.0), sr(2, 1.0);
    EXPECT_DOUBLE_EQ(mwu_one_sided(view(l), view(r), Alternative::Greater).p, 1.0);
    EXPECT_DOUBLE_EQ(mwu_one_sided(view(sl), view(sr), Alternative::Less).p, 1.0);
}

TEST(OneSidedMwu, ExactMatchesEnumerationWithTies)
{
    std::mt19937_64 rng(33);
    for (int rep = 0; rep < 60; ++rep) {
        const auto l = draw(rng, 1 + rng() % 6, 4);
        const auto r = draw(rng, 1 + rng() % 6, 4);
        const double p = mwu_one_sided(view(l), view(r), Alternative::Greater).p;
        EXPECT_NEAR(p, enumerate_p_greater(l, r), 1e-12);
        // less is greater with the arguments swapped
        EXPECT_NEAR(mwu_one_sided(view(l), view(r), Alternative::Less).p, enumerate_p_greater(r, l), 1e-12);
    }
}

TEST(OneSidedMwu, NullCaseLargeSample)
{
    std::mt19937_64 rng(44);
    const auto a = gaussian(rng, 2000, 0, 1), b = gaussian(rng, 2000, 0, 1);
    const auto t = mwu_one_sided(view(a), view(b), Alternative::Greater);
    EXPECT_FALSE(t.exact);
    EXPECT_NEAR(t.p, 0.5, 0.45);
    int near_half = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const auto x = gaussian(rng, 300, 0, 1), y = gaussian(rng, 300, 0, 1);
        near_half += std::abs(mwu_one_sided(view(x), view(y), Alternative::Greater).p - 0.5) <= 0.45;
    }
    EXPECT_GE(near_half, 170);
}

TEST(OneSidedMwu, NullMedianIsHalf)
{
    std::mt19937_64 rng(45);
    std::vector<double> ps;
    for (int rep = 0; rep < 400; ++rep) {
        const auto x = gaussian(rng, 200, 0, 1), y = gaussian(rng, 200, 0, 1);
        ps.push_back(mwu_one_sided(view(x), view(y), Alternative::Greater).p);
    }
    EXPECT_NEAR(quantile(ps, 0.5), 0.5, 0.05);
}

TEST(OneSidedMwu, ExactAndNormalAgreeTieFree)
{
    std::mt19937_64 rng(46);
    for (int rep = 0; rep < 40; ++rep) {
        const auto l = gaussian(rng, 15 + rng() % 6, 0.3 * static_cast<double>(rng() % 3), 1);
        const auto r = gaussian(rng, 15 + rng() % 6, 0, 1);
        const auto ex = mwu_one_sided(view(l), view(r), Alternative::Greater, 1000);
        const auto ap = mwu_one_sided(view(l), view(r), Alternative::Greater, 0);
        ASSERT_TRUE(ex.exact);
        ASSERT_FALSE(ap.exact);
        EXPECT_NEAR(ex.p, ap.p, 0.01);
    }
}

TEST(OneSidedMwu, PValueRange)
{
    std::mt19937_64 rng(47);
    for (int rep = 0; rep < 100; ++rep) {
        const auto l = draw(rng, 1 + rng() % 40, 5), r = draw(rng, 1 + rng() % 40, 5);
        for (auto alt : {Alternative::Greater, Alternative::Less}) {
            const double p = mwu_one_sided(view(l), view(r), alt).p;
            EXPECT_GT(p, 0);
            EXPECT_LE(p, 1);
        }
    }
}

TEST(Stars, Thresholds)
{
    EXPECT_EQ(significance_stars(0.0009), "***");
    EXPECT_EQ(significance_stars(0.001), "**");
    EXPECT_EQ(significance_stars(0.009), "**");
    EXPECT_EQ(significance_stars(0.01), "*");
    EXPECT_EQ(significance_stars(0.049), "*");
    EXPECT_EQ(significance_stars(0.05), "");
}

TEST(CompareGroups, DirectionAndUndefined)
{
    std::mt19937_64 rng(50);
    const auto hi = gaussian(rng, 50, 5, 1), lo = gaussian(rng, 50, 0, 1);
    const auto a = compare_groups("m", hi, lo);
    EXPECT_TRUE(a.defined);
    EXPECT_EQ(a.direction, Direction::LeftGreater);
    EXPECT_EQ(a.stars, "***");
    EXPECT_EQ(to_string(a.direction), "L>R");
    const auto b = compare_groups("m", lo, hi);
    EXPECT_EQ(b.direction, Direction::LeftLess);
    EXPECT_NEAR(a.u_bar + b.u_bar, 1.0, 0);
    const auto c = compare_groups("m", {}, hi);
    EXPECT_FALSE(c.defined);
    EXPECT_EQ(c.n, 0u);
    EXPECT_EQ(c.m, 50u);
    const auto d = compare_groups("m", hi, hi);
    EXPECT_EQ(d.direction, Direction::None);
    EXPECT_EQ(d.stars, "");
}

TEST(Accumulation, FinalDayIsHalf)
{
    std::mt19937_64 rng(51);
    std::vector<Vector> left, right;
    for (int i = 0; i < 20; ++i) {
        Vector a = Vector::Zero(150), b = Vector::Zero(150);
        for (int t = 0; t < 150; ++t) {
            a[t] = static_cast<double>(rng() % 9);
            b[t] = static_cast<double>(rng() % 3);
        }
        left.push_back(a);
        right.push_back(b);
    }
    const auto s = accumulation_series(left, right, 119, 125);
    for (const auto& pt : s)
        EXPECT_DOUBLE_EQ(pt.u_bar, 0.5);
}

TEST(Accumulation, EarlyCompletionWins)
{
    std::vector<Vector> left(3, Vector::Zero(120)), right(4, Vector::Zero(120));
    for (auto& v : left)
        v[0] = 10;
    for (auto& v : right)
        v[10] = 10;
    const auto s = accumulation_series(left, right, 0, 0);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_DOUBLE_EQ(s[0].u_bar, 1.0);
}

TEST(Accumulation, MatchesPerDayBruteForceAndCountsDropped)
{
    std::mt19937_64 rng(52);
    std::vector<Vector> left, right;
    for (int i = 0; i < 15; ++i) {
        Vector a(120), b(120);
        for (int t = 0; t < 120; ++t) {
            a[t] = rng() % 4 == 0 ? static_cast<double>(rng() % 50) : 0;
            b[t] = rng() % 6 == 0 ? static_cast<double>(rng() % 50) : 0;
        }
        left.push_back(a);
        right.push_back(b);
    }
    left.push_back(Vector::Zero(120)); // undefined fraction
    const auto s = accumulation_series(left, right, 1, 30);
    ASSERT_EQ(s.size(), 30u);
    for (const auto& pt : s) {
        std::vector<double> l, r;
        for (std::size_t i = 0; i + 1 < left.size(); ++i)
            l.push_back(left[i].head(pt.day + 1).sum() / left[i].sum());
        for (const auto& v : right)
            r.push_back(v.head(pt.day + 1).sum() / v.sum());
        EXPECT_NEAR(pt.u_bar, oracle::mwu_pairs(l, r), 1e-15);
        EXPECT_EQ(pt.dropped, 1u);
        EXPECT_EQ(pt.n, 15u);
    }
}

TEST(Welch, KnownValueAndErrors)
{
    // reference from the textbook formula, df by Welch-Satterthwaite
    const Vector a = (Vector(4) << 1, 2, 3, 4).finished();
    const Vector b = (Vector(3) << 2, 4, 9).finished();
    const auto w = welch_t_test(a, b);
    const double va = 5.0 / 3, vb = 13.0, se2 = va / 4 + vb / 3;
    EXPECT_NEAR(w.t, (2.5 - 5.0) / std::sqrt(se2), 1e-12);
    EXPECT_NEAR(w.df, se2 * se2 / ((va / 4) * (va / 4) / 3 + (vb / 3) * (vb / 3) / 2), 1e-12);
    EXPECT_GT(w.p, 0.2);
    EXPECT_LT(w.p, 0.5);
    const Vector one = Vector::Ones(1);
    EXPECT_THROW(welch_t_test(one, b), DomainError);
    const Vector c = Vector::Constant(3, 2.0);
    EXPECT_DOUBLE_EQ(welch_t_test(c, c).p, 1.0);
}

TEST(Bootstrap, IdenticalGroupsMostlyNone)
{
    std::mt19937_64 rng(60);
    const auto g = gaussian(rng, 40, 0, 1);
    int none = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed)
        none += bootstrap_compare(g, g, 1000, seed).direction == Direction::None;
    EXPECT_GE(none, 90);
}

TEST(Bootstrap, SeparatedGroupsSignificant)
{
    std::mt19937_64 rng(61);
    const auto a = gaussian(rng, 30, 10, 1), b = gaussian(rng, 30, 0, 1);
    const auto r = bootstrap_compare(a, b, 1000, 5);
    EXPECT_LT(r.p, 0.001);
    EXPECT_EQ(r.direction, Direction::LeftGreater);
    EXPECT_FALSE(r.degenerate);
}

TEST(Bootstrap, DeterministicAndDegenerateFlag)
{
    std::mt19937_64 rng(62);
    const auto a = gaussian(rng, 20, 1, 1), b = gaussian(rng, 25, 0, 1);
    const auto x = bootstrap_compare(a, b, 500, 99), y = bootstrap_compare(a, b, 500, 99);
    EXPECT_EQ(x.p, y.p);
    EXPECT_EQ(x.t, y.t);
    EXPECT_EQ(x.mean_left, y.mean_left);
    EXPECT_NE(bootstrap_compare(a, b, 500, 100).mean_left, x.mean_left);
    EXPECT_TRUE(bootstrap_compare({3.0}, b, 100, 1).degenerate);
    EXPECT_THROW(bootstrap_compare({}, b, 100, 1), DomainError);
    EXPECT_THROW(bootstrap_compare(a, b, 1, 1), DomainError);
}

TEST(Quantile, Type7)
{
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.9), 7);
    EXPECT_THROW(quantile({}, 0.5), DomainError);
}
