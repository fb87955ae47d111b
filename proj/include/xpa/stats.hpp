#pragma once

#include "xpa/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xpa::stats {

using Sample = Eigen::Ref<const Vector>;

inline Eigen::Map<const Vector> view(const std::vector<double>& v)
{
    return {v.data(), static_cast<Eigen::Index>(v.size())};
}

// Average ranks (1-based) of the entries of x; ties share the mean rank.
Vector average_ranks(const Sample& x);

// Fraction of (l, r) pairs with l > r, ties counted as half.
double normalized_mwu(const Sample& left, const Sample& right);

enum class Alternative
{
    Greater, // left tends to be larger
    Less
};

struct MwuTest
{
    double u = 0;     // Mann-Whitney U of the left sample
    double p = 1;     // one-sided p-value
    bool exact = false;
};

// Exact permutation distribution (ties included) when n*m <= exact_limit;
// otherwise normal approximation with tie-corrected variance and continuity correction.
MwuTest mwu_one_sided(const Sample& left, const Sample& right, Alternative alt, std::size_t exact_limit = 400);

enum class Direction
{
    LeftGreater,
    LeftLess,
    None
};

std::string to_string(Direction d);

// "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, else "".
std::string significance_stars(double p);

struct ComparisonResult
{
    std::string metric;
    std::size_t n = 0; // left sample size
    std::size_t m = 0; // right sample size
    bool defined = false;
    double u_bar = 0.5;
    double p = 1;       // smaller of the two one-sided p-values
    double p_greater = 1;
    double p_less = 1;
    Direction direction = Direction::None;
    std::string stars;
};

// Both one-sided tests; direction decided at `alpha`. Empty groups yield an
// undefined row rather than an error.
ComparisonResult compare_groups(const std::string& metric, const std::vector<double>& left,
                                const std::vector<double>& right, double alpha = 0.05);

struct AccumulationPoint
{
    Eigen::Index day = 0;
    double u_bar = 0.5;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t dropped = 0; // videos with an undefined fraction on that day
};

// Per day t, normalized MWU over per-video accumulation fractions.
std::vector<AccumulationPoint> accumulation_series(const std::vector<Vector>& left, const std::vector<Vector>& right,
                                                   Eigen::Index first_day, Eigen::Index last_day,
                                                   Eigen::Index horizon = 120);

struct BootstrapResult
{
    double p = 1;
    double t = 0;
    double df = 0;
    double mean_left = 0;  // mean of bootstrap means
    double mean_right = 0;
    Direction direction = Direction::None;
    bool degenerate = false; // a group had a single element
};

// Resamples each group with replacement n_boot times, then Welch's t-test on
// the two collections of resample means (two-sided p).
BootstrapResult bootstrap_compare(const std::vector<double>& left, const std::vector<double>& right,
                                  std::size_t n_boot, std::uint64_t seed, double alpha = 0.05);

// Welch's unequal-variance t-test, two-sided.
struct WelchResult
{
    double t = 0;
    double df = 0;
    double p = 1;
};
WelchResult welch_t_test(const Sample& a, const Sample& b);

// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> x, double q);

} // namespace xpa::stats
