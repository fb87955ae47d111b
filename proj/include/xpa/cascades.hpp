#pragma once

#include "xpa/attention.hpp"
#include "xpa/types.hpp"

#include <array>
#include <span>

namespace xpa {

enum class SizeClass
{
    Isolated, // 1 tweet
    Small,    // 2-4
    Large     // >= 5
};

std::string to_string(SizeClass c);
SizeClass size_class_of(std::size_t size);

struct Cascade
{
    std::string root_tweet_id;
    std::vector<std::string> members; // root first, then in tweet order
    Timestamp root_time;
    SizeClass size_class = SizeClass::Isolated;
    bool truncated = false; // some member falls after the observation window

    std::size_t size() const { return members.size(); }
};

// Attaches every non-original to the cascade of its recorded parent. A tweet
// whose parent is not in `tweets` roots its own cascade. Output is sorted by
// root tweet order and does not depend on input order. A parent cycle throws
// InputError. If `publish` is given, cascades with a member on or after day
// `horizon` are flagged truncated.
std::vector<Cascade> build_cascades(std::span<const TweetRecord> tweets,
                                    std::optional<Timestamp> publish = std::nullopt,
                                    std::int64_t horizon = kHorizonDays);

struct GroupFractions
{
    std::array<double, 3> cascades{}; // indexed by SizeClass
    std::array<double, 3> tweets{};
};

GroupFractions group_fractions(std::span<const Cascade> cascades);

// Fraction of the horizon's total views accumulated when `root_time` occurs,
// interpolating linearly within the root's calendar day (day 0 runs from the
// publish instant to the end of the publish date).
double cascade_start_time(Timestamp root_time, Timestamp publish, const Eigen::Ref<const Vector>& views,
                          Eigen::Index horizon = kHorizonDays);

} // namespace xpa
