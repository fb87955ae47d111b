#pragma once

#include "xpa/types.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace xpa {

// (sum watch seconds / sum views) / duration over the first at_day days; not clamped.
MaybeMetric avg_watch_percentage(const DailySeries& series, std::int64_t duration_s,
                                 Eigen::Index at_day = 120);

struct EngagementSample
{
    double duration_s;
    double watch_percentage;
};

// Duration axis split into equal-width bins in log scale; each bin keeps the
// sorted watch percentages of the videos that fall into it.
class EngagementMap
{
public:
    static EngagementMap build(std::span<const EngagementSample> samples, std::size_t bins = 1000);

    std::size_t bin_count() const { return bins_.size(); }
    std::size_t bin_of(double duration_s) const;
    double bin_lo(std::size_t bin) const;
    double bin_hi(std::size_t bin) const;
    const std::vector<double>& values(std::size_t bin) const { return bins_.at(bin); }
    double min_duration() const { return min_duration_; }
    double max_duration() const { return max_duration_; }

    // Rank percentile (rank-1)/(n-1) with average ranks for ties; 0.5 for a
    // singleton bin. With query_in_map the value is assumed to be one of the
    // bin's entries; otherwise it is ranked as if inserted.
    MaybeMetric relative_engagement(double duration_s, double watch_percentage, bool query_in_map = true) const;

    void write_csv(std::ostream& out) const;
    static EngagementMap read_csv(std::istream& in, const std::string& source = "engagement_map");

private:
    double min_duration_ = 1;
    double max_duration_ = 1;
    double log_min_ = 0;
    double log_width_ = 0;
    std::vector<std::vector<double>> bins_;
};

} // namespace xpa
