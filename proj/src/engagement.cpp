#include "xpa/engagement.hpp"

#include "xpa/csv.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace xpa {

MaybeMetric avg_watch_percentage(const DailySeries& series, std::int64_t duration_s, Eigen::Index at_day)
{
    if (duration_s <= 0)
        return std::nullopt;
    const auto n = std::min(at_day, series.length());
    const double views = series.views.head(n).sum();
    if (!(views > 0))
        return std::nullopt;
    const double watch_seconds = series.watch_minutes.head(n).sum() * 60.0;
    return watch_seconds / views / static_cast<double>(duration_s);
}

EngagementMap EngagementMap::build(std::span<const EngagementSample> samples, std::size_t bins)
{
    if (bins == 0)
        throw DomainError("EngagementMap: bins must be positive");
    std::vector<EngagementSample> valid;
    for (const auto& s : samples)
        if (s.duration_s > 0 && std::isfinite(s.watch_percentage))
            valid.push_back(s);
    if (valid.empty())
        throw DomainError("EngagementMap: no video with a defined watch percentage");

    EngagementMap m;
    auto [lo, hi] = std::minmax_element(valid.begin(), valid.end(),
                                        [](const auto& a, const auto& b) { return a.duration_s < b.duration_s; });
    m.min_duration_ = lo->duration_s;
    m.max_duration_ = hi->duration_s;
    m.log_min_ = std::log(m.min_duration_);
    m.log_width_ = (std::log(m.max_duration_) - m.log_min_) / static_cast<double>(bins);
    m.bins_.assign(bins, {});
    for (const auto& s : valid)
        m.bins_[m.bin_of(s.duration_s)].push_back(s.watch_percentage);
    for (auto& b : m.bins_)
        std::sort(b.begin(), b.end());
    return m;
}

std::size_t EngagementMap::bin_of(double duration_s) const
{
    if (log_width_ <= 0 || !(duration_s > 0))
        return 0;
    const double pos = (std::log(duration_s) - log_min_) / log_width_;
    if (pos <= 0)
        return 0;
    return std::min(static_cast<std::size_t>(pos), bins_.size() - 1);
}

double EngagementMap::bin_lo(std::size_t bin) const
{
    return bin == 0 ? min_duration_ : std::exp(log_min_ + log_width_ * static_cast<double>(bin));
}

double EngagementMap::bin_hi(std::size_t bin) const
{
    return bin + 1 == bins_.size() ? max_duration_ : std::exp(log_min_ + log_width_ * static_cast<double>(bin + 1));
}

MaybeMetric EngagementMap::relative_engagement(double duration_s, double watch_percentage, bool query_in_map) const
{
    if (!std::isfinite(watch_percentage))
        return std::nullopt;
    const auto& v = bins_[bin_of(duration_s)];
    const auto lower = std::lower_bound(v.begin(), v.end(), watch_percentage);
    const auto upper = std::upper_bound(lower, v.end(), watch_percentage);
    const auto less = static_cast<double>(lower - v.begin());
    auto equal = static_cast<double>(upper - lower);
    auto n = static_cast<double>(v.size());
    if (!query_in_map || equal == 0) {
        // rank as if the query were one more entry of the bin
        equal += 1;
        n += 1;
    }
    if (n <= 1)
        return 0.5;
    const double rank = less + (equal + 1) / 2;
    return (rank - 1) / (n - 1);
}

void EngagementMap::write_csv(std::ostream& out) const
{
    out << "bin_index,lo,hi,sorted_values...\n";
    for (std::size_t b = 0; b < bins_.size(); ++b) {
        out << b << ',' << format_double(bin_lo(b)) << ',' << format_double(bin_hi(b));
        for (double v : bins_[b])
            out << ',' << format_double(v);
        out << '\n';
    }
}

EngagementMap EngagementMap::read_csv(std::istream& in, const std::string& source)
{
    csv::Reader r(in, source);
    csv::Row row;
    if (!r.next(row) || row.fields.empty() || row.fields[0] != "bin_index")
        throw InputError(source + ": missing engagement map header");
    EngagementMap m;
    while (r.next(row)) {
        if (row.fields.size() < 3)
            r.fail(row.line, "expected at least bin_index,lo,hi");
        const auto idx = static_cast<std::size_t>(csv::parse_int(row.fields[0], r, row.line));
        if (idx != m.bins_.size())
            r.fail(row.line, "bin indices must be consecutive from 0");
        if (idx == 0)
            m.min_duration_ = csv::parse_double(row.fields[1], r, row.line);
        m.max_duration_ = csv::parse_double(row.fields[2], r, row.line);
        std::vector<double> values;
        for (std::size_t i = 3; i < row.fields.size(); ++i)
            values.push_back(csv::parse_double(row.fields[i], r, row.line));
        if (!std::is_sorted(values.begin(), values.end()))
            r.fail(row.line, "bin values must be sorted");
        m.bins_.push_back(std::move(values));
    }
    if (m.bins_.empty())
        throw InputError(source + ": no bins");
    m.log_min_ = std::log(m.min_duration_);
    m.log_width_ = (std::log(m.max_duration_) - m.log_min_) / static_cast<double>(m.bins_.size());
    return m;
}

} // namespace xpa
