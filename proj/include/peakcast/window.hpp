#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "peakcast/dump.hpp"
#include "peakcast/event.hpp"
#include "peakcast/time_series.hpp"

namespace peakcast {

// Event windows cover 10 days before and after the event day: 21 days.
inline constexpr int kWindowDays = 21;
inline constexpr int kWindowHours = kWindowDays * kHoursPerDay; // 504
inline constexpr int kPreEventDays = 10;
// The peak is searched within 48 hours from 0:00 UTC on the event date.
inline constexpr int kPeakSearchHours = 48;
// Events whose peak is not strictly above this are dropped by default.
inline constexpr std::int64_t kDefaultPopularityThreshold = 100;
// Windows missing more than this fraction of hours are excluded.
inline constexpr double kMaxMissingFraction = 0.20;

struct WindowQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WindowReport {
    int missing_hours = 0;
};

/// First hour of the 21-day window for an event.
inline UtcHour window_start(const EventRecord& event) {
    return event.event_midnight() - static_cast<UtcHour>(kPreEventDays) * kHoursPerDay;
}

/// Builds the hourly series for an event, summing the article and all its
/// redirects over the 504-hour window. Hours not covered by the source are
/// zero-filled and counted in `report`; more than 20% missing raises
/// WindowQualityError.
inline TimeSeries build_window(const EventRecord& event, const HourlyCountStore& source,
                               WindowReport* report = nullptr) {
    TimeSeries series;
    series.start = window_start(event);
    series.counts.resize(kWindowHours, 0);

    int missing = 0;
    for (int i = 0; i < kWindowHours; ++i) {
        const UtcHour h = series.start + i;
        if (!source.hour_covered(h)) {
            ++missing;
            continue;
        }
        std::int64_t total = source.count_at(event.article, h);
        for (const std::string& redirect : event.redirects)
            total += source.count_at(redirect, h);
        series.counts[i] = total;
    }
    if (report) report->missing_hours = missing;
    if (missing > kMaxMissingFraction * kWindowHours)
        throw WindowQualityError(event.key() + ": " + std::to_string(missing) +
                                 " of " + std::to_string(kWindowHours) +
                                 " hours missing");
    return series;
}

/// Location of the attention peak inside an event window.
struct PeakLocation {
    int t_p = 0;                 // hour index within the window
    std::int64_t peak_value = 0; // views at the peak hour
};

/// Argmax of the series within the 48-hour span starting at 0:00 UTC on the
/// event date; ties break to the earliest hour.
inline PeakLocation locate_peak(const TimeSeries& series, const EventRecord& event) {
    const std::int64_t begin = series.index_of(event.event_midnight());
    if (begin < 0)
        throw std::invalid_argument("locate_peak: series does not cover the event date");
    const std::int64_t end =
        std::min<std::int64_t>(begin + kPeakSearchHours,
                               static_cast<std::int64_t>(series.size()));
    if (end <= begin)
        throw std::invalid_argument("locate_peak: empty search span");

    PeakLocation loc;
    loc.t_p = static_cast<int>(begin);
    loc.peak_value = series.counts[begin];
    for (std::int64_t i = begin + 1; i < end; ++i) {
        if (series.counts[i] > loc.peak_value) {
            loc.peak_value = series.counts[i];
            loc.t_p = static_cast<int>(i);
        }
    }
    return loc;
}

/// Keeps the indices of events whose peak is strictly above the threshold.
inline std::vector<std::size_t> filter_popular(
    const std::vector<PeakLocation>& peaks,
    std::int64_t threshold = kDefaultPopularityThreshold) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < peaks.size(); ++i)
        if (peaks[i].peak_value > threshold) kept.push_back(i);
    return kept;
}

} // namespace peakcast
