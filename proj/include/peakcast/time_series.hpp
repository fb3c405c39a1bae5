#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peakcast {

// Hours since 1970-01-01T00:00:00 UTC.
using UtcHour = std::int64_t;

inline constexpr int kHoursPerDay = 24;

// Parses "YYYY-MM-DD" to days since epoch; throws on malformed input.
inline std::int64_t parse_date_days(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 ||
        std::sscanf(std::string(text).c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3)
        throw std::invalid_argument("bad date: " + std::string(text));
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::invalid_argument("bad date: " + std::string(text));
    return sys_days(ymd).time_since_epoch().count();
}

inline UtcHour hour_from_date(std::string_view date, int hour_of_day = 0) {
    return parse_date_days(date) * kHoursPerDay + hour_of_day;
}

inline std::string format_date(std::int64_t days) {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

// "YYYY-MM-DDTHH:00:00Z"
inline std::string format_utc_hour(UtcHour h) {
    std::int64_t days = h / kHoursPerDay;
    int hod = static_cast<int>(h % kHoursPerDay);
    if (hod < 0) {
        hod += kHoursPerDay;
        --days;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:00:00Z", format_date(days).c_str(), hod);
    return buf;
}

inline UtcHour parse_utc_hour(std::string_view text) {
    if (text.size() < 13 || text[10] != 'T')
        throw std::invalid_argument("bad hour: " + std::string(text));
    const std::int64_t days = parse_date_days(text.substr(0, 10));
    const int hod = (text[11] - '0') * 10 + (text[12] - '0');
    if (hod < 0 || hod >= kHoursPerDay)
        throw std::invalid_argument("bad hour: " + std::string(text));
    return days * kHoursPerDay + hod;
}

// Gap-free hourly view counts anchored to a UTC start hour. Missing hours
// must be filled with explicit zeros when the series is constructed.
struct TimeSeries {
    UtcHour start = 0;
    std::vector<std::int64_t> counts;

    std::size_t size() const { return counts.size(); }
    bool empty() const { return counts.empty(); }
    UtcHour hour_at(std::size_t i) const { return start + static_cast<UtcHour>(i); }

    // Index of an absolute hour, or -1 when outside the series.
    std::int64_t index_of(UtcHour h) const {
        const std::int64_t i = h - start;
        return (i >= 0 && i < static_cast<std::int64_t>(counts.size())) ? i : -1;
    }

    std::vector<double> as_doubles() const {
        return std::vector<double>(counts.begin(), counts.end());
    }
};

} // namespace peakcast
