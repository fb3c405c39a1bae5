#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <zlib.h>

#include "peakcast/time_series.hpp"

namespace peakcast {

/// One parsed record of an hourly pageview dump line.
struct DumpRecord {
    std::string domain;
    std::string title;
    std::int64_t count = 0;
};

/// Parses one whitespace-separated dump record "domain title count bytes".
/// Returns the record when the domain matches `project`, std::nullopt when it
/// does not. Malformed lines raise `malformed` instead of returning.
struct DumpParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::optional<DumpRecord> parse_dump_line(std::string_view line,
                                                 std::string_view project) {
    std::array<std::string_view, 4> fields;
    std::size_t nfields = 0;
    std::size_t pos = 0;
    while (pos < line.size() && nfields < 4) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        fields[nfields++] = line.substr(pos, end - pos);
        pos = end;
    }
    if (nfields < 4) throw DumpParseError("short dump line: " + std::string(line));
    if (fields[0] != project) return std::nullopt;

    DumpRecord rec;
    rec.domain = std::string(fields[0]);
    rec.title = std::string(fields[1]);
    std::int64_t count = 0;
    for (char c : fields[2]) {
        if (c < '0' || c > '9')
            throw DumpParseError("bad count in dump line: " + std::string(line));
        count = count * 10 + (c - '0');
    }
    rec.count = count;
    return rec;
}

/// Accumulated hourly counts per title, plus the set of hours that were
/// actually covered by loaded input. Hours outside the covered set are
/// "missing" rather than zero. Merging is associative and commutative, so
/// dump files may be ingested in any order (or concurrently, with a final
/// single-threaded merge).
class HourlyCountStore {
public:
    void add(const std::string& title, UtcHour hour, std::int64_t count) {
        counts_[title][hour] += count;
    }

    void mark_hour_covered(UtcHour hour) { covered_.insert(hour); }

    bool hour_covered(UtcHour hour) const { return covered_.count(hour) != 0; }

    std::int64_t count_at(const std::string& title, UtcHour hour) const {
        auto it = counts_.find(title);
        if (it == counts_.end()) return 0;
        auto jt = it->second.find(hour);
        return jt == it->second.end() ? 0 : jt->second;
    }

    std::size_t titles() const { return counts_.size(); }
    std::size_t covered_hours() const { return covered_.size(); }

    // Serializable merge point for concurrent ingestion.
    void merge(const HourlyCountStore& other) {
        for (const auto& [title, hours] : other.counts_)
            for (const auto& [hour, count] : hours) counts_[title][hour] += count;
        covered_.insert(other.covered_.begin(), other.covered_.end());
    }

private:
    std::unordered_map<std::string, std::unordered_map<UtcHour, std::int64_t>> counts_;
    std::unordered_set<UtcHour> covered_;
};

/// Extracts the UTC hour from a Wikimedia hourly dump filename of the form
/// "pageviews-YYYYMMDD-HH0000" with optional ".gz"; nullopt when the name
/// does not match.
inline std::optional<UtcHour> hour_from_dump_filename(std::string_view name) {
    const std::size_t slash = name.find_last_of('/');
    if (slash != std::string_view::npos) name = name.substr(slash + 1);
    if (name.size() >= 3 && name.substr(name.size() - 3) == ".gz")
        name = name.substr(0, name.size() - 3);
    constexpr std::string_view prefix = "pageviews-";
    if (name.size() != prefix.size() + 15 || name.substr(0, prefix.size()) != prefix)
        return std::nullopt;
    const std::string_view stamp = name.substr(prefix.size()); // YYYYMMDD-HH0000
    if (stamp[8] != '-') return std::nullopt;
    for (std::size_t i : {0u, 1u, 2u, 3u, 4u, 5u, 6u, 7u, 9u, 10u, 11u, 12u, 13u, 14u})
        if (stamp[i] < '0' || stamp[i] > '9') return std::nullopt;
    auto num = [&](std::size_t off, std::size_t len) {
        int v = 0;
        for (std::size_t i = 0; i < len; ++i) v = v * 10 + (stamp[off + i] - '0');
        return v;
    };
    const int hour = num(9, 2);
    if (hour >= kHoursPerDay) return std::nullopt;
    char date[11];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", num(0, 4), num(4, 2), num(6, 2));
    try {
        return hour_from_date(date, hour);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

struct DumpLoadStats {
    std::size_t lines = 0;
    std::size_t matched = 0;
    std::size_t malformed = 0;
};

/// Loads one dump file (plain or gzip; zlib reads both transparently) into
/// the store, keeping only `project` lines restricted to `titles`. Malformed
/// lines are counted and skipped, never fatal.
inline DumpLoadStats load_dump_file(const std::string& path, UtcHour hour,
                                    std::string_view project,
                                    const std::set<std::string>& titles,
                                    HourlyCountStore& store) {
    gzFile file = gzopen(path.c_str(), "rb");
    if (!file) throw std::runtime_error("cannot open dump file: " + path);

    DumpLoadStats stats;
    std::string line;
    std::vector<char> buf(1 << 16);
    while (gzgets(file, buf.data(), static_cast<int>(buf.size())) != nullptr) {
        line.assign(buf.data());
        while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
            line.pop_back();
        if (line.empty()) continue;
        ++stats.lines;
        try {
            if (auto rec = parse_dump_line(line, project)) {
                if (titles.empty() || titles.count(rec->title)) {
                    store.add(rec->title, hour, rec->count);
                    ++stats.matched;
                }
            }
        } catch (const DumpParseError&) {
            ++stats.malformed;
        }
    }
    gzclose(file);
    store.mark_hour_covered(hour);
    return stats;
}

} // namespace peakcast
