#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "peakcast/csv.hpp"
#include "peakcast/time_series.hpp"

namespace peakcast {

enum class MatchResult { win, draw, lose };
enum class MatchStage { group, knockout, final_match };

inline const char* to_string(MatchResult r) {
    switch (r) {
        case MatchResult::win: return "win";
        case MatchResult::draw: return "draw";
        case MatchResult::lose: return "lose";
    }
    return "?";
}

inline const char* to_string(MatchStage s) {
    switch (s) {
        case MatchStage::group: return "group";
        case MatchStage::knockout: return "knockout";
        case MatchStage::final_match: return "final";
    }
    return "?";
}

inline std::optional<MatchResult> parse_match_result(std::string_view s) {
    if (s == "win") return MatchResult::win;
    if (s == "draw") return MatchResult::draw;
    if (s == "lose") return MatchResult::lose;
    return std::nullopt;
}

inline std::optional<MatchStage> parse_match_stage(std::string_view s) {
    if (s == "group") return MatchStage::group;
    if (s == "knockout") return MatchStage::knockout;
    if (s == "final") return MatchStage::final_match;
    return std::nullopt;
}

/// Optional outcome metadata carried by football records.
struct EventOutcome {
    std::optional<MatchResult> result;
    std::optional<MatchStage> stage;
    std::string opponent; // opponent article title, empty when absent
};

/// One row of the event manifest.
struct EventRecord {
    std::string article;            // canonical page title
    std::vector<std::string> redirects;
    std::string category;           // election, sports, football, film, holiday, ...
    std::string event_date;         // ISO-8601 calendar date
    EventOutcome outcome;

    UtcHour event_midnight() const { return hour_from_date(event_date); }

    // A stable display key: article plus date.
    std::string key() const { return article + "@" + event_date; }
};

inline constexpr std::string_view kManifestHeader =
    "article,redirects,category,event_date,result,stage,opponent";

struct ManifestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a manifest CSV. Lines starting with '#' are skipped. Throws
/// ManifestError naming the offending columns when the header is wrong.
inline std::vector<EventRecord> parse_manifest(const std::vector<std::string>& lines) {
    std::vector<EventRecord> events;
    bool header_seen = false;
    const std::vector<std::string> expected =
        split_csv_line(kManifestHeader);
    for (const std::string& line : lines) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            std::string missing;
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (i >= f.size() || f[i] != expected[i]) {
                    if (!missing.empty()) missing += ", ";
                    missing += expected[i];
                }
            }
            if (!missing.empty())
                throw ManifestError("manifest header missing/misplaced columns: " + missing);
            continue;
        }
        if (f.size() < 7) throw ManifestError("manifest row with fewer than 7 columns: " + line);
        EventRecord e;
        e.article = f[0];
        if (e.article.empty()) throw ManifestError("manifest row with empty article: " + line);
        if (!f[1].empty()) {
            std::stringstream ss(f[1]);
            std::string part;
            while (std::getline(ss, part, '|'))
                if (!part.empty()) e.redirects.push_back(part);
        }
        e.category = f[2];
        e.event_date = f[3];
        parse_date_days(e.event_date); // validate
        if (!f[4].empty()) {
            e.outcome.result = parse_match_result(f[4]);
            if (!e.outcome.result) throw ManifestError("bad result value: " + f[4]);
        }
        if (!f[5].empty()) {
            e.outcome.stage = parse_match_stage(f[5]);
            if (!e.outcome.stage) throw ManifestError("bad stage value: " + f[5]);
        }
        e.outcome.opponent = f[6];
        events.push_back(std::move(e));
    }
    if (!header_seen) throw ManifestError("manifest is empty (no header)");
    return events;
}

inline std::string manifest_row(const EventRecord& e) {
    std::string redirects;
    for (std::size_t i = 0; i < e.redirects.size(); ++i) {
        if (i) redirects += "|";
        redirects += e.redirects[i];
    }
    return join_csv_line({e.article, redirects, e.category, e.event_date,
                          e.outcome.result ? to_string(*e.outcome.result) : "",
                          e.outcome.stage ? to_string(*e.outcome.stage) : "",
                          e.outcome.opponent});
}

} // namespace peakcast
