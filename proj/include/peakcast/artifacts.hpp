#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "peakcast/csv.hpp"
#include "peakcast/event.hpp"
#include "peakcast/peak_fit.hpp"
#include "peakcast/powerlaw.hpp"
#include "peakcast/spikem.hpp"
#include "peakcast/time_series.hpp"

namespace peakcast {

// ---------------------------------------------------------------------------
// Config hashing: every artifact embeds the hash of the options that made it.

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// File naming: deterministic, filesystem-safe, collision-free.

inline std::string sanitize_title(std::string_view title) {
    std::string out;
    for (char c : title.substr(0, 80)) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
        out.push_back(ok ? c : '_');
    }
    return out;
}

inline std::string series_filename(const EventRecord& e) {
    return sanitize_title(e.article) + "__" + e.event_date + "__" +
           hash_hex(fnv1a64(e.key())).substr(8) + ".csv";
}

// ---------------------------------------------------------------------------
// Series cache: one CSV per event, header `utc_hour,views`. Lines starting
// with '#' carry metadata and are skipped on read. Absent hours are missing
// (not zero); zeros are written explicitly.

inline void write_series_csv(const std::string& path, const TimeSeries& series,
                             const std::string& config_hash) {
    std::ostringstream out;
    out << "# config_hash=" << config_hash << "\n";
    out << "utc_hour,views\n";
    for (std::size_t i = 0; i < series.size(); ++i)
        out << format_utc_hour(series.hour_at(i)) << "," << series.counts[i] << "\n";
    write_text_file(path, out.str());
}

/// Sparse read: hour -> views for every data row in the file.
inline std::map<UtcHour, std::int64_t> read_series_csv(const std::string& path) {
    std::map<UtcHour, std::int64_t> rows;
    bool header_seen = false;
    for (const std::string& line : read_lines(path)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("utc_hour,views", 0) != 0)
                throw std::runtime_error(path + ": bad series header");
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 2) throw std::runtime_error(path + ": bad series row: " + line);
        rows[parse_utc_hour(f[0])] = std::stoll(f[1]);
    }
    if (!header_seen) throw std::runtime_error(path + ": empty series file");
    return rows;
}

// ---------------------------------------------------------------------------
// Fit records, serialized as JSON lines keyed by article and event date. The
// first line of each file is a meta record carrying the config hash.

struct FitRecord {
    std::string article;
    std::string event_date;
    std::string category;
    PeakFit fit;

    std::string key() const { return article + "@" + event_date; }
};

inline nlohmann::json to_meta(const std::string& kind, const std::string& config_hash,
                              std::uint64_t seed) {
    return nlohmann::json{{"meta", kind}, {"config_hash", config_hash}, {"seed", seed}};
}

inline nlohmann::json fit_record_json(const FitRecord& r) {
    nlohmann::json j{{"article", r.article},
                     {"event_date", r.event_date},
                     {"category", r.category},
                     {"params", r.fit.params},
                     {"residual_variance", r.fit.residual_variance},
                     {"converged", r.fit.converged},
                     {"n_points", r.fit.n_points}};
    if (std::isfinite(r.fit.r2)) j["r2"] = r.fit.r2;
    else j["r2"] = nullptr;
    return j;
}

inline FitRecord fit_record_from_json(const nlohmann::json& j) {
    FitRecord r;
    j.at("article").get_to(r.article);
    j.at("event_date").get_to(r.event_date);
    j.at("category").get_to(r.category);
    r.fit.params = j.at("params").get<PeakParams>();
    r.fit.r2 = j.at("r2").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : j.at("r2").get<double>();
    j.at("residual_variance").get_to(r.fit.residual_variance);
    j.at("converged").get_to(r.fit.converged);
    j.at("n_points").get_to(r.fit.n_points);
    return r;
}

inline void write_jsonl(const std::string& path, const nlohmann::json& meta,
                        const std::vector<nlohmann::json>& records) {
    std::ostringstream out;
    out << meta.dump() << "\n";
    for (const nlohmann::json& r : records) out << r.dump() << "\n";
    write_text_file(path, out.str());
}

/// All non-meta records of a JSON-lines file.
inline std::vector<nlohmann::json> read_jsonl(const std::string& path) {
    std::vector<nlohmann::json> records;
    for (const std::string& line : read_lines(path)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        if (j.contains("meta")) continue;
        records.push_back(std::move(j));
    }
    return records;
}

inline void write_fit_records(const std::string& path,
                              const std::vector<FitRecord>& fits,
                              const std::string& config_hash, std::uint64_t seed) {
    std::vector<nlohmann::json> records;
    records.reserve(fits.size());
    for (const FitRecord& f : fits) records.push_back(fit_record_json(f));
    write_jsonl(path, to_meta("fits", config_hash, seed), records);
}

inline std::vector<FitRecord> read_fit_records(const std::string& path) {
    std::vector<FitRecord> fits;
    for (const nlohmann::json& j : read_jsonl(path))
        fits.push_back(fit_record_from_json(j));
    return fits;
}

// Baseline fit records share the key fields and carry their own parameters.

struct SpikeMFitRecord {
    std::string article, event_date, category;
    SpikeMParams params;
    double r2 = std::numeric_limits<double>::quiet_NaN();
    bool converged = false;
};

inline nlohmann::json spikem_record_json(const SpikeMFitRecord& r) {
    return nlohmann::json{{"article", r.article},
                          {"event_date", r.event_date},
                          {"category", r.category},
                          {"u0", r.params.u0},
                          {"beta", r.params.beta},
                          {"t_b", r.params.t_b},
                          {"s_b", r.params.s_b},
                          {"eps0", r.params.eps0},
                          {"p_a", r.params.p_a},
                          {"p_s", r.params.p_s},
                          {"r2", std::isfinite(r.r2) ? nlohmann::json(r.r2)
                                                     : nlohmann::json(nullptr)},
                          {"converged", r.converged}};
}

inline SpikeMFitRecord spikem_record_from_json(const nlohmann::json& j) {
    SpikeMFitRecord r;
    j.at("article").get_to(r.article);
    j.at("event_date").get_to(r.event_date);
    j.at("category").get_to(r.category);
    j.at("u0").get_to(r.params.u0);
    j.at("beta").get_to(r.params.beta);
    j.at("t_b").get_to(r.params.t_b);
    j.at("s_b").get_to(r.params.s_b);
    j.at("eps0").get_to(r.params.eps0);
    j.at("p_a").get_to(r.params.p_a);
    j.at("p_s").get_to(r.params.p_s);
    r.r2 = j.at("r2").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                : j.at("r2").get<double>();
    j.at("converged").get_to(r.converged);
    return r;
}

struct PowerLawFitRecord {
    std::string article, event_date, category;
    PowerLawParams params;
    double r2 = std::numeric_limits<double>::quiet_NaN();
};

inline nlohmann::json powerlaw_record_json(const PowerLawFitRecord& r) {
    return nlohmann::json{{"article", r.article},
                          {"event_date", r.event_date},
                          {"category", r.category},
                          {"a_minus", r.params.a_minus},
                          {"gamma_minus", r.params.gamma_minus},
                          {"a_plus", r.params.a_plus},
                          {"gamma_plus", r.params.gamma_plus},
                          {"r2", std::isfinite(r.r2) ? nlohmann::json(r.r2)
                                                     : nlohmann::json(nullptr)}};
}

inline PowerLawFitRecord powerlaw_record_from_json(const nlohmann::json& j) {
    PowerLawFitRecord r;
    j.at("article").get_to(r.article);
    j.at("event_date").get_to(r.event_date);
    j.at("category").get_to(r.category);
    j.at("a_minus").get_to(r.params.a_minus);
    j.at("gamma_minus").get_to(r.params.gamma_minus);
    j.at("a_plus").get_to(r.params.a_plus);
    j.at("gamma_plus").get_to(r.params.gamma_plus);
    r.r2 = j.at("r2").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                : j.at("r2").get<double>();
    return r;
}

// Ground-truth records emitted by the synthesizer.

struct TruthRecord {
    std::string article, event_date, category;
    PeakParams params;
};

inline nlohmann::json truth_record_json(const TruthRecord& r) {
    return nlohmann::json{{"article", r.article},
                          {"event_date", r.event_date},
                          {"category", r.category},
                          {"params", r.params}};
}

inline TruthRecord truth_record_from_json(const nlohmann::json& j) {
    TruthRecord r;
    j.at("article").get_to(r.article);
    j.at("event_date").get_to(r.event_date);
    j.at("category").get_to(r.category);
    r.params = j.at("params").get<PeakParams>();
    return r;
}

} // namespace peakcast
