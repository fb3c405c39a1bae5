#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "peakcast/ami.hpp"
#include "peakcast/artifacts.hpp"
#include "peakcast/cumulative_lr.hpp"
#include "peakcast/features.hpp"
#include "peakcast/forecast.hpp"
#include "peakcast/gmm.hpp"
#include "peakcast/parallel.hpp"
#include "peakcast/peak_fit.hpp"
#include "peakcast/powerlaw.hpp"
#include "peakcast/priors.hpp"
#include "peakcast/region_mix.hpp"
#include "peakcast/spikem.hpp"
#include "peakcast/svm.hpp"
#include "peakcast/synthetic.hpp"

namespace peakcast {

namespace fs = std::filesystem;

/// Bad flags, schemas, or missing upstream artifacts. CLI exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unusable data (quality rules violated). CLI exit code 2.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// NumericError (exit code 3) lives with the numerics in gmm.hpp.

// ---------------------------------------------------------------------------
// Common configuration

struct CommonConfig {
    std::string out_dir;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

namespace detail {

inline void ensure_dir(const std::string& path) {
    std::error_code ec;
    fs::create_directories(path, ec);
    if (ec) throw UsageError("cannot create directory " + path + ": " + ec.message());
}

inline std::string config_hash(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
        s += k;
        s += '=';
        s += v;
        s += ';';
    }
    return hash_hex(fnv1a64(s));
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline std::vector<EventRecord> load_manifest(const std::string& path) {
    if (path.empty()) throw UsageError("missing --manifest");
    if (!fs::exists(path)) throw UsageError("manifest not found: " + path);
    try {
        return parse_manifest(read_lines(path));
    } catch (const ManifestError& e) {
        throw UsageError(std::string("manifest schema error: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("manifest value error: ") + e.what());
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Shared event loading

struct LoadedEvent {
    EventRecord record;
    TimeSeries series;
    PeakLocation peak;
};

struct Exclusion {
    std::string event;
    std::string reason;
};

/// Materializes the 504-hour window of an event from sparse cached rows.
/// Absent hours are missing; more than the allowed fraction raises
/// WindowQualityError.
inline TimeSeries window_from_rows(const EventRecord& event,
                                   const std::map<UtcHour, std::int64_t>& rows,
                                   WindowReport* report = nullptr) {
    TimeSeries series;
    series.start = window_start(event);
    series.counts.resize(kWindowHours, 0);
    int missing = 0;
    for (int i = 0; i < kWindowHours; ++i) {
        auto it = rows.find(series.start + i);
        if (it == rows.end()) ++missing;
        else series.counts[i] = it->second;
    }
    if (report) report->missing_hours = missing;
    if (missing > kMaxMissingFraction * kWindowHours)
        throw WindowQualityError(event.key() + ": " + std::to_string(missing) +
                                 " of " + std::to_string(kWindowHours) +
                                 " hours missing");
    return series;
}

/// Loads every manifest event whose cached series exists and passes the
/// quality gate; failures are collected, not fatal.
inline std::vector<LoadedEvent> load_events(const std::vector<EventRecord>& manifest,
                                            const std::string& series_dir,
                                            std::vector<Exclusion>& exclusions) {
    if (series_dir.empty()) throw UsageError("missing --series-dir");
    std::vector<LoadedEvent> out;
    for (const EventRecord& e : manifest) {
        const std::string path = series_dir + "/" + series_filename(e);
        if (!fs::exists(path)) {
            exclusions.push_back({e.key(), "series file missing"});
            continue;
        }
        try {
            LoadedEvent le;
            le.record = e;
            le.series = window_from_rows(e, read_series_csv(path));
            le.peak = locate_peak(le.series, e);
            out.push_back(std::move(le));
        } catch (const WindowQualityError& err) {
            exclusions.push_back({e.key(), err.what()});
        } catch (const std::exception& err) {
            exclusions.push_back({e.key(), std::string("unreadable series: ") + err.what()});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// synth

struct SynthConfig : CommonConfig {
    std::string kind = "events"; // events | football
    int n_events = 100;          // per category, or matches for football
    std::string spec_json;       // optional spec file for the events kind
};

namespace detail {

inline LogNormalSpec lognormal_from_json(const nlohmann::json& j) {
    return {j.at("log_median").get<double>(), j.at("log_sd").get<double>()};
}

inline SyntheticSpec spec_from_json(const nlohmann::json& j) {
    SyntheticSpec spec;
    if (j.contains("peak_offset_min")) j.at("peak_offset_min").get_to(spec.peak_offset_min);
    if (j.contains("peak_offset_max")) j.at("peak_offset_max").get_to(spec.peak_offset_max);
    if (j.contains("base_date")) j.at("base_date").get_to(spec.base_date);
    for (const nlohmann::json& cj : j.at("categories")) {
        CategorySpec c;
        cj.at("name").get_to(c.name);
        c.a_minus = lognormal_from_json(cj.at("a_minus"));
        c.b_minus = lognormal_from_json(cj.at("b_minus"));
        c.tau_minus = lognormal_from_json(cj.at("tau_minus"));
        auto link = [&](const char* key) -> std::optional<ResponseLink> {
            if (!cj.contains(key)) return std::nullopt;
            const nlohmann::json& lj = cj.at(key);
            return ResponseLink{lj.at("c").get<double>(), lj.at("d").get<double>(),
                                lj.at("sigma").get<double>()};
        };
        c.link_a = link("link_a");
        c.link_b = link("link_b");
        c.link_tau = link("link_tau");
        if (cj.contains("a_plus")) c.a_plus = lognormal_from_json(cj.at("a_plus"));
        if (cj.contains("b_plus")) c.b_plus = lognormal_from_json(cj.at("b_plus"));
        if (cj.contains("tau_plus")) c.tau_plus = lognormal_from_json(cj.at("tau_plus"));
        if (cj.contains("alpha_c"))
            c.alpha_c = {cj.at("alpha_c").at("lo").get<double>(),
                         cj.at("alpha_c").at("hi").get<double>()};
        if (cj.contains("peak_spike_factor"))
            cj.at("peak_spike_factor").get_to(c.peak_spike_factor);
        spec.categories.push_back(std::move(c));
    }
    return spec;
}

} // namespace detail

struct SynthSummary {
    int n_events = 0;
    std::string config_hash;
};

inline SynthSummary cmd_synth(const SynthConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    if (cfg.n_events < 0) throw UsageError("negative --n-events");

    const std::string hash = detail::config_hash({{"cmd", "synth"},
                                                  {"kind", cfg.kind},
                                                  {"n", std::to_string(cfg.n_events)},
                                                  {"seed", std::to_string(cfg.seed)},
                                                  {"spec", cfg.spec_json}});
    std::vector<SyntheticEvent> corpus;
    try {
        if (cfg.kind == "events") {
            SyntheticSpec spec = default_synthetic_spec();
            if (!cfg.spec_json.empty()) {
                nlohmann::json j = nlohmann::json::parse(read_lines(cfg.spec_json).empty()
                                                             ? std::string("{}")
                                                             : [&] {
                                                                   std::string all;
                                                                   for (const auto& l :
                                                                        read_lines(cfg.spec_json))
                                                                       all += l + "\n";
                                                                   return all;
                                                               }());
                spec = detail::spec_from_json(j);
            }
            corpus = generate_synthetic_corpus(spec, cfg.n_events, cfg.seed);
        } else if (cfg.kind == "football") {
            corpus = generate_football_corpus(FootballSpec{}, cfg.n_events, cfg.seed);
        } else {
            throw UsageError("unknown --synth-kind: " + cfg.kind);
        }
    } catch (const ConfigError& e) {
        throw UsageError(std::string("bad synthesis spec: ") + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad synthesis spec json: ") + e.what());
    }

    detail::ensure_dir(cfg.out_dir);
    detail::ensure_dir(cfg.out_dir + "/series");

    std::ostringstream manifest;
    manifest << "# config_hash=" << hash << "\n" << kManifestHeader << "\n";
    std::vector<nlohmann::json> truth;
    for (const SyntheticEvent& ev : corpus) {
        manifest << manifest_row(ev.record) << "\n";
        write_series_csv(cfg.out_dir + "/series/" + series_filename(ev.record),
                         ev.series, hash);
        truth.push_back(truth_record_json(
            {ev.record.article, ev.record.event_date, ev.record.category, ev.truth}));
    }
    write_text_file(cfg.out_dir + "/manifest.csv", manifest.str());
    write_jsonl(cfg.out_dir + "/truth.jsonl", to_meta("truth", hash, cfg.seed), truth);

    detail::write_json_file(cfg.out_dir + "/synth_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"kind", cfg.kind},
                             {"n_events", corpus.size()}});
    SynthSummary s;
    s.n_events = static_cast<int>(corpus.size());
    s.config_hash = hash;
    return s;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestConfig : CommonConfig {
    std::string manifest;
    std::string dump_dir;   // exclusive with series_dir
    std::string series_dir; // pre-cached per-event series
    std::string project = "en";
    std::int64_t min_peak_views = kDefaultPopularityThreshold;
};

struct IngestSummary {
    int total = 0;
    int retained = 0;
    std::vector<Exclusion> exclusions;
    std::string config_hash;
};

inline IngestSummary cmd_ingest(const IngestConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    if (cfg.dump_dir.empty() == cfg.series_dir.empty())
        throw UsageError("exactly one of --dump-dir and --series-dir is required");

    const std::vector<EventRecord> manifest = detail::load_manifest(cfg.manifest);
    const std::string hash =
        detail::config_hash({{"cmd", "ingest"},
                             {"manifest", cfg.manifest},
                             {"dump_dir", cfg.dump_dir},
                             {"series_dir", cfg.series_dir},
                             {"project", cfg.project},
                             {"threshold", std::to_string(cfg.min_peak_views)},
                             {"seed", std::to_string(cfg.seed)}});

    IngestSummary summary;
    summary.total = static_cast<int>(manifest.size());
    summary.config_hash = hash;

    std::vector<LoadedEvent> loaded;
    if (!cfg.dump_dir.empty()) {
        // Collect hourly dump files; the filename carries the hour.
        std::vector<std::pair<UtcHour, std::string>> files;
        for (const auto& entry : fs::directory_iterator(cfg.dump_dir)) {
            if (!entry.is_regular_file()) continue;
            if (auto hour = hour_from_dump_filename(entry.path().filename().string()))
                files.emplace_back(*hour, entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no hourly dump files in " + cfg.dump_dir);

        std::set<std::string> titles;
        for (const EventRecord& e : manifest) {
            titles.insert(e.article);
            titles.insert(e.redirects.begin(), e.redirects.end());
        }

        // Parse files in parallel; merge in filename order (a serializable,
        // order-independent reduction either way since merge is commutative).
        std::vector<HourlyCountStore> partial(files.size());
        parallel_for_index(
            files.size(),
            [&](std::size_t i) {
                load_dump_file(files[i].second, files[i].first, cfg.project, titles,
                               partial[i]);
            },
            cfg.threads);
        HourlyCountStore store;
        for (const HourlyCountStore& p : partial) store.merge(p);

        for (const EventRecord& e : manifest) {
            try {
                LoadedEvent le;
                le.record = e;
                le.series = build_window(e, store);
                le.peak = locate_peak(le.series, e);
                loaded.push_back(std::move(le));
            } catch (const WindowQualityError& err) {
                summary.exclusions.push_back({e.key(), err.what()});
            }
        }
    } else {
        loaded = load_events(manifest, cfg.series_dir, summary.exclusions);
    }

    detail::ensure_dir(cfg.out_dir);
    detail::ensure_dir(cfg.out_dir + "/series");

    std::ostringstream retained;
    retained << "# config_hash=" << hash << "\n" << kManifestHeader << "\n";
    for (const LoadedEvent& le : loaded) {
        if (le.peak.peak_value <= cfg.min_peak_views) {
            summary.exclusions.push_back(
                {le.record.key(),
                 "peak " + std::to_string(le.peak.peak_value) + " not above " +
                     std::to_string(cfg.min_peak_views) + " views/hour"});
            continue;
        }
        retained << manifest_row(le.record) << "\n";
        write_series_csv(cfg.out_dir + "/series/" + series_filename(le.record),
                         le.series, hash);
        ++summary.retained;
    }
    write_text_file(cfg.out_dir + "/retained.csv", retained.str());

    std::ostringstream excl;
    excl << "# config_hash=" << hash << "\n" << "event,reason\n";
    for (const Exclusion& e : summary.exclusions)
        excl << join_csv_line({e.event, e.reason}) << "\n";
    write_text_file(cfg.out_dir + "/exclusions.csv", excl.str());

    detail::write_json_file(cfg.out_dir + "/ingest_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"events_total", summary.total},
                             {"events_retained", summary.retained},
                             {"events_excluded", summary.exclusions.size()}});
    return summary;
}

// ---------------------------------------------------------------------------
// fit

struct FitConfig : CommonConfig {
    std::string manifest;
    std::string series_dir;
    std::string method = "proposed"; // proposed | spikem | powerlaw | all
    int fit_starts = 16;
};

struct FitSummary {
    int n_events = 0;
    std::map<std::string, double> median_r2; // per method
    std::string config_hash;
};

namespace detail {

inline std::vector<std::string> expand_methods(const std::string& method,
                                               bool with_lr) {
    const std::vector<std::string> known =
        with_lr ? std::vector<std::string>{"proposed", "spikem", "powerlaw", "lr"}
                : std::vector<std::string>{"proposed", "spikem", "powerlaw"};
    if (method == "all") return known;
    if (std::find(known.begin(), known.end(), method) == known.end())
        throw UsageError("unknown --method: " + method);
    return {method};
}

inline double median_or_nan(std::vector<double> v) {
    return v.empty() ? std::numeric_limits<double>::quiet_NaN() : median(std::move(v));
}

} // namespace detail

inline FitSummary cmd_fit(const FitConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    const std::vector<std::string> methods = detail::expand_methods(cfg.method, false);
    const std::vector<EventRecord> manifest = detail::load_manifest(cfg.manifest);
    std::vector<Exclusion> exclusions;
    std::vector<LoadedEvent> events = load_events(manifest, cfg.series_dir, exclusions);
    if (events.empty()) throw DataError("no usable events to fit");

    const std::string hash = detail::config_hash({{"cmd", "fit"},
                                                  {"manifest", cfg.manifest},
                                                  {"series_dir", cfg.series_dir},
                                                  {"method", cfg.method},
                                                  {"starts", std::to_string(cfg.fit_starts)},
                                                  {"seed", std::to_string(cfg.seed)}});
    FitOptions fit_opt;
    fit_opt.n_starts = cfg.fit_starts;
    fit_opt.seed = derive_seed(cfg.seed, 11);

    const bool want_proposed =
        std::find(methods.begin(), methods.end(), "proposed") != methods.end();
    const bool want_spikem =
        std::find(methods.begin(), methods.end(), "spikem") != methods.end();
    const bool want_powerlaw =
        std::find(methods.begin(), methods.end(), "powerlaw") != methods.end();

    std::vector<FitRecord> fits(events.size());
    std::vector<SpikeMFitRecord> spikem_fits(events.size());
    std::vector<PowerLawFitRecord> powerlaw_fits(events.size());
    std::vector<std::vector<double>> curves(events.size());

    parallel_for_index(
        events.size(),
        [&](std::size_t i) {
            const LoadedEvent& le = events[i];
            const std::vector<double> s = le.series.as_doubles();
            const std::size_t peak_idx = static_cast<std::size_t>(le.peak.t_p);
            if (want_proposed) {
                FitRecord r{le.record.article, le.record.event_date, le.record.category,
                            fit_peak_values(s, le.peak.t_p, fit_opt)};
                fits[i] = std::move(r);
            }
            if (want_spikem) {
                const SpikeMFit f = spikem_fit(s, le.peak.t_p, fit_opt);
                const std::vector<double> x =
                    spikem_simulate(f.params, static_cast<int>(s.size()));
                const auto r2 = r_squared(s, x, peak_idx);
                spikem_fits[i] = {le.record.article, le.record.event_date,
                                  le.record.category, f.params,
                                  r2 ? *r2 : std::numeric_limits<double>::quiet_NaN(),
                                  f.converged};
            }
            if (want_powerlaw) {
                const PowerLawParams p = powerlaw_fit(s, le.peak.t_p);
                std::vector<double> model(s.size(), 0.0);
                for (std::size_t t = 0; t < s.size(); ++t) {
                    if (t < peak_idx)
                        model[t] = powerlaw_eval_pre(p, static_cast<double>(peak_idx - t));
                    else if (t > peak_idx)
                        model[t] = powerlaw_eval_post(p, static_cast<double>(t - peak_idx));
                }
                const auto r2 = r_squared(s, model, peak_idx);
                powerlaw_fits[i] = {le.record.article, le.record.event_date,
                                    le.record.category, p,
                                    r2 ? *r2 : std::numeric_limits<double>::quiet_NaN()};
            }
        },
        cfg.threads);

    detail::ensure_dir(cfg.out_dir);
    FitSummary summary;
    summary.n_events = static_cast<int>(events.size());
    summary.config_hash = hash;

    nlohmann::json method_stats = nlohmann::json::object();
    if (want_proposed) {
        write_fit_records(cfg.out_dir + "/fits.jsonl", fits, hash, cfg.seed);
        std::vector<double> r2s;
        for (const FitRecord& f : fits)
            if (std::isfinite(f.fit.r2)) r2s.push_back(f.fit.r2);
        summary.median_r2["proposed"] = detail::median_or_nan(r2s);
        method_stats["proposed"] = {{"n", fits.size()},
                                    {"median_r2", summary.median_r2["proposed"]}};
    }
    if (want_spikem) {
        std::vector<nlohmann::json> records;
        std::vector<double> r2s;
        for (const SpikeMFitRecord& f : spikem_fits) {
            records.push_back(spikem_record_json(f));
            if (std::isfinite(f.r2)) r2s.push_back(f.r2);
        }
        write_jsonl(cfg.out_dir + "/spikem_fits.jsonl",
                    to_meta("spikem_fits", hash, cfg.seed), records);
        summary.median_r2["spikem"] = detail::median_or_nan(r2s);
        method_stats["spikem"] = {{"n", records.size()},
                                  {"median_r2", summary.median_r2["spikem"]}};
    }
    if (want_powerlaw) {
        std::vector<nlohmann::json> records;
        std::vector<double> r2s;
        for (const PowerLawFitRecord& f : powerlaw_fits) {
            records.push_back(powerlaw_record_json(f));
            if (std::isfinite(f.r2)) r2s.push_back(f.r2);
        }
        write_jsonl(cfg.out_dir + "/powerlaw_fits.jsonl",
                    to_meta("powerlaw_fits", hash, cfg.seed), records);
        summary.median_r2["powerlaw"] = detail::median_or_nan(r2s);
        method_stats["powerlaw"] = {{"n", records.size()},
                                    {"median_r2", summary.median_r2["powerlaw"]}};
    }

    // Long-format observed/fitted curves for plotting.
    std::ostringstream plot;
    plot << "# config_hash=" << hash << "\n" << "event,method,hour,observed,fitted\n";
    for (std::size_t i = 0; i < events.size(); ++i) {
        const LoadedEvent& le = events[i];
        const std::string key = le.record.key();
        auto emit = [&](const std::string& method, auto&& model_at) {
            for (std::size_t t = 0; t < le.series.size(); ++t) {
                const std::optional<double> m = model_at(t);
                plot << csv_escape(key) << "," << method << "," << t << ","
                     << le.series.counts[t] << ","
                     << (m ? format_double(*m) : std::string()) << "\n";
            }
        };
        const std::size_t peak_idx = static_cast<std::size_t>(le.peak.t_p);
        if (want_proposed)
            emit("proposed", [&](std::size_t t) -> std::optional<double> {
                if (t == peak_idx) return std::nullopt;
                return eval_model(fits[i].fit.params, static_cast<double>(t));
            });
        if (want_spikem) {
            const std::vector<double> x = spikem_simulate(
                spikem_fits[i].params, static_cast<int>(le.series.size()));
            emit("spikem", [&](std::size_t t) -> std::optional<double> { return x[t]; });
        }
        if (want_powerlaw)
            emit("powerlaw", [&](std::size_t t) -> std::optional<double> {
                if (t == peak_idx) return std::nullopt;
                return t < peak_idx
                           ? powerlaw_eval_pre(powerlaw_fits[i].params,
                                               static_cast<double>(peak_idx - t))
                           : powerlaw_eval_post(powerlaw_fits[i].params,
                                                static_cast<double>(t - peak_idx));
            });
    }
    write_text_file(cfg.out_dir + "/fit_curves.csv", plot.str());

    detail::write_json_file(cfg.out_dir + "/fit_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"n_events", events.size()},
                             {"n_excluded", exclusions.size()},
                             {"methods", method_stats}});
    return summary;
}

} // namespace peakcast
