#pragma once

#include "peakcast/pipeline_core.hpp"

namespace peakcast {

struct PredictConfig : CommonConfig {
    std::string manifest;
    std::string series_dir;
    std::string fits; // fits.jsonl from `fit`; trains priors
    std::string method = "proposed"; // proposed | spikem | powerlaw | lr | all
    std::string prior = "anticipation-category"; // none | anticipation | anticipation-category
    int t_obs = 24;
    int horizon = kDefaultHorizonHours;
    int fit_starts = 16;
};

struct MethodMetrics {
    double mean_ape_ts = std::numeric_limits<double>::quiet_NaN();
    double mean_ape_cum = std::numeric_limits<double>::quiet_NaN();
    int n_scored = 0;
    int n_undefined = 0;
};

struct PredictSummary {
    std::map<std::string, MethodMetrics> by_method;
    int n_events = 0;
    std::string config_hash;
};

namespace detail {

inline PriorMode parse_prior_mode(const std::string& s) {
    if (s == "none") return PriorMode::none;
    if (s == "anticipation") return PriorMode::anticipation;
    if (s == "anticipation-category") return PriorMode::anticipation_category;
    throw UsageError("unknown --prior: " + s);
}

struct EventForecast {
    // One value per offset in (t_obs, horizon]; empty when the method failed.
    std::vector<double> predicted;
};

} // namespace detail

inline PredictSummary cmd_predict(const PredictConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    if (cfg.t_obs <= 0 || cfg.t_obs >= cfg.horizon)
        throw UsageError("--t-obs must lie in (0, horizon)");
    const std::vector<std::string> methods = detail::expand_methods(cfg.method, true);
    const PriorMode prior_mode = detail::parse_prior_mode(cfg.prior);

    const std::vector<EventRecord> manifest = detail::load_manifest(cfg.manifest);
    std::vector<Exclusion> exclusions;
    std::vector<LoadedEvent> events = load_events(manifest, cfg.series_dir, exclusions);

    // Events must expose the full evaluation span.
    std::erase_if(events, [&](const LoadedEvent& le) {
        const bool short_window =
            le.peak.t_p + cfg.horizon >= static_cast<int>(le.series.size());
        if (short_window)
            exclusions.push_back({le.record.key(), "window shorter than the horizon"});
        return short_window;
    });
    if (events.empty()) throw DataError("no usable events to forecast");

    const bool want_proposed =
        std::find(methods.begin(), methods.end(), "proposed") != methods.end();
    const bool want_lr = std::find(methods.begin(), methods.end(), "lr") != methods.end();

    // Priors come from the full-window fits of the training corpus.
    PriorTable priors;
    if (want_proposed && prior_mode != PriorMode::none) {
        if (cfg.fits.empty() || !fs::exists(cfg.fits))
            throw UsageError("prior '" + cfg.prior +
                             "' needs --fits from a previous `peakcast fit` run");
        std::vector<CategorizedFit> training;
        for (const FitRecord& r : read_fit_records(cfg.fits))
            training.push_back({r.fit.params, r.category, r.fit.converged});
        priors = learn_priors(training);
    }

    LRTable lr_table;
    if (want_lr) {
        std::vector<std::vector<double>> post;
        for (const LoadedEvent& le : events) {
            std::vector<double> x;
            for (int t = 1; t <= cfg.horizon; ++t)
                x.push_back(static_cast<double>(le.series.counts[le.peak.t_p + t]));
            post.push_back(std::move(x));
        }
        try {
            lr_table = lr_train(post, cfg.t_obs, cfg.horizon);
        } catch (const std::invalid_argument& e) {
            throw DataError(std::string("lr training failed: ") + e.what());
        }
    }

    const std::string hash = detail::config_hash(
        {{"cmd", "predict"},
         {"manifest", cfg.manifest},
         {"series_dir", cfg.series_dir},
         {"fits", cfg.fits},
         {"method", cfg.method},
         {"prior", cfg.prior},
         {"t_obs", std::to_string(cfg.t_obs)},
         {"horizon", std::to_string(cfg.horizon)},
         {"starts", std::to_string(cfg.fit_starts)},
         {"seed", std::to_string(cfg.seed)}});

    FitOptions fit_opt;
    fit_opt.n_starts = cfg.fit_starts;
    fit_opt.seed = derive_seed(cfg.seed, 13);

    // method -> per-event forecasts
    std::map<std::string, std::vector<detail::EventForecast>> forecasts;
    for (const std::string& m : methods)
        forecasts[m].resize(events.size());

    parallel_for_index(
        events.size(),
        [&](std::size_t i) {
            const LoadedEvent& le = events[i];
            const std::vector<double> s = le.series.as_doubles();
            const int t_p = le.peak.t_p;
            const int obs_end = t_p + cfg.t_obs + 1; // exclusive series index

            for (const std::string& m : methods) {
                detail::EventForecast& out = forecasts[m][i];
                if (m == "proposed") {
                    const PrepeakFit pre = fit_prepeak_values(s, t_p, fit_opt);
                    ForecastRequest req;
                    req.series.assign(s.begin(), s.begin() + obs_end);
                    req.t_p = t_p;
                    req.prepeak = pre;
                    req.category = le.record.category;
                    req.t_obs = cfg.t_obs;
                    req.horizon = cfg.horizon;
                    const ResponseFit resp = map_fit_response(
                        req, prior_mode == PriorMode::none ? nullptr : &priors,
                        prior_mode, fit_opt);
                    out.predicted = forecast_series(assemble_params(pre, resp, t_p),
                                                    cfg.t_obs, cfg.horizon);
                } else if (m == "spikem") {
                    const std::vector<double> observed(s.begin(), s.begin() + obs_end);
                    const SpikeMFit f = spikem_fit(observed, t_p, fit_opt);
                    const std::vector<double> x =
                        spikem_simulate(f.params, t_p + cfg.horizon + 1);
                    out.predicted.assign(x.begin() + obs_end,
                                         x.begin() + t_p + cfg.horizon + 1);
                } else if (m == "powerlaw") {
                    const PowerLawParams p = powerlaw_fit(s, t_p, obs_end);
                    out.predicted = powerlaw_forecast(p, cfg.t_obs, cfg.horizon);
                } else if (m == "lr") {
                    double r_obs = 0.0;
                    for (int t = 1; t <= cfg.t_obs; ++t) r_obs += s[t_p + t];
                    out.predicted = lr_forecast_series(lr_table, r_obs);
                }
            }
        },
        cfg.threads);

    detail::ensure_dir(cfg.out_dir);

    std::ostringstream metrics;
    metrics << "# config_hash=" << hash << "\n"
            << "event,category,t_obs,method,ape_ts,ape_cum\n";
    std::ostringstream curves;
    curves << "# config_hash=" << hash << "\n"
           << "event,method,hours_after_peak,observed,predicted\n";

    PredictSummary summary;
    summary.n_events = static_cast<int>(events.size());
    summary.config_hash = hash;
    std::map<std::string, std::vector<double>> ts_by_method, cum_by_method;

    for (std::size_t i = 0; i < events.size(); ++i) {
        const LoadedEvent& le = events[i];
        std::vector<double> actual;
        for (int t = cfg.t_obs + 1; t <= cfg.horizon; ++t)
            actual.push_back(static_cast<double>(le.series.counts[le.peak.t_p + t]));

        for (const std::string& m : methods) {
            const std::vector<double>& predicted = forecasts[m][i].predicted;
            const auto ts = ape_timeseries(actual, predicted);
            const auto cum = ape_cumulative(actual, predicted);
            metrics << csv_escape(le.record.key()) << ","
                    << csv_escape(le.record.category) << "," << cfg.t_obs << "," << m
                    << "," << (ts ? format_double(*ts) : std::string()) << ","
                    << (cum ? format_double(*cum) : std::string()) << "\n";
            MethodMetrics& mm = summary.by_method[m];
            if (ts && cum) {
                ts_by_method[m].push_back(*ts);
                cum_by_method[m].push_back(*cum);
                ++mm.n_scored;
            } else {
                ++mm.n_undefined;
            }
            for (std::size_t j = 0; j < predicted.size(); ++j)
                curves << csv_escape(le.record.key()) << "," << m << ","
                       << cfg.t_obs + 1 + static_cast<int>(j) << ","
                       << format_double(actual[j]) << "," << format_double(predicted[j])
                       << "\n";
        }
    }

    nlohmann::json method_stats = nlohmann::json::object();
    for (const std::string& m : methods) {
        MethodMetrics& mm = summary.by_method[m];
        if (!ts_by_method[m].empty()) {
            mm.mean_ape_ts = mean(ts_by_method[m]);
            mm.mean_ape_cum = mean(cum_by_method[m]);
        }
        method_stats[m] = {{"mean_ape_ts", mm.mean_ape_ts},
                           {"mean_ape_cum", mm.mean_ape_cum},
                           {"n_scored", mm.n_scored},
                           {"n_undefined", mm.n_undefined}};
    }

    write_text_file(cfg.out_dir + "/metrics.csv", metrics.str());
    write_text_file(cfg.out_dir + "/predict_curves.csv", curves.str());
    detail::write_json_file(cfg.out_dir + "/predict_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"t_obs", cfg.t_obs},
                             {"horizon", cfg.horizon},
                             {"prior", cfg.prior},
                             {"aggregation", "mean"},
                             {"n_events", events.size()},
                             {"n_excluded", exclusions.size()},
                             {"methods", method_stats}});
    return summary;
}

} // namespace peakcast
