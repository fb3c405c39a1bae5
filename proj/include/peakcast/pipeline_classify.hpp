#pragma once

#include "peakcast/pipeline_core.hpp"

namespace peakcast {

struct ClassifyConfig : CommonConfig {
    std::string manifest; // outcome columns drive the labels
    std::string series_dir;
    std::string fits;
    std::string spikem_fits;
    std::string powerlaw_fits;
    // response | response+opponent | spikem+opponent | powerlaw | fraction | all
    std::string feature_set = "response+opponent";
    double svm_c = 1.0;
    int folds = 5;
};

struct FeatureSetResult {
    double mean_accuracy = 0.0;
    double mean_baseline = 0.0;
    std::vector<double> fold_accuracy;
    int n_samples = 0;
    int n_dropped = 0;
};

struct ClassifySummary {
    std::map<std::string, FeatureSetResult> by_feature_set;
    std::string config_hash;
};

namespace detail {

inline const std::vector<std::string>& classify_feature_sets() {
    static const std::vector<std::string> sets = {
        "response", "response+opponent", "spikem+opponent", "powerlaw", "fraction"};
    return sets;
}

struct OutcomeSamples {
    std::vector<std::vector<double>> x;
    std::vector<int> y; // win 0, draw 1, lose 2
    int dropped = 0;
};

inline int result_class(MatchResult r) {
    switch (r) {
        case MatchResult::win: return 0;
        case MatchResult::draw: return 1;
        case MatchResult::lose: return 2;
    }
    return 1;
}

// Builds one sample per manifest event carrying a result, joining opponent
// records on (opponent article, same date) when the feature set needs them.
template <typename FeatureFn>
inline OutcomeSamples build_outcome_samples(const std::vector<EventRecord>& manifest,
                                            bool with_opponent, FeatureFn&& features) {
    std::map<std::string, const EventRecord*> by_key;
    for (const EventRecord& e : manifest) by_key[e.key()] = &e;

    OutcomeSamples out;
    for (const EventRecord& e : manifest) {
        if (!e.outcome.result) continue;
        std::optional<std::vector<double>> own = features(e);
        if (!own) {
            ++out.dropped;
            continue;
        }
        std::vector<double> row = std::move(*own);
        if (with_opponent) {
            if (e.outcome.opponent.empty()) {
                ++out.dropped;
                continue;
            }
            auto it = by_key.find(e.outcome.opponent + "@" + e.event_date);
            std::optional<std::vector<double>> opp =
                it == by_key.end() ? std::nullopt : features(*it->second);
            if (!opp) {
                ++out.dropped;
                continue;
            }
            row.insert(row.end(), opp->begin(), opp->end());
        }
        out.x.push_back(std::move(row));
        out.y.push_back(result_class(*e.outcome.result));
    }
    return out;
}

} // namespace detail

inline ClassifySummary cmd_classify(const ClassifyConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    const std::vector<EventRecord> manifest = detail::load_manifest(cfg.manifest);

    std::vector<std::string> sets;
    if (cfg.feature_set == "all") sets = detail::classify_feature_sets();
    else if (std::find(detail::classify_feature_sets().begin(),
                       detail::classify_feature_sets().end(),
                       cfg.feature_set) != detail::classify_feature_sets().end())
        sets = {cfg.feature_set};
    else throw UsageError("unknown --feature-set: " + cfg.feature_set);

    // Lazy per-source feature lookups keyed by event.
    std::map<std::string, PeakParams> model_params;
    std::map<std::string, SpikeMParams> spikem_params;
    std::map<std::string, std::pair<double, double>> powerlaw_params; // a+, gamma+
    std::map<std::string, std::array<double, 3>> fractions;

    auto need = [&](const std::string& s) {
        return std::find(sets.begin(), sets.end(), s) != sets.end();
    };
    if (need("response") || need("response+opponent")) {
        if (cfg.fits.empty() || !fs::exists(cfg.fits))
            throw UsageError("response features need --fits from `peakcast fit`");
        for (const FitRecord& r : read_fit_records(cfg.fits))
            if (r.fit.converged) model_params[r.key()] = r.fit.params;
    }
    if (need("spikem+opponent")) {
        if (cfg.spikem_fits.empty() || !fs::exists(cfg.spikem_fits))
            throw UsageError(
                "spikem features need --spikem-fits from `peakcast fit --method spikem`");
        for (const nlohmann::json& j : read_jsonl(cfg.spikem_fits)) {
            const SpikeMFitRecord r = spikem_record_from_json(j);
            spikem_params[r.article + "@" + r.event_date] = r.params;
        }
    }
    if (need("powerlaw")) {
        if (cfg.powerlaw_fits.empty() || !fs::exists(cfg.powerlaw_fits))
            throw UsageError(
                "powerlaw features need --powerlaw-fits from `peakcast fit --method powerlaw`");
        for (const nlohmann::json& j : read_jsonl(cfg.powerlaw_fits)) {
            const PowerLawFitRecord r = powerlaw_record_from_json(j);
            powerlaw_params[r.article + "@" + r.event_date] = {r.params.a_plus,
                                                               r.params.gamma_plus};
        }
    }
    if (need("fraction")) {
        std::vector<Exclusion> exclusions;
        for (const LoadedEvent& le : load_events(manifest, cfg.series_dir, exclusions)) {
            const std::vector<double> s = le.series.as_doubles();
            if (const auto f = fraction_features(s, le.peak.t_p))
                fractions[le.record.key()] = *f;
        }
    }

    const std::string hash = detail::config_hash(
        {{"cmd", "classify"},
         {"manifest", cfg.manifest},
         {"fits", cfg.fits},
         {"spikem_fits", cfg.spikem_fits},
         {"powerlaw_fits", cfg.powerlaw_fits},
         {"series_dir", cfg.series_dir},
         {"feature_set", cfg.feature_set},
         {"C", format_double(cfg.svm_c)},
         {"folds", std::to_string(cfg.folds)},
         {"seed", std::to_string(cfg.seed)}});

    auto lg = [](double v) { return std::log(std::max(v, 1e-12)); };
    ClassifySummary summary;
    summary.config_hash = hash;

    std::ostringstream folds_csv;
    folds_csv << "# config_hash=" << hash << "\n" << "feature_set,fold,accuracy\n";
    nlohmann::json set_stats = nlohmann::json::object();

    for (const std::string& set : sets) {
        detail::OutcomeSamples samples;
        if (set == "response" || set == "response+opponent") {
            samples = detail::build_outcome_samples(
                manifest, set == "response+opponent",
                [&](const EventRecord& e) -> std::optional<std::vector<double>> {
                    auto it = model_params.find(e.key());
                    if (it == model_params.end()) return std::nullopt;
                    const PeakParams& p = it->second;
                    return std::vector<double>{lg(p.a_plus), lg(p.b_plus), lg(p.tau_plus)};
                });
        } else if (set == "spikem+opponent") {
            samples = detail::build_outcome_samples(
                manifest, true,
                [&](const EventRecord& e) -> std::optional<std::vector<double>> {
                    auto it = spikem_params.find(e.key());
                    if (it == spikem_params.end()) return std::nullopt;
                    const SpikeMParams& p = it->second;
                    return std::vector<double>{lg(p.u0),   lg(p.beta),
                                               static_cast<double>(p.t_b), lg(p.s_b),
                                               lg(p.eps0), p.p_a,
                                               p.p_s};
                });
        } else if (set == "powerlaw") {
            samples = detail::build_outcome_samples(
                manifest, false,
                [&](const EventRecord& e) -> std::optional<std::vector<double>> {
                    auto it = powerlaw_params.find(e.key());
                    if (it == powerlaw_params.end()) return std::nullopt;
                    return std::vector<double>{lg(it->second.first), it->second.second};
                });
        } else if (set == "fraction") {
            samples = detail::build_outcome_samples(
                manifest, false,
                [&](const EventRecord& e) -> std::optional<std::vector<double>> {
                    auto it = fractions.find(e.key());
                    if (it == fractions.end()) return std::nullopt;
                    return std::vector<double>{it->second[0], it->second[1], it->second[2]};
                });
        }

        if (samples.x.size() < static_cast<std::size_t>(cfg.folds))
            throw DataError("feature set '" + set + "': fewer samples than folds");

        SvmOptions svm_opt;
        svm_opt.C = cfg.svm_c;
        svm_opt.seed = derive_seed(cfg.seed, 31);
        CvSummary cv;
        try {
            cv = crossvalidate(samples.x, samples.y, 3, cfg.folds,
                               derive_seed(cfg.seed, 32), svm_opt, true);
        } catch (const std::invalid_argument& e) {
            throw DataError("feature set '" + set + "': " + e.what());
        }

        FeatureSetResult r;
        r.mean_accuracy = cv.mean_accuracy;
        r.mean_baseline = cv.mean_baseline;
        r.fold_accuracy = cv.fold_accuracy;
        r.n_samples = static_cast<int>(samples.x.size());
        r.n_dropped = samples.dropped;
        summary.by_feature_set[set] = r;

        for (std::size_t f = 0; f < cv.fold_accuracy.size(); ++f)
            folds_csv << csv_escape(set) << "," << f << ","
                      << format_double(cv.fold_accuracy[f]) << "\n";
        set_stats[set] = {{"mean_accuracy", r.mean_accuracy},
                          {"mean_baseline", r.mean_baseline},
                          {"n_samples", r.n_samples},
                          {"n_dropped", r.n_dropped}};
    }

    detail::ensure_dir(cfg.out_dir);
    write_text_file(cfg.out_dir + "/classification.csv", folds_csv.str());
    detail::write_json_file(cfg.out_dir + "/classification_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"folds", cfg.folds},
                             {"feature_transform", "log+standardize"},
                             {"class_order", {"win", "draw", "lose"}},
                             {"feature_sets", set_stats}});
    return summary;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeConfig : CommonConfig {
    std::string fits;
};

struct DecomposeSummary {
    int n_events = 0;
    std::string config_hash;
};

inline DecomposeSummary cmd_decompose(const DecomposeConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    if (cfg.fits.empty() || !fs::exists(cfg.fits))
        throw UsageError("decompose needs --fits from `peakcast fit`");

    const std::string hash = detail::config_hash(
        {{"cmd", "decompose"}, {"fits", cfg.fits}, {"seed", std::to_string(cfg.seed)}});

    std::ostringstream csv;
    csv << "# config_hash=" << hash << "\n"
        << "event,category,alpha_c,t_c,p_us,p_uk,p_au\n";
    int n = 0;
    for (const FitRecord& r : read_fit_records(cfg.fits)) {
        if (!r.fit.converged) continue;
        const RegionMix mix =
            decompose_circadian(r.fit.params.alpha_c,
                                std::fmod(std::fmod(r.fit.params.t_c, 24.0) + 24.0, 24.0));
        csv << csv_escape(r.key()) << "," << csv_escape(r.category) << ","
            << format_double(r.fit.params.alpha_c) << ","
            << format_double(r.fit.params.t_c) << "," << format_double(mix.p_us) << ","
            << format_double(mix.p_uk) << "," << format_double(mix.p_au) << "\n";
        ++n;
    }
    if (n == 0) throw DataError("no converged fits to decompose");

    detail::ensure_dir(cfg.out_dir);
    write_text_file(cfg.out_dir + "/decompose.csv", csv.str());
    detail::write_json_file(cfg.out_dir + "/decompose_summary.json",
                            {{"config_hash", hash}, {"seed", cfg.seed}, {"n_events", n}});
    DecomposeSummary s;
    s.n_events = n;
    s.config_hash = hash;
    return s;
}

} // namespace peakcast
