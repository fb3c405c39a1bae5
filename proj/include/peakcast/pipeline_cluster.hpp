#pragma once

#include "peakcast/pipeline_core.hpp"

namespace peakcast {

struct ClusterConfig : CommonConfig {
    std::string manifest;      // for fraction features (series + categories)
    std::string series_dir;    // fraction features only
    std::string fits;          // fits.jsonl (model features)
    std::string spikem_fits;   // spikem_fits.jsonl
    std::string powerlaw_fits; // powerlaw_fits.jsonl
    std::string feature_set = "model"; // model | spikem | powerlaw | fraction
    int k_min = 1;
    int k_max = 12;
    int restarts = 200; // AMI distribution size; BIC selection uses up to 10
    bool circular_tc = false;
};

struct ClusterSummary {
    int k = 0;
    double bic = 0.0;
    double ami_median = std::numeric_limits<double>::quiet_NaN();
    double ami_iqr_lo = std::numeric_limits<double>::quiet_NaN();
    double ami_iqr_hi = std::numeric_limits<double>::quiet_NaN();
    int n_points = 0;
    std::string config_hash;
};

namespace detail {

struct FeatureCorpus {
    std::vector<std::string> keys;
    std::vector<std::string> categories;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> names; // feature names, for the centers artifact
};

inline FeatureCorpus cluster_features(const ClusterConfig& cfg) {
    FeatureCorpus out;
    if (cfg.feature_set == "model") {
        if (cfg.fits.empty() || !fs::exists(cfg.fits))
            throw UsageError("feature set 'model' needs --fits from `peakcast fit`");
        for (const FitRecord& r : read_fit_records(cfg.fits)) {
            if (!r.fit.converged) continue;
            out.keys.push_back(r.key());
            out.categories.push_back(r.category);
            out.rows.push_back(build_feature_vector(r.fit.params, cfg.circular_tc));
        }
        out.names = {"log_a_minus", "log_a_plus", "log_tau_minus", "log_tau_plus",
                     "log_b_minus", "log_b_plus", "alpha_c"};
        if (cfg.circular_tc) {
            out.names.push_back("sin_t_c");
            out.names.push_back("cos_t_c");
        } else {
            out.names.push_back("t_c");
        }
    } else if (cfg.feature_set == "spikem") {
        if (cfg.spikem_fits.empty() || !fs::exists(cfg.spikem_fits))
            throw UsageError(
                "feature set 'spikem' needs --spikem-fits from `peakcast fit --method spikem`");
        for (const nlohmann::json& j : read_jsonl(cfg.spikem_fits)) {
            const SpikeMFitRecord r = spikem_record_from_json(j);
            out.keys.push_back(r.article + "@" + r.event_date);
            out.categories.push_back(r.category);
            auto lg = [](double v) { return std::log(std::max(v, 1e-12)); };
            out.rows.push_back({lg(r.params.u0), lg(r.params.beta),
                                static_cast<double>(r.params.t_b), lg(r.params.s_b),
                                lg(r.params.eps0), r.params.p_a, r.params.p_s});
        }
        out.names = {"log_u0", "log_beta", "t_b", "log_s_b", "log_eps0", "p_a", "p_s"};
    } else if (cfg.feature_set == "powerlaw") {
        if (cfg.powerlaw_fits.empty() || !fs::exists(cfg.powerlaw_fits))
            throw UsageError(
                "feature set 'powerlaw' needs --powerlaw-fits from `peakcast fit --method powerlaw`");
        for (const nlohmann::json& j : read_jsonl(cfg.powerlaw_fits)) {
            const PowerLawFitRecord r = powerlaw_record_from_json(j);
            out.keys.push_back(r.article + "@" + r.event_date);
            out.categories.push_back(r.category);
            auto lg = [](double v) { return std::log(std::max(v, 1e-12)); };
            out.rows.push_back({lg(r.params.a_minus), r.params.gamma_minus,
                                lg(r.params.a_plus), r.params.gamma_plus});
        }
        out.names = {"log_a_minus", "gamma_minus", "log_a_plus", "gamma_plus"};
    } else if (cfg.feature_set == "fraction") {
        const std::vector<EventRecord> manifest = detail::load_manifest(cfg.manifest);
        std::vector<Exclusion> exclusions;
        for (const LoadedEvent& le : load_events(manifest, cfg.series_dir, exclusions)) {
            const std::vector<double> s = le.series.as_doubles();
            const auto f = fraction_features(s, le.peak.t_p);
            if (!f) continue; // zero-total window
            out.keys.push_back(le.record.key());
            out.categories.push_back(le.record.category);
            out.rows.push_back({(*f)[0], (*f)[1], (*f)[2]});
        }
        out.names = {"f_minus", "f_peak", "f_plus"};
    } else {
        throw UsageError("unknown --feature-set: " + cfg.feature_set);
    }
    if (out.rows.empty()) throw DataError("no feature rows for clustering");
    return out;
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd x(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return x;
}

} // namespace detail

inline ClusterSummary cmd_cluster(const ClusterConfig& cfg) {
    if (cfg.out_dir.empty()) throw UsageError("missing --out");
    if (cfg.k_min < 1 || cfg.k_min > cfg.k_max) throw UsageError("bad --k-min/--k-max");
    if (cfg.restarts < 1) throw UsageError("bad --restarts");

    const detail::FeatureCorpus corpus = detail::cluster_features(cfg);
    const Standardizer standardizer = Standardizer::fit(corpus.rows);
    const Eigen::MatrixXd x = detail::to_matrix(standardizer.apply_all(corpus.rows));

    const std::string hash = detail::config_hash(
        {{"cmd", "cluster"},
         {"feature_set", cfg.feature_set},
         {"fits", cfg.fits},
         {"spikem_fits", cfg.spikem_fits},
         {"powerlaw_fits", cfg.powerlaw_fits},
         {"manifest", cfg.manifest},
         {"series_dir", cfg.series_dir},
         {"k", std::to_string(cfg.k_min) + ".." + std::to_string(cfg.k_max)},
         {"restarts", std::to_string(cfg.restarts)},
         {"circular_tc", cfg.circular_tc ? "1" : "0"},
         {"seed", std::to_string(cfg.seed)}});

    GmmModel best;
    try {
        best = select_k(x, cfg.k_min, std::min<int>(cfg.k_max, static_cast<int>(x.rows())),
                        std::min(cfg.restarts, 10), derive_seed(cfg.seed, 21));
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("cluster selection: ") + e.what());
    }
    const std::vector<int> labels = best.assign(x);

    // Category labels for agreement scoring.
    std::map<std::string, int> category_ids;
    std::vector<int> category_labels;
    for (const std::string& c : corpus.categories) {
        auto [it, inserted] = category_ids.emplace(c, static_cast<int>(category_ids.size()));
        category_labels.push_back(it->second);
    }

    // AMI distribution across restarts at the selected K.
    std::vector<double> amis(static_cast<std::size_t>(cfg.restarts));
    parallel_for_index(
        amis.size(),
        [&](std::size_t r) {
            const GmmModel m = fit_gmm(x, best.k, derive_seed(cfg.seed, 22, r));
            const std::vector<int> l = m.assign(x);
            amis[r] = adjusted_mutual_information(l, category_labels);
        },
        cfg.threads);

    detail::ensure_dir(cfg.out_dir);

    std::ostringstream assignments;
    assignments << "# config_hash=" << hash << "\n" << "event,category,cluster\n";
    for (std::size_t i = 0; i < corpus.keys.size(); ++i)
        assignments << csv_escape(corpus.keys[i]) << ","
                    << csv_escape(corpus.categories[i]) << "," << labels[i] << "\n";
    write_text_file(cfg.out_dir + "/assignments.csv", assignments.str());

    // Cluster centers back in feature space (de-standardized) for plotting.
    nlohmann::json centers = nlohmann::json::array();
    for (int j = 0; j < best.k; ++j) {
        std::vector<double> z(best.means.cols());
        for (Eigen::Index d = 0; d < best.means.cols(); ++d) z[d] = best.means(j, d);
        const std::vector<double> raw = standardizer.invert(z);
        nlohmann::json center = nlohmann::json::object();
        for (std::size_t d = 0; d < corpus.names.size(); ++d)
            center[corpus.names[d]] = raw[d];
        centers.push_back({{"cluster", j},
                           {"weight", best.weights[j]},
                           {"center", center}});
    }

    ClusterSummary summary;
    summary.k = best.k;
    summary.bic = best.bic;
    summary.n_points = static_cast<int>(x.rows());
    summary.config_hash = hash;
    {
        std::vector<double> sorted = amis;
        summary.ami_median = median(sorted);
        summary.ami_iqr_lo = quantile(sorted, 0.25);
        summary.ami_iqr_hi = quantile(sorted, 0.75);
    }

    detail::write_json_file(cfg.out_dir + "/centers.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"feature_set", cfg.feature_set},
                             {"standardized", true},
                             {"k", best.k},
                             {"bic", best.bic},
                             {"n_points", summary.n_points},
                             {"clusters", centers}});
    detail::write_json_file(cfg.out_dir + "/ami_summary.json",
                            {{"config_hash", hash},
                             {"seed", cfg.seed},
                             {"label_source", "category"},
                             {"restarts", cfg.restarts},
                             {"ami_median", summary.ami_median},
                             {"ami_iqr", {summary.ami_iqr_lo, summary.ami_iqr_hi}}});
    return summary;
}

} // namespace peakcast
