// Command-line front end for the attention-peak pipeline: synthesize or
// ingest event windows, fit models, forecast, cluster, classify outcomes,
// and decompose circadian profiles.

#include <cstdio>
#include <exception>

#include <CLI11.hpp>

#include "peakcast/pipeline.hpp"

namespace {

using namespace peakcast;

void add_common(CLI::App* cmd, CommonConfig& cfg) {
    cmd->add_option("--out", cfg.out_dir, "output directory")->required();
    cmd->add_option("--seed", cfg.seed, "master seed; derives all randomness");
    cmd->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
}

int run(int argc, char** argv) {
    CLI::App app{"peakcast: model, forecast, and cluster attention peaks around planned events"};
    app.require_subcommand(1);

    SynthConfig synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic corpus");
    add_common(synth_cmd, synth);
    synth_cmd->add_option("--synth-kind", synth.kind, "events | football")
        ->check(CLI::IsMember({"events", "football"}));
    synth_cmd->add_option("--n-events", synth.n_events,
                          "events per category (or matches)");
    synth_cmd->add_option("--spec", synth.spec_json, "JSON spec for the events kind");

    IngestConfig ingest;
    CLI::App* ingest_cmd =
        app.add_subcommand("ingest", "build event windows from dumps or cached series");
    add_common(ingest_cmd, ingest);
    ingest_cmd->add_option("--manifest", ingest.manifest, "event manifest CSV")->required();
    ingest_cmd->add_option("--dump-dir", ingest.dump_dir, "hourly pageview dump directory");
    ingest_cmd->add_option("--series-dir", ingest.series_dir, "cached per-event series");
    ingest_cmd->add_option("--project", ingest.project, "dump project/domain filter");
    ingest_cmd->add_option("--min-peak-views", ingest.min_peak_views,
                           "popularity threshold (strictly above retains)");

    FitConfig fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "fit peak models to event windows");
    add_common(fit_cmd, fit);
    fit_cmd->add_option("--manifest", fit.manifest, "event manifest CSV")->required();
    fit_cmd->add_option("--series-dir", fit.series_dir, "series cache")->required();
    fit_cmd->add_option("--method", fit.method, "proposed | spikem | powerlaw | all")
        ->check(CLI::IsMember({"proposed", "spikem", "powerlaw", "all"}));
    fit_cmd->add_option("--starts", fit.fit_starts, "multi-start count");

    PredictConfig predict;
    CLI::App* predict_cmd =
        app.add_subcommand("predict", "forecast post-peak activity from short observations");
    add_common(predict_cmd, predict);
    predict_cmd->add_option("--manifest", predict.manifest, "event manifest CSV")->required();
    predict_cmd->add_option("--series-dir", predict.series_dir, "series cache")->required();
    predict_cmd->add_option("--fits", predict.fits, "fits.jsonl for prior training");
    predict_cmd->add_option("--method", predict.method,
                            "proposed | spikem | powerlaw | lr | all")
        ->check(CLI::IsMember({"proposed", "spikem", "powerlaw", "lr", "all"}));
    predict_cmd->add_option("--prior", predict.prior,
                            "none | anticipation | anticipation-category")
        ->check(CLI::IsMember({"none", "anticipation", "anticipation-category"}));
    predict_cmd->add_option("--t-obs", predict.t_obs, "observed hours after the peak")
        ->check(CLI::IsMember({24, 48, 72}));
    predict_cmd->add_option("--horizon", predict.horizon, "evaluation horizon (hours)");
    predict_cmd->add_option("--starts", predict.fit_starts, "multi-start count");

    ClusterConfig cluster;
    CLI::App* cluster_cmd =
        app.add_subcommand("cluster", "cluster events by temporal signature");
    add_common(cluster_cmd, cluster);
    cluster_cmd->add_option("--feature-set", cluster.feature_set,
                            "model | spikem | powerlaw | fraction")
        ->check(CLI::IsMember({"model", "spikem", "powerlaw", "fraction"}));
    cluster_cmd->add_option("--fits", cluster.fits, "fits.jsonl");
    cluster_cmd->add_option("--spikem-fits", cluster.spikem_fits, "spikem_fits.jsonl");
    cluster_cmd->add_option("--powerlaw-fits", cluster.powerlaw_fits,
                            "powerlaw_fits.jsonl");
    cluster_cmd->add_option("--manifest", cluster.manifest, "manifest (fraction features)");
    cluster_cmd->add_option("--series-dir", cluster.series_dir,
                            "series cache (fraction features)");
    cluster_cmd->add_option("--k-min", cluster.k_min, "smallest K");
    cluster_cmd->add_option("--k-max", cluster.k_max, "largest K");
    cluster_cmd->add_option("--restarts", cluster.restarts, "AMI restarts");
    cluster_cmd->add_flag("--circular-tc", cluster.circular_tc,
                          "encode the daily phase as sin/cos");

    ClassifyConfig classify;
    CLI::App* classify_cmd =
        app.add_subcommand("classify", "infer match outcomes from response dynamics");
    add_common(classify_cmd, classify);
    classify_cmd->add_option("--manifest", classify.manifest, "manifest with outcomes")
        ->required();
    classify_cmd
        ->add_option("--feature-set", classify.feature_set,
                     "response | response+opponent | spikem+opponent | powerlaw | "
                     "fraction | all")
        ->check(CLI::IsMember({"response", "response+opponent", "spikem+opponent",
                               "powerlaw", "fraction", "all"}));
    classify_cmd->add_option("--fits", classify.fits, "fits.jsonl");
    classify_cmd->add_option("--spikem-fits", classify.spikem_fits, "spikem_fits.jsonl");
    classify_cmd->add_option("--powerlaw-fits", classify.powerlaw_fits,
                             "powerlaw_fits.jsonl");
    classify_cmd->add_option("--series-dir", classify.series_dir,
                             "series cache (fraction features)");
    classify_cmd->add_option("--svm-c", classify.svm_c, "SVM regularization C");
    classify_cmd->add_option("--folds", classify.folds, "cross-validation folds");

    DecomposeConfig decompose;
    CLI::App* decompose_cmd =
        app.add_subcommand("decompose", "decompose circadian profiles into regional waves");
    add_common(decompose_cmd, decompose);
    decompose_cmd->add_option("--fits", decompose.fits, "fits.jsonl")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // every usage problem maps to exit code 1
    }

    if (synth_cmd->parsed()) {
        const SynthSummary s = cmd_synth(synth);
        std::printf("synth: %d events (config %s)\n", s.n_events, s.config_hash.c_str());
    } else if (ingest_cmd->parsed()) {
        const IngestSummary s = cmd_ingest(ingest);
        std::printf("ingest: %d of %d events retained, %zu excluded (config %s)\n",
                    s.retained, s.total, s.exclusions.size(), s.config_hash.c_str());
    } else if (fit_cmd->parsed()) {
        const FitSummary s = cmd_fit(fit);
        std::printf("fit: %d events", s.n_events);
        for (const auto& [method, r2] : s.median_r2)
            std::printf("  %s median R2 %.3f", method.c_str(), r2);
        std::printf(" (config %s)\n", s.config_hash.c_str());
    } else if (predict_cmd->parsed()) {
        const PredictSummary s = cmd_predict(predict);
        std::printf("predict: %d events, t_obs=%d\n", s.n_events, predict.t_obs);
        for (const auto& [method, m] : s.by_method)
            std::printf("  %-9s mean APE ts %.4f cum %.4f (%d scored, %d undefined)\n",
                        method.c_str(), m.mean_ape_ts, m.mean_ape_cum, m.n_scored,
                        m.n_undefined);
    } else if (cluster_cmd->parsed()) {
        const ClusterSummary s = cmd_cluster(cluster);
        std::printf("cluster: K=%d over %d events, BIC %.1f, AMI median %.3f "
                    "(IQR %.3f-%.3f)\n",
                    s.k, s.n_points, s.bic, s.ami_median, s.ami_iqr_lo, s.ami_iqr_hi);
    } else if (classify_cmd->parsed()) {
        const ClassifySummary s = cmd_classify(classify);
        for (const auto& [set, r] : s.by_feature_set)
            std::printf("classify %-18s accuracy %.3f baseline %.3f (n=%d, dropped %d)\n",
                        set.c_str(), r.mean_accuracy, r.mean_baseline, r.n_samples,
                        r.n_dropped);
    } else if (decompose_cmd->parsed()) {
        const DecomposeSummary s = cmd_decompose(decompose);
        std::printf("decompose: %d events (config %s)\n", s.n_events,
                    s.config_hash.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const peakcast::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const peakcast::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const peakcast::NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 3;
    }
}
