#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakcast/stats.hpp"

namespace peakcast {

/// Log-cumulative linear-regression baseline: per prediction offset t, the
/// log growth ratio log R(t) - log R(t_obs) of the post-peak cumulative count
/// is modeled as Gaussian with per-offset mean and variance estimated on a
/// training corpus.
struct LRTable {
    int t_obs = 0;
    int horizon = 0;
    std::vector<double> alpha;  // one row per offset in (t_obs, horizon]
    std::vector<double> sigma2; // maximum-likelihood variances
    int n_train = 0;

    std::size_t rows() const { return alpha.size(); }
};

/// Trains the table from post-peak hourly series (each covering offsets
/// 1..horizon after its peak). Events with zero cumulative count at t_obs are
/// excluded from the table. Throws when nothing usable remains.
inline LRTable lr_train(const std::vector<std::vector<double>>& post_peak_hourly,
                        int t_obs, int horizon) {
    if (t_obs <= 0 || horizon <= t_obs)
        throw std::invalid_argument("lr_train: need 0 < t_obs < horizon");

    // Cumulative counts per event, R[j] = sum of the first j hourly values.
    std::vector<std::vector<double>> cum;
    for (const std::vector<double>& x : post_peak_hourly) {
        if (static_cast<int>(x.size()) < horizon)
            throw std::invalid_argument("lr_train: training event shorter than horizon");
        std::vector<double> r(horizon + 1, 0.0);
        for (int j = 1; j <= horizon; ++j) r[j] = r[j - 1] + x[j - 1];
        if (r[t_obs] > 0.0) cum.push_back(std::move(r));
    }
    if (cum.empty())
        throw std::invalid_argument("lr_train: no training events with views by t_obs");

    LRTable table;
    table.t_obs = t_obs;
    table.horizon = horizon;
    table.n_train = static_cast<int>(cum.size());
    for (int t = t_obs + 1; t <= horizon; ++t) {
        std::vector<double> ratios;
        ratios.reserve(cum.size());
        for (const std::vector<double>& r : cum)
            ratios.push_back(std::log(r[t]) - std::log(r[t_obs]));
        table.alpha.push_back(mean(ratios));
        table.sigma2.push_back(variance(ratios));
    }
    return table;
}

/// Unbiased-estimator prediction of the cumulative count at offset t.
inline double lr_predict(const LRTable& table, double r_obs, int t) {
    if (t <= table.t_obs || t > table.horizon)
        throw std::invalid_argument("lr_predict: offset outside the table");
    const std::size_t i = static_cast<std::size_t>(t - table.t_obs - 1);
    return r_obs * std::exp(table.alpha[i] + table.sigma2[i] / 2.0);
}

/// Hourly forecast over (t_obs, horizon] recovered by differencing the
/// cumulative prediction, floored at zero.
inline std::vector<double> lr_forecast_series(const LRTable& table, double r_obs) {
    std::vector<double> out;
    out.reserve(table.rows());
    double prev = r_obs;
    for (int t = table.t_obs + 1; t <= table.horizon; ++t) {
        const double next = lr_predict(table, r_obs, t);
        out.push_back(std::max(next - prev, 0.0));
        prev = next;
    }
    return out;
}

} // namespace peakcast
