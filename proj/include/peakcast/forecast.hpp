#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peakcast/peak_fit.hpp"
#include "peakcast/peak_model.hpp"
#include "peakcast/priors.hpp"
#include "peakcast/time_series.hpp"

namespace peakcast {

enum class PriorMode { none, anticipation, anticipation_category };

inline const char* to_string(PriorMode m) {
    switch (m) {
        case PriorMode::none: return "none";
        case PriorMode::anticipation: return "anticipation";
        case PriorMode::anticipation_category: return "anticipation-category";
    }
    return "?";
}

inline constexpr int kDefaultHorizonHours = 168; // 7 days

/// Everything needed to forecast one event from a short observation: the
/// window observed through t_p + t_obs, the pre-peak fit, and the category.
struct ForecastRequest {
    std::vector<double> series; // hourly values from the window start
    int t_p = 0;                // peak index within `series`
    PrepeakFit prepeak;
    std::string category;
    int t_obs = 24;                      // observed hours after the peak
    int horizon = kDefaultHorizonHours;  // forecast through t_p + horizon
};

struct ResponseFit {
    double a_plus = 0.0;
    double b_plus = 0.0;
    double tau_plus = 1.0;
    bool no_data = false; // empty observation window; prior mode returned
};

/// Full parameter set from a pre-peak fit plus a response triple.
inline PeakParams assemble_params(const PrepeakFit& pre, const ResponseFit& resp,
                                  double t_p) {
    PeakParams p;
    p.a_minus = pre.a_minus;
    p.b_minus = pre.b_minus;
    p.tau_minus = pre.tau_minus;
    p.a_plus = resp.a_plus;
    p.b_plus = resp.b_plus;
    p.tau_plus = resp.tau_plus;
    p.alpha_c = pre.alpha_c;
    p.t_c = pre.t_c;
    p.t_p = t_p;
    return p;
}

namespace detail {

struct MapObjective {
    // Minimizes the negative log posterior over z = (log a+, log b+, log tau+):
    // sum of squared residuals / (2 sigma_n^2) plus, unless uniform, the
    // log-normal prior terms x + (x - mu)^2 / (2 sigma^2) per parameter.
    std::span<const double> series;
    int t_p;
    const PrepeakFit* prepeak;
    int obs_end; // exclusive index; observation covers (t_p, obs_end)
    const PriorEntry* prior; // nullptr for the uniform prior
    double mu_a = 0.0, mu_b = 0.0, mu_tau = 0.0;

    double operator()(const std::vector<double>& z) const {
        ResponseFit r;
        r.a_plus = std::exp(clamp_log(z[0]));
        r.b_plus = std::exp(clamp_log(z[1]));
        r.tau_plus = std::exp(clamp_log(z[2]));
        const PeakParams p = assemble_params(*prepeak, r, t_p);

        double nll = 0.0;
        for (int t = t_p + 1; t < obs_end; ++t) {
            const double res = series[t] - eval_model(p, t);
            nll += res * res;
        }
        nll /= 2.0 * prepeak->sigma_n2;
        if (prior) {
            const double terms[3][3] = {
                {z[0], mu_a, prior->a_plus.sigma2},
                {z[1], mu_b, prior->b_plus.sigma2},
                {z[2], mu_tau, prior->tau_plus.sigma2},
            };
            for (const auto& t : terms)
                nll += t[0] + (t[0] - t[1]) * (t[0] - t[1]) / (2.0 * t[2]);
        }
        return nll;
    }
};

} // namespace detail

/// MAP estimate of the response triple from the observed post-peak hours.
/// With the uniform prior this is exactly the least-squares response fit. The
/// optimizer starts from the prior mode, the least-squares solution, and the
/// pre-peak-mirrored parameters, and returns the best posterior among all
/// candidates, so the result never scores worse than any of those points.
inline ResponseFit map_fit_response(const ForecastRequest& req,
                                    const PriorTable* priors,
                                    PriorMode mode = PriorMode::anticipation_category,
                                    const FitOptions& opt = {}) {
    if (mode != PriorMode::none && priors == nullptr)
        throw std::invalid_argument("map_fit_response: prior table required");

    const PriorEntry* entry = nullptr;
    double mu_a = 0, mu_b = 0, mu_tau = 0;
    if (mode != PriorMode::none) {
        entry = mode == PriorMode::anticipation
                    ? &priors->lookup(kPooledCategory)
                    : &priors->lookup(req.category);
        mu_a = priors->log_mean(entry->a_plus, req.prepeak.a_minus);
        mu_b = priors->log_mean(entry->b_plus, req.prepeak.b_minus);
        mu_tau = priors->log_mean(entry->tau_plus, req.prepeak.tau_minus);
    }

    const int obs_end = std::min<int>(static_cast<int>(req.series.size()),
                                      req.t_p + req.t_obs + 1);
    const bool no_data = obs_end <= req.t_p + 1;

    // Pre-peak-mirrored candidate.
    const std::vector<double> mirrored = {
        std::log(std::max(req.prepeak.a_minus, 1e-12)),
        std::log(std::max(req.prepeak.b_minus, 1e-12)),
        std::log(std::max(req.prepeak.tau_minus, 1e-12))};
    // Prior mode of each log-normal: exp(mu - sigma^2).
    std::vector<double> prior_mode = mirrored;
    if (entry) {
        prior_mode = {mu_a - entry->a_plus.sigma2, mu_b - entry->b_plus.sigma2,
                      mu_tau - entry->tau_plus.sigma2};
    }

    auto unpack = [](std::span<const double> z, bool flag) {
        ResponseFit r;
        r.a_plus = std::exp(detail::clamp_log(z[0]));
        r.b_plus = std::exp(detail::clamp_log(z[1]));
        r.tau_plus = std::exp(detail::clamp_log(z[2]));
        r.no_data = flag;
        return r;
    };

    if (no_data) return unpack(prior_mode, true);

    detail::MapObjective posterior{req.series, req.t_p, &req.prepeak,
                                   obs_end,    entry,  mu_a,
                                   mu_b,       mu_tau};
    detail::MapObjective likelihood_only{req.series, req.t_p, &req.prepeak,
                                         obs_end,    nullptr, 0.0,
                                         0.0,        0.0};

    NelderMeadOptions nm;
    nm.rel_tol = opt.rel_tol;
    nm.max_iter = opt.max_iter;

    // Least-squares solution, itself multi-start from the mirrored point.
    NelderMeadResult ls = nelder_mead(likelihood_only, mirrored, nm);
    {
        NelderMeadResult alt = nelder_mead(
            likelihood_only,
            {mirrored[0], mirrored[1], mirrored[2] + 1.5}, nm);
        if (alt.fx < ls.fx) ls = std::move(alt);
    }

    std::vector<std::vector<double>> starts = {prior_mode, ls.x, mirrored};
    std::vector<double> best_x = prior_mode;
    double best_f = posterior(prior_mode);
    for (const std::vector<double>& s : starts) {
        const double fs = posterior(s);
        if (fs < best_f) {
            best_f = fs;
            best_x = s;
        }
        NelderMeadResult r = nelder_mead(posterior, s, nm);
        if (r.fx < best_f) {
            best_f = r.fx;
            best_x = std::move(r.x);
        }
    }
    return unpack(best_x, false);
}

/// Model values on the forecast grid t = t_p + t_obs + 1 .. t_p + horizon.
inline std::vector<double> forecast_series(const PeakParams& params, int t_obs,
                                           int horizon = kDefaultHorizonHours) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(horizon - t_obs, 0)));
    for (int t = t_obs + 1; t <= horizon; ++t)
        out.push_back(eval_model(params, params.t_p + t));
    return out;
}

/// Absolute percentage error of the hourly series: sum of |s - s_hat| over
/// the span divided by the total actual views. Empty when the actual total is
/// zero (the event is then excluded from corpus averages).
inline std::optional<double> ape_timeseries(std::span<const double> actual,
                                            std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("ape_timeseries: mismatched spans");
    double total = 0.0, abs_err = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        total += actual[i];
        abs_err += std::abs(actual[i] - predicted[i]);
    }
    if (total <= 0.0) return std::nullopt;
    return abs_err / total;
}

/// Absolute percentage error of the cumulative count over the span.
inline std::optional<double> ape_cumulative(std::span<const double> actual,
                                            std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("ape_cumulative: mismatched spans");
    double total = 0.0, total_hat = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        total += actual[i];
        total_hat += predicted[i];
    }
    if (total <= 0.0) return std::nullopt;
    return std::abs(total - total_hat) / total;
}

} // namespace peakcast
