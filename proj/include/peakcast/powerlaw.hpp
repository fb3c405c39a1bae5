#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakcast/nelder_mead.hpp"
#include "peakcast/stats.hpp"
#include "peakcast/transforms.hpp"

namespace peakcast {

/// Symmetric-form power-law peak baseline: a |t - t_p|^gamma on each side of
/// the peak, which itself is excluded (singular for negative exponents).
struct PowerLawParams {
    double a_minus = 0.0;
    double gamma_minus = 0.0;
    double a_plus = 0.0;
    double gamma_plus = 0.0;
};

/// Post-peak branch value at `offset` hours after the peak (offset >= 1).
inline double powerlaw_eval_post(const PowerLawParams& p, double offset) {
    if (offset <= 0.0)
        throw std::invalid_argument("powerlaw_eval_post: offset must be positive");
    return p.a_plus * std::pow(offset, p.gamma_plus);
}

inline double powerlaw_eval_pre(const PowerLawParams& p, double offset) {
    if (offset <= 0.0)
        throw std::invalid_argument("powerlaw_eval_pre: offset must be positive");
    return p.a_minus * std::pow(offset, p.gamma_minus);
}

namespace detail {

// One branch: least squares of a * d^gamma against values[d - 1], d = 1..m,
// warm-started from an OLS line in log-log space.
inline std::pair<double, double> powerlaw_fit_branch(std::span<const double> values) {
    const std::size_t m = values.size();
    if (m == 0) return {0.0, 0.0};

    std::vector<double> lx, ly;
    for (std::size_t d = 1; d <= m; ++d) {
        if (values[d - 1] > 0.0) {
            lx.push_back(std::log(static_cast<double>(d)));
            ly.push_back(std::log(values[d - 1]));
        }
    }
    double a0 = 1.0, g0 = -1.0;
    if (lx.size() >= 2) {
        const LinearFit f = ols(lx, ly);
        g0 = f.slope;
        a0 = std::exp(f.intercept);
    } else if (lx.size() == 1) {
        a0 = std::exp(ly[0]);
        g0 = 0.0;
    }

    auto objective = [&](const std::vector<double>& z) {
        const double a = std::exp(clamp_log(z[0]));
        const double g = z[1];
        double sse = 0.0;
        for (std::size_t d = 1; d <= m; ++d) {
            const double r = values[d - 1] - a * std::pow(static_cast<double>(d), g);
            sse += r * r;
        }
        return sse;
    };
    NelderMeadOptions nm;
    nm.rel_tol = 1e-10;
    nm.max_iter = 1500;
    const NelderMeadResult r =
        nelder_mead(objective, {std::log(std::max(a0, 1e-12)), g0}, nm);
    return {std::exp(clamp_log(r.x[0])), r.x[1]};
}

} // namespace detail

/// Fits both branches by least squares. The post branch uses offsets up to
/// `post_end` (exclusive series index) when given, so prediction-time fits
/// can stop at the observation boundary.
inline PowerLawParams powerlaw_fit(std::span<const double> s, int t_p,
                                   std::optional<int> post_end = {}) {
    const int n = static_cast<int>(s.size());
    if (t_p < 0 || t_p >= n) throw std::invalid_argument("powerlaw_fit: bad peak");

    PowerLawParams p;
    // Pre branch: values at offsets 1..t_p before the peak.
    std::vector<double> pre;
    for (int d = 1; d <= t_p; ++d) pre.push_back(s[t_p - d]);
    auto [am, gm] = detail::powerlaw_fit_branch(pre);
    p.a_minus = am;
    p.gamma_minus = gm;

    const int end = std::min(post_end.value_or(n), n);
    std::vector<double> post;
    for (int t = t_p + 1; t < end; ++t) post.push_back(s[t]);
    auto [ap, gp] = detail::powerlaw_fit_branch(post);
    p.a_plus = ap;
    p.gamma_plus = gp;
    return p;
}

/// Post-peak forecast on offsets t_obs + 1 .. horizon after the peak.
inline std::vector<double> powerlaw_forecast(const PowerLawParams& p, int t_obs,
                                             int horizon) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(horizon - t_obs, 0)));
    for (int d = t_obs + 1; d <= horizon; ++d)
        out.push_back(powerlaw_eval_post(p, d));
    return out;
}

} // namespace peakcast
