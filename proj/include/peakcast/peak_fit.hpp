#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "peakcast/nelder_mead.hpp"
#include "peakcast/peak_model.hpp"
#include "peakcast/rng.hpp"
#include "peakcast/stats.hpp"
#include "peakcast/time_series.hpp"
#include "peakcast/transforms.hpp"
#include "peakcast/window.hpp"

namespace peakcast {

inline constexpr std::uint64_t kDefaultFitSeed = 0x9a1cb0f5u;

struct FitOptions {
    int n_starts = 16;                    // deterministic multi-start count
    std::uint64_t seed = kDefaultFitSeed; // seeds the start perturbations
    double rel_tol = 1e-9;
    int max_iter = 2000;
};

/// A fitted peak model and its quality.
struct PeakFit {
    PeakParams params;
    double r2 = std::numeric_limits<double>::quiet_NaN();
    double residual_variance = 0.0; // RSS / (n_points - 8)
    bool converged = false;
    int n_points = 0; // fitted hours (window length minus the peak hour)
};

/// Pre-peak-only fit: circadian pair plus the anticipation triple. The noise
/// variance estimate feeds the Bayesian response fit downstream.
struct PrepeakFit {
    double alpha_c = 0.0;
    double t_c = 0.0;
    double a_minus = 0.0;
    double b_minus = 0.0;
    double tau_minus = 1.0;
    double sigma_n2 = 1.0; // pre-peak residual variance, floored at 1
    bool converged = false;
    bool tau_identifiable = true; // false when a_minus is negligible
    int n_points = 0;
};

/// Coefficient of determination; the sums skip `exclude` (the peak hour) in
/// both the residual and the variance term, and the series mean is taken over
/// the same points. Empty when the series has zero variance.
inline std::optional<double> r_squared(std::span<const double> observed,
                                       std::span<const double> model,
                                       std::optional<std::size_t> exclude = {}) {
    if (observed.size() != model.size() || observed.empty())
        throw std::invalid_argument("r_squared: mismatched inputs");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (exclude && *exclude == i) continue;
        sum += observed[i];
        ++n;
    }
    if (n == 0) throw std::invalid_argument("r_squared: no points left");
    const double avg = sum / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (exclude && *exclude == i) continue;
        ss_res += (observed[i] - model[i]) * (observed[i] - model[i]);
        ss_tot += (observed[i] - avg) * (observed[i] - avg);
    }
    if (ss_tot <= 0.0) return std::nullopt;
    return 1.0 - ss_res / ss_tot;
}

namespace detail {

// Transformed space: log for the six positive envelope parameters, logit for
// alpha_c, raw (periodic) t_c.
inline std::array<double, 8> pack_full(const PeakParams& p) {
    return {std::log(std::max(p.a_minus, 1e-12)), std::log(std::max(p.b_minus, 1e-12)),
            std::log(std::max(p.tau_minus, 1e-12)), std::log(std::max(p.a_plus, 1e-12)),
            std::log(std::max(p.b_plus, 1e-12)), std::log(std::max(p.tau_plus, 1e-12)),
            to_logit(p.alpha_c), p.t_c};
}

inline PeakParams unpack_full(std::span<const double> z, double t_p) {
    PeakParams p;
    p.a_minus = std::exp(clamp_log(z[0]));
    p.b_minus = std::exp(clamp_log(z[1]));
    p.tau_minus = std::exp(clamp_log(z[2]));
    p.a_plus = std::exp(clamp_log(z[3]));
    p.b_plus = std::exp(clamp_log(z[4]));
    p.tau_plus = std::exp(clamp_log(z[5]));
    p.alpha_c = from_logit(z[6]);
    p.t_c = z[7];
    p.t_p = t_p;
    return p;
}

struct CircadianGuess {
    double alpha_c = 0.3;
    double t_c = 18.0;
};

// Phase and amplitude of the 24-hour Fourier component of the series divided
// by its centered daily moving average.
inline CircadianGuess circadian_guess(std::span<const double> s, std::size_t exclude) {
    const std::size_t n = s.size();
    std::complex<double> z{0.0, 0.0};
    std::size_t used = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t == exclude) continue;
        const std::size_t lo = t >= 12 ? t - 12 : 0;
        const std::size_t hi = std::min(lo + 24, n);
        double ma = 0.0;
        std::size_t cnt = 0;
        for (std::size_t u = lo; u < hi; ++u) {
            if (u == exclude) continue;
            ma += s[u];
            ++cnt;
        }
        if (cnt == 0 || ma <= 0.0) continue;
        ma /= static_cast<double>(cnt);
        const double ratio = s[t] / ma - 1.0;
        const double phase = kCircadianOmega * static_cast<double>(t);
        z += ratio * std::complex<double>(std::cos(phase), -std::sin(phase));
        ++used;
    }
    CircadianGuess g;
    if (used < 48) return g;
    g.alpha_c = std::clamp(2.0 * std::abs(z) / static_cast<double>(used), 0.05, 0.90);
    g.t_c = std::fmod(-std::arg(z) / kCircadianOmega + 48.0, 24.0);
    return g;
}

// Data-driven starting point: baselines from edge medians, amplitudes from
// peak-adjacent values, time constants from a half-decay scan, circadian pair
// from the daily Fourier component.
inline PeakParams heuristic_start(std::span<const double> s, int t_p) {
    const std::size_t n = s.size();
    const CircadianGuess circ = circadian_guess(s, static_cast<std::size_t>(t_p));

    PeakParams p;
    p.alpha_c = circ.alpha_c;
    p.t_c = circ.t_c;
    p.t_p = t_p;

    auto median_of = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> v(s.begin() + lo, s.begin() + hi);
        return v.empty() ? 0.0 : median(std::move(v));
    };
    const std::size_t pre_len = static_cast<std::size_t>(std::max(t_p, 0));
    p.b_minus = std::max(median_of(0, std::min<std::size_t>(48, pre_len)), 1e-3);
    p.b_plus = std::max(
        median_of(n > 48 ? std::max<std::size_t>(n - 48, t_p + 1) : t_p + 1, n), 1e-3);

    auto circadian_at = [&](std::size_t t) {
        return 1.0 + p.alpha_c * std::cos(kCircadianOmega * (static_cast<double>(t) - p.t_c));
    };
    auto deseasoned = [&](std::size_t t) { return s[t] / circadian_at(t); };

    p.a_minus = 1e-3;
    p.tau_minus = 6.0;
    if (t_p >= 2) {
        p.a_minus = std::max(deseasoned(t_p - 1) - p.b_minus, 1e-3);
        std::size_t lag = 1;
        while (static_cast<int>(lag) < t_p &&
               deseasoned(t_p - lag) - p.b_minus > 0.5 * p.a_minus)
            ++lag;
        p.tau_minus = std::max(static_cast<double>(lag) / std::numbers::ln2, 0.5);
    }

    p.a_plus = 1e-3;
    p.tau_plus = 6.0;
    if (static_cast<std::size_t>(t_p) + 2 < n) {
        p.a_plus = std::max(deseasoned(t_p + 1) - p.b_plus, 1e-3);
        std::size_t lag = 1;
        while (static_cast<std::size_t>(t_p) + lag + 1 < n &&
               deseasoned(t_p + lag) - p.b_plus > 0.5 * p.a_plus)
            ++lag;
        p.tau_plus = std::max(static_cast<double>(lag) / std::numbers::ln2, 0.5);
    }
    return p;
}

} // namespace detail

/// Least-squares fit of all eight parameters over the window, the peak hour
/// excluded. Multi-start downhill simplex in transformed space; deterministic
/// for a fixed options seed. `converged` is false only when every start hit
/// the iteration cap, in which case the best effort is still returned.
inline PeakFit fit_peak_values(std::span<const double> s, int t_p,
                               const FitOptions& opt = {}) {
    const std::size_t n = s.size();
    if (n < 48) throw std::invalid_argument("fit_peak: series shorter than 48 hours");
    if (t_p < 0 || static_cast<std::size_t>(t_p) >= n)
        throw std::invalid_argument("fit_peak: peak outside the series");

    auto objective = [&](const std::vector<double>& z) {
        const PeakParams p = detail::unpack_full(z, t_p);
        double sse = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            if (t == static_cast<std::size_t>(t_p)) continue;
            const double r = s[t] - eval_model(p, static_cast<double>(t));
            sse += r * r;
        }
        return sse;
    };

    const std::array<double, 8> base = detail::pack_full(detail::heuristic_start(s, t_p));
    NelderMeadOptions nm;
    nm.rel_tol = opt.rel_tol;
    nm.max_iter = opt.max_iter;

    NelderMeadResult best;
    best.fx = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int k = 0; k < std::max(opt.n_starts, 1); ++k) {
        std::vector<double> z0(base.begin(), base.end());
        if (k > 0) {
            std::mt19937_64 rng = make_rng(opt.seed, static_cast<std::uint64_t>(k));
            std::normal_distribution<double> log_jitter(0.0, 0.8);
            std::normal_distribution<double> logit_jitter(0.0, 1.2);
            std::normal_distribution<double> phase_jitter(0.0, 3.0);
            for (int d = 0; d < 6; ++d) z0[d] += log_jitter(rng);
            z0[6] += logit_jitter(rng);
            z0[7] += phase_jitter(rng);
        }
        NelderMeadResult r = nelder_mead(objective, std::move(z0), nm);
        any_converged = any_converged || r.converged;
        if (r.fx < best.fx) best = std::move(r);
    }

    PeakFit fit;
    fit.params = detail::unpack_full(best.x, t_p);
    fit.converged = any_converged;
    fit.n_points = static_cast<int>(n) - 1;

    std::vector<double> model(n, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        if (t != static_cast<std::size_t>(t_p))
            model[t] = eval_model(fit.params, static_cast<double>(t));
    const auto r2 = r_squared(s, model, static_cast<std::size_t>(t_p));
    fit.r2 = r2 ? *r2 : std::numeric_limits<double>::quiet_NaN();
    fit.residual_variance =
        fit.n_points > 8 ? best.fx / static_cast<double>(fit.n_points - 8) : 0.0;
    return fit;
}

inline PeakFit fit_peak(const TimeSeries& series, const PeakLocation& peak,
                        const FitOptions& opt = {}) {
    const std::vector<double> s = series.as_doubles();
    return fit_peak_values(s, peak.t_p, opt);
}

/// Fits circadian pair and anticipation triple on the pre-peak hours only.
/// sigma_n2 is the pre-peak residual variance floored at 1.
inline PrepeakFit fit_prepeak_values(std::span<const double> s, int t_p,
                                     const FitOptions& opt = {}) {
    if (t_p < 48)
        throw std::invalid_argument("fit_prepeak: fewer than 48 pre-peak hours");
    const std::size_t n_pre = static_cast<std::size_t>(t_p);

    auto unpack = [&](std::span<const double> z) {
        PeakParams p;
        p.a_minus = std::exp(detail::clamp_log(z[0]));
        p.b_minus = std::exp(detail::clamp_log(z[1]));
        p.tau_minus = std::exp(detail::clamp_log(z[2]));
        p.alpha_c = detail::from_logit(z[3]);
        p.t_c = z[4];
        p.t_p = t_p;
        return p;
    };
    auto objective = [&](const std::vector<double>& z) {
        const PeakParams p = unpack(z);
        double sse = 0.0;
        for (std::size_t t = 0; t < n_pre; ++t) {
            const double r = s[t] - eval_model(p, static_cast<double>(t));
            sse += r * r;
        }
        return sse;
    };

    const PeakParams guess =
        detail::heuristic_start(s.first(std::min(s.size(), n_pre + 1)), t_p);
    const std::vector<double> base = {std::log(std::max(guess.a_minus, 1e-12)),
                                      std::log(std::max(guess.b_minus, 1e-12)),
                                      std::log(std::max(guess.tau_minus, 1e-12)),
                                      detail::to_logit(guess.alpha_c), guess.t_c};
    NelderMeadOptions nm;
    nm.rel_tol = opt.rel_tol;
    nm.max_iter = opt.max_iter;

    NelderMeadResult best;
    best.fx = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (int k = 0; k < std::max(opt.n_starts, 1); ++k) {
        std::vector<double> z0 = base;
        if (k > 0) {
            std::mt19937_64 rng = make_rng(opt.seed, 1000 + static_cast<std::uint64_t>(k));
            std::normal_distribution<double> log_jitter(0.0, 0.8);
            std::normal_distribution<double> logit_jitter(0.0, 1.2);
            std::normal_distribution<double> phase_jitter(0.0, 3.0);
            for (int d = 0; d < 3; ++d) z0[d] += log_jitter(rng);
            z0[3] += logit_jitter(rng);
            z0[4] += phase_jitter(rng);
        }
        NelderMeadResult r = nelder_mead(objective, std::move(z0), nm);
        any_converged = any_converged || r.converged;
        if (r.fx < best.fx) best = std::move(r);
    }

    const PeakParams p = unpack(best.x);
    PrepeakFit fit;
    fit.alpha_c = p.alpha_c;
    fit.t_c = p.t_c;
    fit.a_minus = p.a_minus;
    fit.b_minus = p.b_minus;
    fit.tau_minus = p.tau_minus;
    fit.converged = any_converged;
    fit.n_points = static_cast<int>(n_pre);
    const int dof = std::max(static_cast<int>(n_pre) - 5, 1);
    fit.sigma_n2 = std::max(best.fx / static_cast<double>(dof), 1.0);

    // The time constant is meaningless when dropping the anticipation term
    // barely hurts the fit.
    auto flat_objective = [&](const std::vector<double>& z) {
        PeakParams q;
        q.a_minus = 0.0;
        q.b_minus = std::exp(detail::clamp_log(z[0]));
        q.tau_minus = 1.0;
        q.alpha_c = detail::from_logit(z[1]);
        q.t_c = z[2];
        q.t_p = t_p;
        double sse = 0.0;
        for (std::size_t t = 0; t < n_pre; ++t) {
            const double r = s[t] - eval_circadian(q, static_cast<double>(t)) * q.b_minus;
            sse += r * r;
        }
        return sse;
    };
    const NelderMeadResult flat = nelder_mead(
        flat_objective, {best.x[1], best.x[3], best.x[4]}, nm);
    fit.tau_identifiable =
        flat.fx - best.fx > 0.02 * best.fx + 1e-9 * static_cast<double>(n_pre);
    return fit;
}

inline PrepeakFit fit_prepeak(const TimeSeries& series, const PeakLocation& peak,
                              const FitOptions& opt = {}) {
    const std::vector<double> s = series.as_doubles();
    return fit_prepeak_values(s, peak.t_p, opt);
}

} // namespace peakcast
