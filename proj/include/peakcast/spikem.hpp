#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakcast/nelder_mead.hpp"
#include "peakcast/peak_fit.hpp"
#include "peakcast/rng.hpp"

namespace peakcast {

/// Self-exciting difference-equation baseline: a susceptible population u
/// drained by activity x, a power-law memory kernel, one exogenous shock at
/// t_b, and a sinusoidal daily modulation.
struct SpikeMParams {
    double u0 = 0.0;   // initial susceptible population
    double beta = 0.0; // infectiousness scale of the kernel
    int t_b = 0;       // shock hour
    double s_b = 0.0;  // shock magnitude
    double eps0 = 0.0; // background rate
    double p_a = 0.0;  // daily modulation amplitude, in [0, 1]
    double p_s = 0.0;  // daily modulation phase (hours)

    bool valid() const {
        return u0 >= 0.0 && beta >= 0.0 && s_b >= 0.0 && eps0 >= 0.0 &&
               p_a >= 0.0 && p_a <= 1.0;
    }
};

// Memory kernel truncated at the window length.
inline constexpr int kSpikeMKernelLags = 504;

/// Iterates the recurrence
///   x(t+1) = p(t+1) (u(t) * sum_{k=t_b}^{t} (x(k) + s(k)) f(t+1-k) + eps0)
///   u(t+1) = u(t) - x(t+1)
/// with p(t) = 1 - 0.5 p_a (1 + sin(omega (t + p_s))), f(tau) = beta tau^-1.5,
/// s(t) = s_b at t_b and 0 elsewhere. x vanishes before the shock. The
/// population-driven part of one step is capped at the remaining population
/// and u is floored at zero, so total activity never exceeds u(0) plus the
/// background pathway.
inline std::vector<double> spikem_simulate(const SpikeMParams& p, int horizon) {
    if (!p.valid()) throw std::invalid_argument("spikem_simulate: invalid parameters");
    if (horizon < 0) throw std::invalid_argument("spikem_simulate: negative horizon");
    if (p.t_b < 0 || p.t_b >= horizon)
        throw std::invalid_argument("spikem_simulate: shock outside horizon");

    static thread_local std::vector<double> kernel;
    if (kernel.size() < static_cast<std::size_t>(kSpikeMKernelLags + 1)) {
        kernel.resize(kSpikeMKernelLags + 1, 0.0);
        for (int tau = 1; tau <= kSpikeMKernelLags; ++tau)
            kernel[tau] = std::pow(static_cast<double>(tau), -1.5);
    }
    auto modulation = [&](int t) {
        return 1.0 - 0.5 * p.p_a *
                         (1.0 + std::sin(kCircadianOmega * (t + p.p_s)));
    };

    std::vector<double> x(horizon, 0.0);
    double u = p.u0;
    for (int t = p.t_b; t + 1 < horizon; ++t) {
        double conv = 0.0;
        const int k_lo = std::max(p.t_b, t + 1 - kSpikeMKernelLags);
        for (int k = k_lo; k <= t; ++k) {
            const double activity = x[k] + (k == p.t_b ? p.s_b : 0.0);
            conv += activity * kernel[t + 1 - k];
        }
        const double mod = modulation(t + 1);
        const double from_population = std::min(mod * u * p.beta * conv, u);
        x[t + 1] = from_population + mod * p.eps0;
        u = std::max(u - x[t + 1], 0.0);
    }
    return x;
}

struct SpikeMFit {
    SpikeMParams params;
    double sse = 0.0;
    bool converged = false;
};

namespace detail {

// Total mass of the power-law kernel over the truncated lag range.
inline double spikem_kernel_mass() {
    static const double mass = [] {
        double m = 0.0;
        for (int tau = 1; tau <= kSpikeMKernelLags; ++tau)
            m += std::pow(static_cast<double>(tau), -1.5);
        return m;
    }();
    return mass;
}

// Start point targeting a sub-critical cascade: u0 absorbs the total excess
// activity, beta is scaled so u0 * beta * (kernel mass) sits below one, and
// the shock reproduces the observed peak in the first step after t_b.
inline std::array<double, 6> spikem_heuristic(std::span<const double> s, int t_p,
                                              double reproduction) {
    const std::size_t n = s.size();
    std::vector<double> head(s.begin(), s.begin() + std::min<std::size_t>(48, n));
    const double base = head.empty() ? 0.0 : median(std::move(head));

    double excess = 0.0;
    for (double v : s) excess += std::max(v - base, 0.0);
    const double u0 = std::max(excess, 10.0);
    const double beta = reproduction / (u0 * spikem_kernel_mass());
    const double peak_value = s[static_cast<std::size_t>(t_p)];
    const double s_b = std::max(peak_value, 1.0) / std::max(u0 * beta, 1e-12);
    const double eps0 = std::max(base, 0.1);

    const CircadianGuess circ = circadian_guess(s, static_cast<std::size_t>(t_p));
    const double p_a = std::clamp(2.0 * circ.alpha_c / (1.0 + circ.alpha_c), 0.05, 0.95);
    const double p_s = std::fmod(-circ.t_c - 6.0 + 96.0, 24.0);

    return {std::log(u0), std::log(beta), std::log(s_b), std::log(eps0),
            to_logit(p_a), p_s};
}

} // namespace detail

/// Least squares over the seven parameters; the shock hour is searched over
/// integer candidates in [t_p - 48, t_p] (coarse scan plus refinement), the
/// six continuous parameters by downhill simplex in transformed space.
inline SpikeMFit spikem_fit(std::span<const double> s, int t_p,
                            const FitOptions& opt = {}) {
    const int n = static_cast<int>(s.size());
    if (n < 8 || t_p < 0 || t_p >= n)
        throw std::invalid_argument("spikem_fit: bad series or peak");

    auto unpack = [&](std::span<const double> z, int t_b) {
        SpikeMParams p;
        p.u0 = std::exp(detail::clamp_log(z[0]));
        p.beta = std::exp(detail::clamp_log(z[1]));
        p.s_b = std::exp(detail::clamp_log(z[2]));
        p.eps0 = std::exp(detail::clamp_log(z[3]));
        p.p_a = detail::from_logit(z[4]);
        p.p_s = z[5];
        p.t_b = t_b;
        return p;
    };
    auto sse_for = [&](const SpikeMParams& p) {
        const std::vector<double> x = spikem_simulate(p, n);
        double sse = 0.0;
        for (int t = 0; t < n; ++t) {
            const double r = s[t] - x[t];
            sse += r * r;
        }
        return sse;
    };

    const std::array<double, 6> hot = detail::spikem_heuristic(s, t_p, 0.8);
    const std::array<double, 6> cold = detail::spikem_heuristic(s, t_p, 0.2);
    NelderMeadOptions nm;
    nm.rel_tol = std::max(opt.rel_tol, 1e-8);
    nm.max_iter = std::min(opt.max_iter, 400);

    SpikeMFit best;
    best.sse = std::numeric_limits<double>::infinity();
    auto try_t_b = [&](int t_b, bool with_jitter) {
        if (t_b < 0 || t_b >= t_p + 1) return;
        auto objective = [&](const std::vector<double>& z) {
            return sse_for(unpack(z, t_b));
        };
        std::vector<std::vector<double>> starts = {
            std::vector<double>(hot.begin(), hot.end()),
            std::vector<double>(cold.begin(), cold.end())};
        if (with_jitter) {
            std::mt19937_64 rng =
                make_rng(opt.seed, 5000 + static_cast<std::uint64_t>(t_b) * 8);
            std::normal_distribution<double> jitter(0.0, 0.8);
            std::vector<double> z0(hot.begin(), hot.end());
            for (int d = 0; d < 4; ++d) z0[d] += jitter(rng);
            z0[4] += jitter(rng);
            z0[5] += 3.0 * jitter(rng);
            starts.push_back(std::move(z0));
        }
        for (std::vector<double>& z0 : starts) {
            NelderMeadResult r = nelder_mead(objective, std::move(z0), nm);
            if (r.fx < best.sse) {
                best.sse = r.fx;
                best.params = unpack(r.x, t_b);
                best.converged = r.converged;
            }
        }
    };

    for (int off : {48, 36, 26, 18, 12, 8, 5, 3, 2, 1, 0}) try_t_b(t_p - off, true);
    const int t_b_star = best.params.t_b;
    for (int d : {-2, -1, 1, 2}) try_t_b(t_b_star + d, false);

    // Polish the incumbent with a longer budget.
    {
        const SpikeMParams& q = best.params;
        const std::vector<double> z0 = {std::log(std::max(q.u0, 1e-12)),
                                        std::log(std::max(q.beta, 1e-12)),
                                        std::log(std::max(q.s_b, 1e-12)),
                                        std::log(std::max(q.eps0, 1e-12)),
                                        detail::to_logit(q.p_a), q.p_s};
        auto objective = [&](const std::vector<double>& z) {
            return sse_for(unpack(z, best.params.t_b));
        };
        NelderMeadOptions polish = nm;
        polish.max_iter = 1200;
        NelderMeadResult r = nelder_mead(objective, z0, polish);
        if (r.fx < best.sse) {
            best.sse = r.fx;
            best.params = unpack(r.x, best.params.t_b);
            best.converged = best.converged || r.converged;
        }
    }
    return best;
}

} // namespace peakcast
