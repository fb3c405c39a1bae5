#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "peakcast/peak_model.hpp"

namespace peakcast {

/// A convex mix of three reference daily waves (US, UK, AU), each of the form
/// 1 + 0.9 * cos(omega * (t - t_X)). Weights live on the probability simplex.
struct RegionMix {
    double p_us = 1.0;
    double p_uk = 0.0;
    double p_au = 0.0;
    // Reference daily peak hours for the US, UK, and AU waves.
    std::array<double, 3> t_ref{20.6, 16.2, 5.9};
    // Common amplitude of the reference waves.
    static constexpr double kAlphaBar = 0.9;

    std::array<double, 3> weights() const { return {p_us, p_uk, p_au}; }

    bool valid(double tol = 1e-9) const {
        return p_us >= -tol && p_uk >= -tol && p_au >= -tol &&
               std::abs(p_us + p_uk + p_au - 1.0) <= tol;
    }

    double eval(double t) const {
        double v = 0.0;
        const std::array<double, 3> p = weights();
        for (int i = 0; i < 3; ++i)
            v += p[i] * (1.0 + kAlphaBar * std::cos(kCircadianOmega * (t - t_ref[i])));
        return v;
    }
};

namespace detail {

// Least squares of ||A p - c||^2 over the 2-simplex for a 24x3 design, by
// exact enumeration: interior stationary point, the three edges, and the
// three corners. The best feasible candidate is the global minimum of this
// convex problem.
inline std::array<double, 3> simplex_least_squares(
    const std::array<std::array<double, 3>, 24>& a,
    const std::array<double, 24>& c) {
    // Substitute p2 = 1 - p0 - p1 and minimize over (p0, p1) unconstrained:
    // residual_h = (a0 - a2) p0 + (a1 - a2) p1 + a2 - c.
    auto objective = [&](double p0, double p1) {
        const double p2 = 1.0 - p0 - p1;
        double s = 0.0;
        for (int h = 0; h < 24; ++h) {
            const double r = a[h][0] * p0 + a[h][1] * p1 + a[h][2] * p2 - c[h];
            s += r * r;
        }
        return s;
    };

    double best = std::numeric_limits<double>::infinity();
    std::array<double, 3> best_p{1.0, 0.0, 0.0};
    auto consider = [&](double p0, double p1) {
        const double p2 = 1.0 - p0 - p1;
        if (p0 < -1e-12 || p1 < -1e-12 || p2 < -1e-12) return;
        const double v = objective(p0, p1);
        if (v < best) {
            best = v;
            best_p = {std::max(p0, 0.0), std::max(p1, 0.0), std::max(p2, 0.0)};
        }
    };

    // Interior candidate: 2x2 normal equations in (p0, p1).
    double g00 = 0, g01 = 0, g11 = 0, r0 = 0, r1 = 0;
    for (int h = 0; h < 24; ++h) {
        const double u0 = a[h][0] - a[h][2];
        const double u1 = a[h][1] - a[h][2];
        const double rhs = c[h] - a[h][2];
        g00 += u0 * u0;
        g01 += u0 * u1;
        g11 += u1 * u1;
        r0 += u0 * rhs;
        r1 += u1 * rhs;
    }
    const double det = g00 * g11 - g01 * g01;
    if (std::abs(det) > 1e-12) {
        consider((g11 * r0 - g01 * r1) / det, (g00 * r1 - g01 * r0) / det);
    }

    // Edges: one weight fixed at zero, 1-D least squares clamped to [0, 1].
    // Edge p_i = s, p_j = 1 - s, p_k = 0.
    const int edges[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
    for (const auto& e : edges) {
        double num = 0, den = 0;
        for (int h = 0; h < 24; ++h) {
            const double u = a[h][e[0]] - a[h][e[1]];
            const double rhs = c[h] - a[h][e[1]];
            num += u * rhs;
            den += u * u;
        }
        double s = den > 1e-12 ? num / den : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        std::array<double, 3> p{};
        p[e[0]] = s;
        p[e[1]] = 1.0 - s;
        p[e[2]] = 0.0;
        consider(p[0], p[1]);
    }

    // Corners.
    consider(1.0, 0.0);
    consider(0.0, 1.0);
    consider(0.0, 0.0);
    return best_p;
}

} // namespace detail

/// Decomposes a fitted circadian wave 1 + alpha_c cos(omega (t - t_c)) into a
/// convex combination of the three reference regional waves, minimizing the
/// squared distance over one 24-hour period sampled hourly. The result always
/// lies on the probability simplex; a flat input (alpha_c = 0) yields the
/// minimum-norm simplex solution.
inline RegionMix decompose_circadian(double alpha_c, double t_c,
                                     const RegionMix& mix_template = RegionMix{}) {
    if (!(alpha_c >= 0.0 && alpha_c < 1.0))
        throw std::invalid_argument("decompose_circadian: alpha_c outside [0, 1)");

    std::array<std::array<double, 3>, 24> a{};
    std::array<double, 24> c{};
    for (int h = 0; h < 24; ++h) {
        for (int i = 0; i < 3; ++i)
            a[h][i] = 1.0 + RegionMix::kAlphaBar *
                                std::cos(kCircadianOmega * (h - mix_template.t_ref[i]));
        c[h] = 1.0 + alpha_c * std::cos(kCircadianOmega * (h - t_c));
    }
    const std::array<double, 3> p = detail::simplex_least_squares(a, c);

    RegionMix out = mix_template;
    // Renormalize away any clamp residue.
    const double total = p[0] + p[1] + p[2];
    out.p_us = p[0] / total;
    out.p_uk = p[1] / total;
    out.p_au = p[2] / total;
    return out;
}

} // namespace peakcast
