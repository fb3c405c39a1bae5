// Test-only oracles, kept independent of the library implementations they
// check: a straight-line reimplementation of the peak model, trapezoidal
// quadrature for envelope areas, exact-combinatorics expected mutual
// information, and set-partition enumeration.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace oracle {

// Straight-line evaluation of the circadian-modulated two-sided exponential
// peak, written independently of the library path.
inline double reference_peak_model(double a_minus, double b_minus, double tau_minus,
                                   double a_plus, double b_plus, double tau_plus,
                                   double alpha_c, double t_c, double t_p, double t) {
    const double omega = 2.0 * 3.14159265358979323846 / 24.0;
    double envelope;
    if (t < t_p) {
        envelope = a_minus * std::exp((t - t_p) / tau_minus) + b_minus;
    } else {
        envelope = a_plus * std::exp(-(t - t_p) / tau_plus) + b_plus;
    }
    const double circadian = 1.0 + alpha_c * std::cos(omega * (t - t_c));
    return circadian * envelope;
}

// Composite trapezoid of f over [lo, hi] with the given step.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi,
                        double step) {
    const int n = static_cast<int>(std::ceil((hi - lo) / step));
    const double h = (hi - lo) / n;
    double sum = 0.5 * (f(lo) + f(hi));
    for (int i = 1; i < n; ++i) sum += f(lo + i * h);
    return sum * h;
}

// Expected mutual information under the fixed-marginals permutation model,
// evaluated with exact integer factorials (valid for n <= 20) instead of
// log-gamma. Labels must be 0-based contiguous.
inline double exact_expected_mi(std::span<const int> a, std::span<const int> b) {
    const int n = static_cast<int>(a.size());
    int ka = 0, kb = 0;
    for (int v : a) ka = std::max(ka, v + 1);
    for (int v : b) kb = std::max(kb, v + 1);
    std::vector<std::int64_t> ai(ka, 0), bj(kb, 0);
    for (int v : a) ++ai[v];
    for (int v : b) ++bj[v];

    std::array<long double, 21> fact{};
    fact[0] = 1.0L;
    for (int i = 1; i <= 20; ++i) fact[i] = fact[i - 1] * i;

    long double emi = 0.0L;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            const std::int64_t lo = std::max<std::int64_t>(1, ai[i] + bj[j] - n);
            const std::int64_t hi = std::min(ai[i], bj[j]);
            for (std::int64_t nij = lo; nij <= hi; ++nij) {
                const long double prob =
                    fact[ai[i]] * fact[bj[j]] * fact[n - ai[i]] * fact[n - bj[j]] /
                    (fact[n] * fact[nij] * fact[ai[i] - nij] * fact[bj[j] - nij] *
                     fact[n - ai[i] - bj[j] + nij]);
                const long double term =
                    (static_cast<long double>(nij) / n) *
                    std::log(static_cast<long double>(n) * nij /
                             (static_cast<long double>(ai[i]) * bj[j]));
                emi += term * prob;
            }
        }
    }
    return static_cast<double>(emi);
}

inline double exact_entropy(std::span<const int> labels) {
    int k = 0;
    for (int v : labels) k = std::max(k, v + 1);
    std::vector<int> counts(k, 0);
    for (int v : labels) ++counts[v];
    const double n = static_cast<double>(labels.size());
    double h = 0.0;
    for (int c : counts)
        if (c > 0) h -= (c / n) * std::log(c / n);
    return h;
}

inline double exact_mi(std::span<const int> a, std::span<const int> b) {
    int ka = 0, kb = 0;
    for (int v : a) ka = std::max(ka, v + 1);
    for (int v : b) kb = std::max(kb, v + 1);
    std::vector<int> cont(static_cast<std::size_t>(ka) * kb, 0), ai(ka, 0), bj(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++cont[static_cast<std::size_t>(a[i]) * kb + b[i]];
        ++ai[a[i]];
        ++bj[b[i]];
    }
    const double n = static_cast<double>(a.size());
    double mi = 0.0;
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j) {
            const int nij = cont[static_cast<std::size_t>(i) * kb + j];
            if (nij > 0)
                mi += (nij / n) *
                      std::log(n * nij / (static_cast<double>(ai[i]) * bj[j]));
        }
    return mi;
}

// AMI assembled purely from the exact pieces above, with the same degenerate
// conventions as the implementation under test.
inline double exact_ami(std::span<const int> a, std::span<const int> b) {
    const double ha = exact_entropy(a), hb = exact_entropy(b);
    if (ha == 0.0 && hb == 0.0) return 1.0;
    const double emi = exact_expected_mi(a, b);
    const double mi = exact_mi(a, b);
    const double denom = 0.5 * (ha + hb) - emi;
    if (std::abs(denom) < 1e-12)
        return std::abs(mi - emi) < 1e-12 ? 0.0 : (mi > emi ? 1.0 : -1.0);
    return std::clamp((mi - emi) / denom, -1.0, 1.0);
}

// All set partitions of {0..n-1} as restricted-growth label vectors.
inline std::vector<std::vector<int>> all_partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> labels(n, 0);
    std::function<void(int, int)> rec = [&](int i, int max_used) {
        if (i == n) {
            out.push_back(labels);
            return;
        }
        for (int v = 0; v <= max_used + 1; ++v) {
            labels[i] = v;
            rec(i + 1, std::max(max_used, v));
        }
    };
    rec(0, -1);
    return out;
}

} // namespace oracle
