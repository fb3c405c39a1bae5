#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace peakcast {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty input");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Population variance (divide by n).
inline double variance(std::span<const double> x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

// Sample variance (divide by n - 1); 0 for n < 2.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

// Linear-interpolation quantile on a copy of the data, q in [0, 1].
inline double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw std::invalid_argument("quantile: empty input");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= x.size()) return x.back();
    const double frac = pos - static_cast<double>(lo);
    return x[lo] * (1.0 - frac) + x[lo + 1] * frac;
}

inline double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

// Simple OLS of y on x: y ~ slope * x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_variance = 0.0; // RSS / (n - 2), 0 when n <= 2
    bool degenerate = false;        // constant regressor
};

inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("ols: mismatched or empty inputs");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinearFit fit;
    if (sxx < 1e-12 * n) {
        fit.slope = 0.0;
        fit.intercept = my;
        fit.degenerate = true;
    } else {
        fit.slope = sxy / sxx;
        fit.intercept = my - fit.slope * mx;
    }
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.slope * x[i] + fit.intercept);
            rss += r * r;
        }
        fit.residual_variance = rss / (n - 2.0);
    }
    return fit;
}

} // namespace peakcast
