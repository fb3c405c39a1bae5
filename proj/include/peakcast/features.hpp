#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakcast/peak_model.hpp"

namespace peakcast {

// Baselines are floored before the log transform; fitted values can reach
// zero for events with no resting traffic.
inline constexpr double kFeatureBaselineFloor = 1e-3;

/// Model-parameter feature vector for clustering: the six heavy-tailed
/// envelope parameters log-transformed, the circadian pair passed through.
/// With `circular_tc` the daily phase enters as (sin, cos) instead of raw
/// hours, giving 9 dimensions; the 8-dimensional raw form is the default.
inline std::vector<double> build_feature_vector(const PeakParams& p,
                                                bool circular_tc = false) {
    auto log_floor = [](double v, double floor) {
        return std::log(std::max(v, floor));
    };
    std::vector<double> f = {log_floor(p.a_minus, 1e-12),
                             log_floor(p.a_plus, 1e-12),
                             log_floor(p.tau_minus, 1e-12),
                             log_floor(p.tau_plus, 1e-12),
                             log_floor(p.b_minus, kFeatureBaselineFloor),
                             log_floor(p.b_plus, kFeatureBaselineFloor),
                             p.alpha_c};
    if (circular_tc) {
        f.push_back(std::sin(kCircadianOmega * p.t_c));
        f.push_back(std::cos(kCircadianOmega * p.t_c));
    } else {
        f.push_back(std::fmod(std::fmod(p.t_c, 24.0) + 24.0, 24.0));
    }
    for (double v : f)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature");
    return f;
}

/// Fractions of total views before, during, and after the peak hour. Sums to
/// one exactly; empty for an all-zero window.
inline std::optional<std::array<double, 3>> fraction_features(
    std::span<const double> s, int t_p) {
    if (t_p < 0 || static_cast<std::size_t>(t_p) >= s.size())
        throw std::invalid_argument("fraction_features: peak outside series");
    double pre = 0.0, post = 0.0;
    for (int t = 0; t < t_p; ++t) pre += s[t];
    for (std::size_t t = t_p + 1; t < s.size(); ++t) post += s[t];
    const double peak = s[static_cast<std::size_t>(t_p)];
    const double total = pre + peak + post;
    if (total <= 0.0) return std::nullopt;
    return std::array<double, 3>{pre / total, peak / total, post / total};
}

/// Per-dimension z-scoring fit on a corpus; constant dimensions get unit
/// scale so they pass through centered.
class Standardizer {
public:
    static Standardizer fit(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw std::invalid_argument("Standardizer: empty corpus");
        const std::size_t d = rows.front().size();
        Standardizer s;
        s.mean_.assign(d, 0.0);
        s.scale_.assign(d, 1.0);
        for (const auto& r : rows) {
            if (r.size() != d) throw std::invalid_argument("Standardizer: ragged rows");
            for (std::size_t j = 0; j < d; ++j) s.mean_[j] += r[j];
        }
        for (double& m : s.mean_) m /= static_cast<double>(rows.size());
        std::vector<double> var(d, 0.0);
        for (const auto& r : rows)
            for (std::size_t j = 0; j < d; ++j)
                var[j] += (r[j] - s.mean_[j]) * (r[j] - s.mean_[j]);
        for (std::size_t j = 0; j < d; ++j) {
            var[j] /= static_cast<double>(rows.size());
            s.scale_[j] = var[j] > 1e-24 ? std::sqrt(var[j]) : 1.0;
        }
        return s;
    }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j)
            out[j] = (x[j] - mean_[j]) / scale_[j];
        return out;
    }

    std::vector<double> invert(std::span<const double> z) const {
        std::vector<double> out(z.size());
        for (std::size_t j = 0; j < z.size(); ++j)
            out[j] = z[j] * scale_[j] + mean_[j];
        return out;
    }

    std::vector<std::vector<double>> apply_all(
        const std::vector<std::vector<double>>& rows) const {
        std::vector<std::vector<double>> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(apply(r));
        return out;
    }

    const std::vector<double>& means() const { return mean_; }
    const std::vector<double>& scales() const { return scale_; }

private:
    std::vector<double> mean_, scale_;
};

} // namespace peakcast
