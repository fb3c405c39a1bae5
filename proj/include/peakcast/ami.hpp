#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace peakcast {

struct AmiResult {
    double value = 0.0;
    bool trivial = false; // both partitions single-class; value fixed at 1
};

namespace detail {

inline std::vector<int> relabel(std::span<const int> labels, int& k) {
    std::unordered_map<int, int> map;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = map.emplace(labels[i], static_cast<int>(map.size()));
        out[i] = it->second;
    }
    k = static_cast<int>(map.size());
    return out;
}

} // namespace detail

/// Adjusted mutual information between two labelings of the same items,
/// chance-corrected against the hypergeometric (fixed-marginals permutation)
/// model with natural logarithms:
///   AMI = (MI - E[MI]) / (mean(H_a, H_b) - E[MI]).
/// Two single-class partitions agree perfectly by convention (value 1,
/// flagged as trivial).
inline AmiResult ami_detailed(std::span<const int> labels_a,
                              std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size() || labels_a.empty())
        throw std::invalid_argument("ami: mismatched or empty labelings");
    const double n = static_cast<double>(labels_a.size());

    int ka = 0, kb = 0;
    const std::vector<int> a = detail::relabel(labels_a, ka);
    const std::vector<int> b = detail::relabel(labels_b, kb);

    std::vector<std::int64_t> contingency(static_cast<std::size_t>(ka) * kb, 0);
    std::vector<std::int64_t> row(ka, 0), col(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++contingency[static_cast<std::size_t>(a[i]) * kb + b[i]];
        ++row[a[i]];
        ++col[b[i]];
    }

    auto entropy = [&](const std::vector<std::int64_t>& counts) {
        double h = 0.0;
        for (std::int64_t c : counts)
            if (c > 0) h -= (c / n) * std::log(c / n);
        return h;
    };
    const double h_a = entropy(row), h_b = entropy(col);
    if (h_a == 0.0 && h_b == 0.0) return {1.0, true};

    double mi = 0.0;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            const std::int64_t nij = contingency[static_cast<std::size_t>(i) * kb + j];
            if (nij > 0)
                mi += (nij / n) * std::log(n * nij / (static_cast<double>(row[i]) * col[j]));
        }
    }

    // Expected MI under fixed marginals; cell counts follow a hypergeometric
    // law, probabilities evaluated through log-gamma.
    auto lg = [](std::int64_t v) { return std::lgamma(static_cast<double>(v) + 1.0); };
    const std::int64_t ni = labels_a.size();
    double emi = 0.0;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            const std::int64_t ai = row[i], bj = col[j];
            const std::int64_t lo = std::max<std::int64_t>(1, ai + bj - ni);
            const std::int64_t hi = std::min(ai, bj);
            for (std::int64_t nij = lo; nij <= hi; ++nij) {
                const double log_p = lg(ai) + lg(bj) + lg(ni - ai) + lg(ni - bj) -
                                     lg(ni) - lg(nij) - lg(ai - nij) - lg(bj - nij) -
                                     lg(ni - ai - bj + nij);
                const double term =
                    (nij / n) * std::log(n * nij / (static_cast<double>(ai) * bj));
                emi += term * std::exp(log_p);
            }
        }
    }

    // Degenerate denominator: the normalizer equals the expected MI, so the
    // score carries no information; report chance (or the saturated sign when
    // the numerator is genuinely nonzero).
    const double denom = 0.5 * (h_a + h_b) - emi;
    if (std::abs(denom) < 1e-12)
        return {std::abs(mi - emi) < 1e-12 ? 0.0 : (mi > emi ? 1.0 : -1.0), false};
    return {std::clamp((mi - emi) / denom, -1.0, 1.0), false};
}

inline double adjusted_mutual_information(std::span<const int> labels_a,
                                          std::span<const int> labels_b) {
    return ami_detailed(labels_a, labels_b).value;
}

} // namespace peakcast
