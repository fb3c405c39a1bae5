#pragma once

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakcast/peak_model.hpp"
#include "peakcast/stats.hpp"

namespace peakcast {

/// A fitted event with its manifest category; the training unit for priors.
struct CategorizedFit {
    PeakParams params;
    std::string category;
    bool converged = true;
};

/// Log-normal prior hyperparameters for one response parameter: the log-space
/// mean is c * (log) q_minus + d, with variance sigma2.
struct PriorRow {
    double c = 0.0;
    double d = 0.0;
    double sigma2 = 1.0;
    bool degenerate = false; // constant regressor in training
};

struct PriorEntry {
    PriorRow a_plus, b_plus, tau_plus;
    int n = 0; // training fits behind this row
};

inline constexpr int kMinCategoryFits = 8;
inline constexpr double kPriorSigma2Floor = 1e-6;
inline constexpr const char* kPooledCategory = "all";

/// Per-category hyperparameters with a pooled fallback row. Regression is in
/// log space by default; the raw-regressor variant is kept behind the flag.
struct PriorTable {
    std::map<std::string, PriorEntry> rows;
    bool log_regressor = true;

    bool has_category(const std::string& category) const {
        return rows.count(category) != 0;
    }

    /// Category row when present, pooled row otherwise.
    const PriorEntry& lookup(const std::string& category) const {
        auto it = rows.find(category);
        if (it != rows.end()) return it->second;
        it = rows.find(kPooledCategory);
        if (it == rows.end()) throw std::logic_error("prior table has no pooled row");
        return it->second;
    }

    /// Log-space prior mean for a response parameter given its anticipation
    /// counterpart.
    double log_mean(const PriorRow& row, double q_minus) const {
        const double reg = log_regressor ? std::log(std::max(q_minus, 1e-12)) : q_minus;
        return row.c * reg + row.d;
    }
};

namespace detail {

inline PriorRow regress_prior(std::span<const double> q_minus,
                              std::span<const double> q_plus, bool log_regressor) {
    std::vector<double> x(q_minus.size()), y(q_plus.size());
    for (std::size_t i = 0; i < q_minus.size(); ++i) {
        x[i] = log_regressor ? std::log(std::max(q_minus[i], 1e-12)) : q_minus[i];
        y[i] = std::log(std::max(q_plus[i], 1e-12));
    }
    const LinearFit f = ols(x, y);
    PriorRow row;
    row.c = f.slope;
    row.d = f.intercept;
    row.sigma2 = std::max(f.residual_variance, kPriorSigma2Floor);
    row.degenerate = f.degenerate;
    return row;
}

} // namespace detail

/// Learns per-category prior hyperparameters by OLS of each log response
/// parameter on its (log) anticipation counterpart. Categories with fewer
/// than kMinCategoryFits converged fits fall back to the pooled row, which is
/// always present and doubles as the category-free variant.
inline PriorTable learn_priors(std::span<const CategorizedFit> fits,
                               bool log_regressor = true) {
    std::map<std::string, std::vector<const CategorizedFit*>> groups;
    std::vector<const CategorizedFit*> pooled;
    for (const CategorizedFit& f : fits) {
        if (!f.converged) continue;
        groups[f.category].push_back(&f);
        pooled.push_back(&f);
    }
    if (pooled.empty())
        throw std::invalid_argument("learn_priors: no converged training fits");

    PriorTable table;
    table.log_regressor = log_regressor;
    auto build = [&](const std::vector<const CategorizedFit*>& fs) {
        std::vector<double> am, bm, tm, ap, bp, tp;
        for (const CategorizedFit* f : fs) {
            am.push_back(f->params.a_minus);
            bm.push_back(f->params.b_minus);
            tm.push_back(f->params.tau_minus);
            ap.push_back(f->params.a_plus);
            bp.push_back(f->params.b_plus);
            tp.push_back(f->params.tau_plus);
        }
        PriorEntry e;
        e.a_plus = detail::regress_prior(am, ap, log_regressor);
        e.b_plus = detail::regress_prior(bm, bp, log_regressor);
        e.tau_plus = detail::regress_prior(tm, tp, log_regressor);
        e.n = static_cast<int>(fs.size());
        return e;
    };

    table.rows[kPooledCategory] = build(pooled);
    for (const auto& [category, fs] : groups)
        if (static_cast<int>(fs.size()) >= kMinCategoryFits && category != kPooledCategory)
            table.rows[category] = build(fs);
    return table;
}

} // namespace peakcast
