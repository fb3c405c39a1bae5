#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "peakcast/features.hpp"
#include "peakcast/rng.hpp"

namespace peakcast {

inline constexpr std::uint64_t kDefaultSvmSeed = 0x5b1c3a7du;

struct SvmOptions {
    double C = 1.0;
    double gap_tol = 1e-4; // duality gap stopping threshold
    int max_epochs = 2000;
    std::uint64_t seed = kDefaultSvmSeed;
};

/// One-vs-rest linear classifier. Weights include a trailing bias term
/// (inputs are implicitly augmented with a constant 1).
struct LinearSvmModel {
    int n_classes = 0;
    int dim = 0;
    std::vector<std::vector<double>> weights; // per class, size dim + 1

    double score(int cls, std::span<const double> x) const {
        const std::vector<double>& w = weights[cls];
        double s = w[dim];
        for (int j = 0; j < dim; ++j) s += w[j] * x[j];
        return s;
    }

    /// Maximum margin score; ties break to the lowest class index.
    int predict(std::span<const double> x) const {
        int best = 0;
        double best_score = score(0, x);
        for (int c = 1; c < n_classes; ++c) {
            const double s = score(c, x);
            if (s > best_score) {
                best_score = s;
                best = c;
            }
        }
        return best;
    }
};

namespace detail {

// Dual coordinate descent for the squared-hinge binary SVM with a bias
// feature: min_w 0.5 ||w||^2 + C sum max(0, 1 - y_i w.x_i)^2. The dual adds
// a diagonal 1/(2C) term and drops the upper box bound. Stops when the
// duality gap falls below gap_tol.
inline std::vector<double> svm_binary_dcd(const std::vector<std::vector<double>>& x,
                                          const std::vector<int>& y, // +1 / -1
                                          const SvmOptions& opt, std::uint64_t seed) {
    const std::size_t n = x.size();
    const std::size_t d = x.front().size(); // includes the bias slot
    const double diag = 1.0 / (2.0 * opt.C);
    std::vector<double> w(d, 0.0), alpha(n, 0.0), qii(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double q = diag;
        for (double v : x[i]) q += v * v;
        qii[i] = q;
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < opt.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            double wx = 0.0;
            for (std::size_t j = 0; j < d; ++j) wx += w[j] * x[i][j];
            const double grad = y[i] * wx - 1.0 + diag * alpha[i];
            const double old = alpha[i];
            alpha[i] = std::max(old - grad / qii[i], 0.0);
            const double delta = (alpha[i] - old) * y[i];
            if (delta != 0.0)
                for (std::size_t j = 0; j < d; ++j) w[j] += delta * x[i][j];
        }

        double w_norm2 = 0.0;
        for (double v : w) w_norm2 += v * v;
        double hinge2 = 0.0, alpha_sum = 0.0, alpha_norm2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double wx = 0.0;
            for (std::size_t j = 0; j < d; ++j) wx += w[j] * x[i][j];
            const double slack = std::max(0.0, 1.0 - y[i] * wx);
            hinge2 += slack * slack;
            alpha_sum += alpha[i];
            alpha_norm2 += alpha[i] * alpha[i];
        }
        const double primal = 0.5 * w_norm2 + opt.C * hinge2;
        const double dual = alpha_sum - 0.5 * w_norm2 - 0.25 / opt.C * alpha_norm2;
        if (primal - dual < opt.gap_tol) break;
    }
    return w;
}

} // namespace detail

/// Trains one-vs-rest linear squared-hinge classifiers by dual coordinate
/// descent. Deterministic given the options seed. Throws on a single-class
/// training set (no margin to learn).
inline LinearSvmModel train_linear_svm(const std::vector<std::vector<double>>& x,
                                       const std::vector<int>& y, int n_classes,
                                       const SvmOptions& opt = {}) {
    if (x.empty() || x.size() != y.size())
        throw std::invalid_argument("train_linear_svm: bad inputs");
    std::vector<int> present;
    for (int v : y)
        if (std::find(present.begin(), present.end(), v) == present.end())
            present.push_back(v);
    if (present.size() < 2)
        throw std::invalid_argument("train_linear_svm: single-class training set");

    const int dim = static_cast<int>(x.front().size());
    std::vector<std::vector<double>> augmented;
    augmented.reserve(x.size());
    for (const auto& row : x) {
        if (static_cast<int>(row.size()) != dim)
            throw std::invalid_argument("train_linear_svm: ragged features");
        std::vector<double> a = row;
        a.push_back(1.0);
        augmented.push_back(std::move(a));
    }

    LinearSvmModel model;
    model.n_classes = n_classes;
    model.dim = dim;
    model.weights.resize(n_classes);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<int> binary(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) binary[i] = y[i] == c ? 1 : -1;
        model.weights[c] = detail::svm_binary_dcd(
            augmented, binary, opt, derive_seed(opt.seed, static_cast<std::uint64_t>(c)));
    }
    return model;
}

struct CvSummary {
    std::vector<double> fold_accuracy;
    std::vector<double> fold_baseline; // majority class of the training folds
    double mean_accuracy = 0.0;
    double mean_baseline = 0.0;
    std::vector<int> fold_of; // fold index per sample
};

/// Stratified k-fold cross-validation with per-fold standardization fit on
/// the training folds only. The baseline always predicts the training folds'
/// most frequent class.
inline CvSummary crossvalidate(const std::vector<std::vector<double>>& x,
                               const std::vector<int>& y, int n_classes,
                               int folds = 5, std::uint64_t seed = kDefaultSvmSeed,
                               const SvmOptions& opt = {}, bool standardize = true) {
    const std::size_t n = x.size();
    if (n != y.size() || n == 0) throw std::invalid_argument("crossvalidate: bad inputs");
    if (folds < 2 || static_cast<std::size_t>(folds) > n)
        throw std::invalid_argument("crossvalidate: bad fold count");

    // Stratified assignment: shuffle within each class, deal round-robin.
    CvSummary summary;
    summary.fold_of.assign(n, -1);
    for (int c = 0; c < n_classes; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (y[i] == c) idx.push_back(i);
        std::mt19937_64 rng = make_rng(seed, 100 + static_cast<std::uint64_t>(c));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t j = 0; j < idx.size(); ++j)
            summary.fold_of[idx[j]] = static_cast<int>(j % folds);
    }
    for (int f : summary.fold_of)
        if (f < 0) throw std::invalid_argument("crossvalidate: label outside [0, n_classes)");

    for (int f = 0; f < folds; ++f) {
        std::vector<std::vector<double>> x_train, x_test;
        std::vector<int> y_train, y_test;
        for (std::size_t i = 0; i < n; ++i) {
            if (summary.fold_of[i] == f) {
                x_test.push_back(x[i]);
                y_test.push_back(y[i]);
            } else {
                x_train.push_back(x[i]);
                y_train.push_back(y[i]);
            }
        }
        if (x_test.empty() || x_train.empty())
            throw std::invalid_argument("crossvalidate: empty fold");

        if (standardize) {
            const Standardizer std_fit = Standardizer::fit(x_train);
            x_train = std_fit.apply_all(x_train);
            x_test = std_fit.apply_all(x_test);
        }

        SvmOptions fold_opt = opt;
        fold_opt.seed = derive_seed(opt.seed, 200 + static_cast<std::uint64_t>(f));
        const LinearSvmModel model = train_linear_svm(x_train, y_train, n_classes, fold_opt);

        std::vector<std::int64_t> train_counts(n_classes, 0);
        for (int v : y_train) ++train_counts[v];
        const int majority = static_cast<int>(
            std::max_element(train_counts.begin(), train_counts.end()) -
            train_counts.begin());

        std::size_t correct = 0, base_correct = 0;
        for (std::size_t i = 0; i < x_test.size(); ++i) {
            if (model.predict(x_test[i]) == y_test[i]) ++correct;
            if (majority == y_test[i]) ++base_correct;
        }
        summary.fold_accuracy.push_back(static_cast<double>(correct) / x_test.size());
        summary.fold_baseline.push_back(static_cast<double>(base_correct) / x_test.size());
    }

    summary.mean_accuracy =
        std::accumulate(summary.fold_accuracy.begin(), summary.fold_accuracy.end(), 0.0) /
        folds;
    summary.mean_baseline =
        std::accumulate(summary.fold_baseline.begin(), summary.fold_baseline.end(), 0.0) /
        folds;
    return summary;
}

} // namespace peakcast
