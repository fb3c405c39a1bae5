#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "peakcast/parallel.hpp"
#include "peakcast/rng.hpp"

namespace peakcast {

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GmmOptions {
    double tol = 1e-7;    // stop when the log-likelihood change drops below
    int max_iter = 500;
    double ridge = 1e-6;  // diagonal regularization of every covariance
};

/// A fitted full-covariance Gaussian mixture.
struct GmmModel {
    int k = 0;
    Eigen::VectorXd weights;               // sums to 1
    Eigen::MatrixXd means;                 // k x d
    std::vector<Eigen::MatrixXd> covariances; // symmetric positive-definite
    double log_likelihood = -std::numeric_limits<double>::infinity();
    double bic = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
    int n = 0;
    bool converged = false;

    /// Hard assignment by maximum posterior responsibility.
    std::vector<int> assign(const Eigen::MatrixXd& x) const;
};

/// Free parameters of a full-covariance mixture in d dimensions.
inline int gmm_free_parameters(int k, int d) {
    return (k - 1) + k * d + k * d * (d + 1) / 2;
}

inline double gmm_bic(double log_likelihood, int k, int d, int n) {
    return -2.0 * log_likelihood +
           gmm_free_parameters(k, d) * std::log(static_cast<double>(n));
}

namespace detail {

struct ComponentDensity {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double log_norm = 0.0; // -(d/2) log(2 pi) - (1/2) log |Sigma|

    void set(const Eigen::MatrixXd& cov, double ridge) {
        Eigen::MatrixXd c = cov;
        double extra = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            llt.compute(c);
            if (llt.info() == Eigen::Success) break;
            extra = extra == 0.0 ? std::max(ridge, 1e-10) : extra * 10.0;
            c = cov + extra * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
        }
        if (llt.info() != Eigen::Success)
            throw NumericError("gmm: covariance not positive-definite");
        double log_det = 0.0;
        const auto& l = llt.matrixLLT();
        for (int i = 0; i < cov.rows(); ++i) log_det += std::log(l(i, i));
        log_norm = -0.5 * cov.rows() * std::log(2.0 * std::numbers::pi) - log_det;
    }

    double log_density(const Eigen::VectorXd& centered) const {
        const Eigen::VectorXd y = llt.matrixL().solve(centered);
        return log_norm - 0.5 * y.squaredNorm();
    }
};

} // namespace detail

inline std::vector<int> GmmModel::assign(const Eigen::MatrixXd& x) const {
    std::vector<detail::ComponentDensity> dens(k);
    for (int j = 0; j < k; ++j) dens[j].set(covariances[j], 0.0);
    std::vector<int> labels(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int j = 0; j < k; ++j) {
            const double lp = std::log(std::max(weights[j], 1e-300)) +
                              dens[j].log_density(x.row(i).transpose() - means.row(j).transpose());
            if (lp > best) {
                best = lp;
                arg = j;
            }
        }
        labels[i] = arg;
    }
    return labels;
}

/// Expectation-maximization to convergence from a seeded start (means drawn
/// from distinct data rows, covariances from the data covariance). The
/// log-likelihood is checked to be nondecreasing at every step. Throws
/// std::invalid_argument when k exceeds the number of points.
inline GmmModel fit_gmm(const Eigen::MatrixXd& x, int k, std::uint64_t seed,
                        const GmmOptions& opt = {}) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (k < 1) throw std::invalid_argument("fit_gmm: k must be positive");
    if (k > n) throw std::invalid_argument("fit_gmm: more components than points");

    const Eigen::RowVectorXd data_mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - data_mean;
    Eigen::MatrixXd data_cov = (centered.adjoint() * centered) / std::max(n - 1, 1);
    data_cov += opt.ridge * Eigen::MatrixXd::Identity(d, d);

    GmmModel model;
    model.k = k;
    model.seed = seed;
    model.n = n;
    model.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
    model.means.resize(k, d);
    model.covariances.assign(k, data_cov);

    std::mt19937_64 rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int j = 0; j < k; ++j) model.means.row(j) = x.row(order[j]);

    std::vector<detail::ComponentDensity> dens(k);
    Eigen::MatrixXd resp(n, k);
    Eigen::MatrixXd log_p(n, k);
    double prev_ll = -std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        for (int j = 0; j < k; ++j) dens[j].set(model.covariances[j], opt.ridge);

        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            double row_max = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                log_p(i, j) = std::log(std::max(model.weights[j], 1e-300)) +
                              dens[j].log_density(x.row(i).transpose() -
                                                  model.means.row(j).transpose());
                row_max = std::max(row_max, log_p(i, j));
            }
            double sum = 0.0;
            for (int j = 0; j < k; ++j) sum += std::exp(log_p(i, j) - row_max);
            const double lse = row_max + std::log(sum);
            ll += lse;
            for (int j = 0; j < k; ++j) resp(i, j) = std::exp(log_p(i, j) - lse);
        }

        bool reseeded = false;
        Eigen::VectorXd nj = resp.colwise().sum();
        for (int j = 0; j < k; ++j) {
            if (nj[j] < 1e-8) {
                // Collapsed component: restart it on a random data point.
                std::uniform_int_distribution<int> pick(0, n - 1);
                model.means.row(j) = x.row(pick(rng));
                model.covariances[j] = data_cov;
                model.weights[j] = 1.0 / n;
                reseeded = true;
            }
        }
        if (reseeded) {
            model.weights /= model.weights.sum();
            prev_ll = -std::numeric_limits<double>::infinity();
            continue;
        }

        if (ll + 1e-6 * (1.0 + std::abs(ll)) < prev_ll)
            throw NumericError("gmm: log-likelihood decreased");
        const bool done = std::abs(ll - prev_ll) < opt.tol;
        prev_ll = ll;
        model.log_likelihood = ll;
        if (done) {
            model.converged = true;
            break;
        }

        for (int j = 0; j < k; ++j) {
            model.weights[j] = nj[j] / n;
            Eigen::RowVectorXd mu = (resp.col(j).transpose() * x) / nj[j];
            model.means.row(j) = mu;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
            for (int i = 0; i < n; ++i) {
                const Eigen::RowVectorXd diff = x.row(i) - mu;
                cov.noalias() += resp(i, j) * diff.transpose() * diff;
            }
            cov /= nj[j];
            cov += opt.ridge * Eigen::MatrixXd::Identity(d, d);
            model.covariances[j] = 0.5 * (cov + cov.transpose());
        }
    }

    if (!model.converged) {
        // The last M-step updated the parameters; score them once more so the
        // reported likelihood matches the returned model.
        for (int j = 0; j < k; ++j) dens[j].set(model.covariances[j], opt.ridge);
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            double row_max = -std::numeric_limits<double>::infinity();
            for (int j = 0; j < k; ++j) {
                log_p(i, j) = std::log(std::max(model.weights[j], 1e-300)) +
                              dens[j].log_density(x.row(i).transpose() -
                                                  model.means.row(j).transpose());
                row_max = std::max(row_max, log_p(i, j));
            }
            double sum = 0.0;
            for (int j = 0; j < k; ++j) sum += std::exp(log_p(i, j) - row_max);
            ll += row_max + std::log(sum);
        }
        model.log_likelihood = ll;
    }

    model.bic = gmm_bic(model.log_likelihood, k, d, n);
    return model;
}

/// Fits every k in [k_min, k_max] with `restarts` seeded restarts each
/// (restart seeds derived from the master seed; restarts run in parallel) and
/// returns the model minimizing BIC. Per k, the best restart by
/// log-likelihood stands for that k.
inline GmmModel select_k(const Eigen::MatrixXd& x, int k_min, int k_max,
                         int restarts, std::uint64_t seed,
                         const GmmOptions& opt = {}) {
    const int n = static_cast<int>(x.rows());
    if (k_min < 1 || k_min > k_max)
        throw std::invalid_argument("select_k: bad k range");
    if (k_min > n) throw std::invalid_argument("select_k: k_min exceeds points");
    k_max = std::min(k_max, n);
    restarts = std::max(restarts, 1);

    const int n_k = k_max - k_min + 1;
    std::vector<GmmModel> fits(static_cast<std::size_t>(n_k) * restarts);
    parallel_for_index(fits.size(), [&](std::size_t idx) {
        const int k = k_min + static_cast<int>(idx) / restarts;
        const int r = static_cast<int>(idx) % restarts;
        fits[idx] = fit_gmm(x, k, derive_seed(seed, k, r), opt);
    });

    const GmmModel* best = nullptr;
    for (int ki = 0; ki < n_k; ++ki) {
        const GmmModel* best_of_k = nullptr;
        for (int r = 0; r < restarts; ++r) {
            const GmmModel& m = fits[static_cast<std::size_t>(ki) * restarts + r];
            if (!best_of_k || m.log_likelihood > best_of_k->log_likelihood)
                best_of_k = &m;
        }
        if (!best || best_of_k->bic < best->bic) best = best_of_k;
    }
    return *best;
}

} // namespace peakcast
