#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace peakcast {

struct NelderMeadOptions {
    double rel_tol = 1e-9;   // relative spread of simplex objective values
    int max_iter = 2000;     // iterations (reflection steps)
    double init_step = 0.25; // default edge length of the initial simplex
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill simplex minimizer (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Deterministic: no internal randomness. `steps` optionally
/// gives a per-dimension initial displacement.
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0,
                             const NelderMeadOptions& opt = {},
                             const std::vector<double>& steps = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = steps.empty() ? opt.init_step : steps[i];
        pts[i + 1][i] += (s != 0.0 ? s : opt.init_step);
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), cand(n);

    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front(), worst = order.back();
        const std::size_t second_worst = order[n - 1];

        if (fv[worst] - fv[best] <=
            opt.rel_tol * (std::abs(fv[best]) + std::abs(fv[worst]) + 1e-300)) {
            res.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            for (std::size_t d = 0; d < n; ++d)
                cand[d] = centroid[d] + coef * (pts[worst][d] - centroid[d]);
            return f(cand);
        };

        const double f_reflect = blend(-1.0);
        if (f_reflect < fv[order[0]]) {
            std::vector<double> reflect = cand;
            const double f_expand = blend(-2.0);
            if (f_expand < f_reflect) {
                pts[worst] = cand;
                fv[worst] = f_expand;
            } else {
                pts[worst] = std::move(reflect);
                fv[worst] = f_reflect;
            }
        } else if (f_reflect < fv[second_worst]) {
            pts[worst] = cand;
            fv[worst] = f_reflect;
        } else {
            const double f_contract =
                f_reflect < fv[worst] ? blend(-0.5) : blend(0.5);
            if (f_contract < std::min(f_reflect, fv[worst])) {
                pts[worst] = cand;
                fv[worst] = f_contract;
            } else {
                // Shrink towards the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }

    const std::size_t arg =
        std::min_element(fv.begin(), fv.end()) - fv.begin();
    res.x = pts[arg];
    res.fx = fv[arg];
    return res;
}

} // namespace peakcast
