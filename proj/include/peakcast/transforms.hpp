#pragma once

#include <algorithm>
#include <cmath>

namespace peakcast::detail {

// Bounds for log-space optimization variables; exp of these stays finite and
// off-peak envelope exponents stay negative, so nothing overflows.
inline double clamp_log(double v) { return std::clamp(v, -30.0, 30.0); }

inline double to_logit(double alpha) {
    const double a = std::clamp(alpha, 1e-6, 1.0 - 1e-6);
    return std::log(a / (1.0 - a));
}

inline double from_logit(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace peakcast::detail
