#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace peakcast {

// Angular frequency of the daily cycle (period fixed at 24 hours).
inline constexpr double kCircadianOmega = 2.0 * std::numbers::pi / 24.0;

// Default integration window for the anticipation-response ratio: 7 days.
inline constexpr double kDefaultRatioWindowHours = 168.0;

/// Parameters of the peak model: a multiplicative circadian modulation on top
/// of an exponential rise towards, and decay away from, the peak hour t_p.
/// The model is undefined at t == t_p itself; the peak hour is treated as an
/// outlier and excluded everywhere.
struct PeakParams {
    double a_minus = 0.0;   // anticipation amplitude (views/hour)
    double b_minus = 0.0;   // pre-peak baseline (views/hour)
    double tau_minus = 1.0; // anticipation time constant (hours)
    double a_plus = 0.0;    // response amplitude (views/hour)
    double b_plus = 0.0;    // post-peak baseline (views/hour)
    double tau_plus = 1.0;  // response time constant (hours)
    double alpha_c = 0.0;   // circadian amplitude, in [0, 1)
    double t_c = 0.0;       // circadian peak hour, taken modulo 24
    double t_p = 0.0;       // peak hour index within the series

    bool valid() const {
        return a_minus >= 0.0 && a_plus >= 0.0 && b_minus >= 0.0 &&
               b_plus >= 0.0 && tau_minus > 0.0 && tau_plus > 0.0 &&
               alpha_c >= 0.0 && alpha_c < 1.0 && std::isfinite(t_c) &&
               std::isfinite(t_p);
    }
};

/// 1 + alpha_c * cos(omega * (t - t_c)); strictly positive for alpha_c < 1.
inline double eval_circadian(const PeakParams& p, double t) {
    return 1.0 + p.alpha_c * std::cos(kCircadianOmega * (t - p.t_c));
}

/// Exponential anticipation/response envelope. Undefined at the peak hour.
inline double eval_envelope(const PeakParams& p, double t) {
    if (t == p.t_p)
        throw std::invalid_argument("eval_envelope: undefined at the peak hour");
    if (t < p.t_p) return p.a_minus * std::exp((t - p.t_p) / p.tau_minus) + p.b_minus;
    return p.a_plus * std::exp(-(t - p.t_p) / p.tau_plus) + p.b_plus;
}

/// Full model: circadian modulation times the envelope. Undefined at t_p.
inline double eval_model(const PeakParams& p, double t) {
    return eval_circadian(p, t) * eval_envelope(p, t);
}

/// Ratio of the areas under the envelope over [t_p - window, t_p) and
/// (t_p, t_p + window], from the closed-form integrals of the two branches.
/// Throws std::domain_error when the response area is zero.
inline double anticipation_response_ratio(const PeakParams& p,
                                          double window = kDefaultRatioWindowHours) {
    if (window <= 0.0)
        throw std::invalid_argument("anticipation_response_ratio: window must be positive");
    const double s_minus =
        p.a_minus * p.tau_minus * (1.0 - std::exp(-window / p.tau_minus)) +
        p.b_minus * window;
    const double s_plus =
        p.a_plus * p.tau_plus * (1.0 - std::exp(-window / p.tau_plus)) +
        p.b_plus * window;
    if (s_plus <= 0.0)
        throw std::domain_error("anticipation_response_ratio: zero response area");
    return s_minus / s_plus;
}

inline void to_json(nlohmann::json& j, const PeakParams& p) {
    j = nlohmann::json{{"a_minus", p.a_minus},     {"b_minus", p.b_minus},
                       {"tau_minus", p.tau_minus}, {"a_plus", p.a_plus},
                       {"b_plus", p.b_plus},       {"tau_plus", p.tau_plus},
                       {"alpha_c", p.alpha_c},     {"t_c", p.t_c},
                       {"t_p", p.t_p}};
}

inline void from_json(const nlohmann::json& j, PeakParams& p) {
    j.at("a_minus").get_to(p.a_minus);
    j.at("b_minus").get_to(p.b_minus);
    j.at("tau_minus").get_to(p.tau_minus);
    j.at("a_plus").get_to(p.a_plus);
    j.at("b_plus").get_to(p.b_plus);
    j.at("tau_plus").get_to(p.tau_plus);
    j.at("alpha_c").get_to(p.alpha_c);
    j.at("t_c").get_to(p.t_c);
    j.at("t_p").get_to(p.t_p);
}

} // namespace peakcast
