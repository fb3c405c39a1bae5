#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "peakcast/event.hpp"
#include "peakcast/peak_model.hpp"
#include "peakcast/rng.hpp"
#include "peakcast/time_series.hpp"
#include "peakcast/window.hpp"

namespace peakcast {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Log-normal sampling range: exp(N(log_median, log_sd^2)).
struct LogNormalSpec {
    double log_median = 0.0;
    double log_sd = 0.0;

    double sample(std::mt19937_64& rng) const {
        std::normal_distribution<double> n(log_median, log_sd);
        return std::exp(n(rng));
    }
};

struct UniformSpec {
    double lo = 0.0;
    double hi = 1.0;

    double sample(std::mt19937_64& rng) const {
        std::uniform_real_distribution<double> u(lo, hi);
        return u(rng);
    }
};

/// Couples a response parameter to its anticipation counterpart:
/// log q_plus = c * log q_minus + d + N(0, sigma^2).
struct ResponseLink {
    double c = 1.0;
    double d = 0.0;
    double sigma = 0.0;

    double sample(double q_minus, std::mt19937_64& rng) const {
        std::normal_distribution<double> n(0.0, sigma);
        return std::exp(c * std::log(q_minus) + d + n(rng));
    }
};

/// Per-category generating distributions. Response parameters are drawn
/// either independently or through a link to the anticipation draw.
struct CategorySpec {
    std::string name;
    LogNormalSpec a_minus, b_minus, tau_minus;
    LogNormalSpec a_plus, b_plus, tau_plus; // used when the link is absent
    std::optional<ResponseLink> link_a, link_b, link_tau;
    UniformSpec alpha_c{0.2, 0.7};
    UniformSpec t_c{0.0, 24.0};
    double peak_spike_factor = 1.5; // peak-hour intensity over the window max

    void validate() const {
        if (name.empty()) throw ConfigError("category spec without a name");
        for (const LogNormalSpec* s :
             {&a_minus, &b_minus, &tau_minus, &a_plus, &b_plus, &tau_plus})
            if (!(s->log_sd >= 0.0) || !std::isfinite(s->log_median))
                throw ConfigError(name + ": bad log-normal spec");
        for (const std::optional<ResponseLink>* l : {&link_a, &link_b, &link_tau})
            if (*l && !((*l)->sigma >= 0.0))
                throw ConfigError(name + ": bad response link");
        if (!(alpha_c.lo >= 0.0 && alpha_c.hi < 1.0 && alpha_c.lo <= alpha_c.hi))
            throw ConfigError(name + ": alpha_c range outside [0, 1)");
        if (!(peak_spike_factor > 0.0))
            throw ConfigError(name + ": nonpositive peak spike factor");
    }
};

struct SyntheticSpec {
    std::vector<CategorySpec> categories;
    int peak_offset_min = 6;  // hours after event midnight
    int peak_offset_max = 42;
    std::string base_date = "2018-03-01";

    void validate() const {
        if (peak_offset_min < 0 || peak_offset_max >= kPeakSearchHours ||
            peak_offset_min > peak_offset_max)
            throw ConfigError("peak offset range outside the 48-hour search span");
        for (const CategorySpec& c : categories) c.validate();
    }
};

struct SyntheticEvent {
    EventRecord record;
    TimeSeries series;
    PeakParams truth;
};

namespace detail {

inline PeakParams draw_params(const CategorySpec& cat, std::mt19937_64& rng) {
    PeakParams p;
    p.a_minus = cat.a_minus.sample(rng);
    p.b_minus = cat.b_minus.sample(rng);
    p.tau_minus = cat.tau_minus.sample(rng);
    p.a_plus = cat.link_a ? cat.link_a->sample(p.a_minus, rng) : cat.a_plus.sample(rng);
    p.b_plus = cat.link_b ? cat.link_b->sample(p.b_minus, rng) : cat.b_plus.sample(rng);
    p.tau_plus =
        cat.link_tau ? cat.link_tau->sample(p.tau_minus, rng) : cat.tau_plus.sample(rng);
    p.alpha_c = cat.alpha_c.sample(rng);
    p.t_c = std::fmod(cat.t_c.sample(rng) + 240.0, 24.0);
    return p;
}

inline std::int64_t sample_poisson(double lambda, std::mt19937_64& rng) {
    if (lambda <= 0.0) return 0;
    std::poisson_distribution<std::int64_t> pois(lambda);
    return pois(rng);
}

} // namespace detail

/// Emits one 504-hour window of Poisson counts around the given ground-truth
/// parameters, with a peak-hour spike strictly above the rest of the window's
/// intensity so the located peak coincides with the planted one.
inline TimeSeries synthesize_window(const PeakParams& truth, UtcHour start,
                                    double spike_factor, std::mt19937_64& rng) {
    TimeSeries series;
    series.start = start;
    series.counts.resize(kWindowHours, 0);
    const int t_p = static_cast<int>(truth.t_p);

    double max_intensity = 0.0;
    for (int i = 0; i < kWindowHours; ++i) {
        if (i == t_p) continue;
        const double lambda = eval_model(truth, i);
        max_intensity = std::max(max_intensity, lambda);
        series.counts[i] = detail::sample_poisson(lambda, rng);
    }
    const double spike = spike_factor * std::max(max_intensity, 1.0);
    series.counts[t_p] = detail::sample_poisson(spike, rng);
    // The spike must stay the window argmax: the located peak is the planted
    // one by construction, not by luck.
    for (int i = 0; i < kWindowHours; ++i)
        if (i != t_p && series.counts[i] >= series.counts[t_p])
            series.counts[t_p] = series.counts[i] + 1;
    return series;
}

/// Draws `n_per_category` events from each category spec. Counts are Poisson
/// around the model intensity; ground truth is returned for recovery tests.
/// Output is a pure function of (spec, n_per_category, seed).
inline std::vector<SyntheticEvent> generate_synthetic_corpus(const SyntheticSpec& spec,
                                                             int n_per_category,
                                                             std::uint64_t seed) {
    spec.validate();
    if (n_per_category < 0) throw ConfigError("negative event count");

    std::vector<SyntheticEvent> out;
    out.reserve(spec.categories.size() * static_cast<std::size_t>(n_per_category));
    const std::int64_t base_days = parse_date_days(spec.base_date);

    for (std::size_t ci = 0; ci < spec.categories.size(); ++ci) {
        const CategorySpec& cat = spec.categories[ci];
        for (int ei = 0; ei < n_per_category; ++ei) {
            std::mt19937_64 rng = make_rng(seed, derive_seed(ci, ei));

            SyntheticEvent ev;
            ev.record.article = cat.name + "_event_" + std::to_string(ei);
            ev.record.category = cat.name;
            ev.record.event_date = format_date(base_days + (ei % 300));

            ev.truth = detail::draw_params(cat, rng);
            std::uniform_int_distribution<int> offset(spec.peak_offset_min,
                                                      spec.peak_offset_max);
            ev.truth.t_p = kPreEventDays * kHoursPerDay + offset(rng);

            ev.series = synthesize_window(ev.truth, window_start(ev.record),
                                          cat.peak_spike_factor, rng);
            out.push_back(std::move(ev));
        }
    }
    return out;
}

/// Five categories with distinct time scales and category-specific response
/// links; the stock corpus for end-to-end runs and benchmarks.
inline SyntheticSpec default_synthetic_spec() {
    auto make = [](std::string name, double a_m, double b_m, double tau_m,
                   double tau_p_med, double a_ratio, double b_ratio, double link_c,
                   double link_sigma) {
        CategorySpec c;
        c.name = std::move(name);
        c.a_minus = {std::log(a_m), 0.6};
        c.b_minus = {std::log(b_m), 0.5};
        c.tau_minus = {std::log(tau_m), 0.35};
        auto link = [&](double q_minus_med, double q_plus_med) {
            ResponseLink l;
            l.c = link_c;
            l.d = std::log(q_plus_med) - link_c * std::log(q_minus_med);
            l.sigma = link_sigma;
            return l;
        };
        c.link_a = link(a_m, a_m * a_ratio);
        c.link_b = link(b_m, b_m * b_ratio);
        c.link_tau = link(tau_m, tau_p_med);
        c.alpha_c = {0.2, 0.7};
        return c;
    };

    SyntheticSpec spec;
    spec.categories = {
        make("election", 1500.0, 150.0, 6.2, 19.0, 1.6, 1.1, 0.95, 0.2),
        make("sports", 2500.0, 120.0, 7.0, 14.0, 1.2, 1.0, 0.90, 0.2),
        make("football", 4000.0, 200.0, 2.0, 6.7, 1.1, 1.0, 1.00, 0.2),
        make("film", 1200.0, 300.0, 34.0, 87.0, 1.4, 1.2, 0.85, 0.2),
        make("holiday", 800.0, 250.0, 11.0, 12.0, 0.9, 1.0, 0.90, 0.2),
    };
    return spec;
}

/// Football corpus for outcome classification: every match yields two team
/// records with crossed opponent links. Post-peak decay comes from a two-mode
/// mixture (short "disappointed" vs longer "excited" time constants) whose
/// mode rates depend on the match result.
struct FootballSpec {
    double draw_rate = 0.42;
    double loser_disappointed = 0.55;
    double winner_disappointed = 0.31;
    double draw_disappointed = 0.31;
    LogNormalSpec tau_disappointed{std::log(1.1), 0.35}; // truncated to < 2 h
    LogNormalSpec tau_excited{std::log(9.0), 0.5};       // truncated to >= 2 h
    // Response amplitude medians by result (losing sides draw more views).
    double a_plus_win = 680.0, a_plus_draw = 770.0, a_plus_lose = 1400.0;
    double a_plus_log_sd = 0.7;
    LogNormalSpec b_plus{std::log(120.0), 0.5};
    LogNormalSpec a_minus{std::log(1200.0), 0.7};
    LogNormalSpec b_minus{std::log(130.0), 0.5};
    LogNormalSpec tau_minus{std::log(2.0), 0.4};
    UniformSpec alpha_c{0.3, 0.7};
    UniformSpec t_c{14.0, 22.0};
    double peak_spike_factor = 1.5;
    std::string base_date = "2018-02-01";
};

inline std::vector<SyntheticEvent> generate_football_corpus(const FootballSpec& spec,
                                                            int n_matches,
                                                            std::uint64_t seed) {
    if (n_matches < 0) throw ConfigError("negative match count");
    std::vector<SyntheticEvent> out;
    out.reserve(2 * static_cast<std::size_t>(n_matches));
    const std::int64_t base_days = parse_date_days(spec.base_date);

    for (int m = 0; m < n_matches; ++m) {
        std::mt19937_64 rng = make_rng(seed, m);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const bool drawn = unit(rng) < spec.draw_rate;
        const MatchResult results[2] = {drawn ? MatchResult::draw : MatchResult::win,
                                        drawn ? MatchResult::draw : MatchResult::lose};
        const double stage_roll = unit(rng);
        const MatchStage stage = stage_roll < 0.70   ? MatchStage::group
                                 : stage_roll < 0.95 ? MatchStage::knockout
                                                     : MatchStage::final_match;
        const std::string date = format_date(base_days + (m % 280));
        const std::string names[2] = {"team_" + std::to_string(2 * m),
                                      "team_" + std::to_string(2 * m + 1)};

        // Shared kickoff so both teams peak in the same hour of the day.
        std::uniform_int_distribution<int> offset(18, 23);
        const int peak_offset = offset(rng);

        for (int side = 0; side < 2; ++side) {
            SyntheticEvent ev;
            ev.record.article = names[side];
            ev.record.category = "football";
            ev.record.event_date = date;
            ev.record.outcome.result = results[side];
            ev.record.outcome.stage = stage;
            ev.record.outcome.opponent = names[1 - side];

            PeakParams& p = ev.truth;
            p.a_minus = spec.a_minus.sample(rng);
            p.b_minus = spec.b_minus.sample(rng);
            p.tau_minus = spec.tau_minus.sample(rng);
            p.b_plus = spec.b_plus.sample(rng);

            double disappointed_rate = spec.draw_disappointed;
            double a_plus_median = spec.a_plus_draw;
            if (results[side] == MatchResult::win) {
                disappointed_rate = spec.winner_disappointed;
                a_plus_median = spec.a_plus_win;
            } else if (results[side] == MatchResult::lose) {
                disappointed_rate = spec.loser_disappointed;
                a_plus_median = spec.a_plus_lose;
            }
            LogNormalSpec a_plus{std::log(a_plus_median), spec.a_plus_log_sd};
            p.a_plus = a_plus.sample(rng);

            const bool disappointed = unit(rng) < disappointed_rate;
            do {
                p.tau_plus = disappointed ? spec.tau_disappointed.sample(rng)
                                          : spec.tau_excited.sample(rng);
            } while (disappointed ? p.tau_plus >= 2.0 : p.tau_plus < 2.0);

            p.alpha_c = spec.alpha_c.sample(rng);
            p.t_c = spec.t_c.sample(rng);
            p.t_p = kPreEventDays * kHoursPerDay + peak_offset;

            ev.series = synthesize_window(p, window_start(ev.record),
                                          spec.peak_spike_factor, rng);
            out.push_back(std::move(ev));
        }
    }
    return out;
}

} // namespace peakcast
