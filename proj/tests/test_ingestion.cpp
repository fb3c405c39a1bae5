#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "peakcast/dump.hpp"
#include "peakcast/event.hpp"
#include "peakcast/synthetic.hpp"
#include "peakcast/window.hpp"

using namespace peakcast;

TEST_CASE("dump line parsing") {
    const auto rec = parse_dump_line("en Liverpool_F.C. 1543 0", "en");
    REQUIRE(rec.has_value());
    CHECK(rec->domain == "en");
    CHECK(rec->title == "Liverpool_F.C.");
    CHECK(rec->count == 1543);

    CHECK_FALSE(parse_dump_line("de Berlin 7 0", "en").has_value());
    CHECK_THROWS_AS(parse_dump_line("en BadLine", "en"), DumpParseError);
    CHECK_THROWS_AS(parse_dump_line("en Title x2 0", "en"), DumpParseError);
}

TEST_CASE("dump filename carries the hour") {
    const auto h = hour_from_dump_filename("pageviews-20180502-180000.gz");
    REQUIRE(h.has_value());
    CHECK(*h == hour_from_date("2018-05-02", 18));
    CHECK(hour_from_dump_filename("pageviews-20180502-180000") == h);
    CHECK_FALSE(hour_from_dump_filename("pageviews-20180502.gz").has_value());
    CHECK_FALSE(hour_from_dump_filename("projectviews-20180502-180000").has_value());
    CHECK_FALSE(hour_from_dump_filename("pageviews-20180502-250000").has_value());
}

namespace {

EventRecord event_with_redirect() {
    EventRecord e;
    e.article = "Main_Title";
    e.redirects = {"Alias_One"};
    e.category = "sports";
    e.event_date = "2018-05-02";
    return e;
}

} // namespace

TEST_CASE("window building sums redirects and zero-fills") {
    const EventRecord e = event_with_redirect();
    const UtcHour start = window_start(e);

    HourlyCountStore store;
    for (int i = 0; i < kWindowHours; ++i) store.mark_hour_covered(start + i);
    store.add("Main_Title", start + 100, 3);
    store.add("Alias_One", start + 100, 2);
    store.add("Unrelated", start + 100, 50);

    WindowReport report;
    const TimeSeries w = build_window(e, store, &report);
    CHECK(w.size() == 504);
    CHECK(w.counts[100] == 5);
    CHECK(w.counts[99] == 0);
    CHECK(report.missing_hours == 0);
}

TEST_CASE("window with too many missing hours is excluded") {
    const EventRecord e = event_with_redirect();
    const UtcHour start = window_start(e);
    HourlyCountStore store;
    // Cover 70% of the window only.
    for (int i = 0; i < kWindowHours; ++i)
        if (i % 10 < 7) store.mark_hour_covered(start + i);
    CHECK_THROWS_AS(build_window(e, store), WindowQualityError);

    // Exactly at the cap (20%) still passes.
    HourlyCountStore ok;
    const int missing_cap = static_cast<int>(kMaxMissingFraction * kWindowHours);
    for (int i = 0; i < kWindowHours; ++i)
        if (i >= missing_cap) ok.mark_hour_covered(start + i);
    WindowReport report;
    CHECK_NOTHROW(build_window(e, ok, &report));
    CHECK(report.missing_hours == missing_cap);
}

TEST_CASE("peak location and tie-breaking") {
    const EventRecord e = event_with_redirect();
    TimeSeries s;
    s.start = window_start(e);
    s.counts.assign(kWindowHours, 10);
    const int midnight = kPreEventDays * kHoursPerDay;

    s.counts[midnight + 30] = 150;
    PeakLocation loc = locate_peak(s, e);
    CHECK(loc.t_p == midnight + 30);
    CHECK(loc.peak_value == 150);

    s.counts[midnight + 10] = 150; // tie: the earlier hour wins
    loc = locate_peak(s, e);
    CHECK(loc.t_p == midnight + 10);

    // A larger value outside the 48-hour span is ignored.
    s.counts[midnight - 5] = 1000;
    s.counts[midnight + 60] = 1000;
    loc = locate_peak(s, e);
    CHECK(loc.t_p == midnight + 10);
}

TEST_CASE("peak location equals a brute-force scan") {
    const EventRecord e = event_with_redirect();
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<std::int64_t> views(0, 5000);
    for (int trial = 0; trial < 1000; ++trial) {
        TimeSeries s;
        s.start = window_start(e);
        s.counts.resize(kWindowHours);
        for (auto& c : s.counts) c = views(rng);
        const PeakLocation got = locate_peak(s, e);

        const int begin = kPreEventDays * kHoursPerDay;
        int best = begin;
        for (int i = begin; i < begin + kPeakSearchHours; ++i)
            if (s.counts[i] > s.counts[best]) best = i;
        CHECK(got.t_p == best);
        CHECK(got.peak_value == s.counts[best]);
    }
}

TEST_CASE("popularity filter is strict") {
    const std::vector<PeakLocation> peaks = {{240, 101}, {241, 100}, {242, 99}, {243, 5000}};
    const std::vector<std::size_t> kept = filter_popular(peaks);
    CHECK(kept == std::vector<std::size_t>{0, 3});
}

TEST_CASE("manifest parsing") {
    const std::vector<std::string> lines = {
        "article,redirects,category,event_date,result,stage,opponent",
        "Liverpool_F.C.,LFC|Liverpool FC,football,2018-05-02,win,knockout,A.S._Roma",
        "\"Paris, Texas\",,film,2017-08-10,,,",
    };
    const std::vector<EventRecord> events = parse_manifest(lines);
    REQUIRE(events.size() == 2);
    CHECK(events[0].redirects == std::vector<std::string>{"LFC", "Liverpool FC"});
    CHECK(events[0].outcome.result == MatchResult::win);
    CHECK(events[0].outcome.stage == MatchStage::knockout);
    CHECK(events[0].outcome.opponent == "A.S._Roma");
    CHECK(events[1].article == "Paris, Texas");
    CHECK(events[1].redirects.empty());
    CHECK_FALSE(events[1].outcome.result.has_value());

    CHECK_THROWS_WITH(parse_manifest({"article,category,event_date"}),
                      Catch::Matchers::ContainsSubstring("redirects"));
    CHECK_THROWS_AS(parse_manifest({std::string(kManifestHeader), "x,,sports,not-a-date,,,"}),
                    std::invalid_argument);
}

TEST_CASE("synthetic corpus basics") {
    const SyntheticSpec spec = default_synthetic_spec();
    CHECK(generate_synthetic_corpus(spec, 0, 1).empty());

    const auto a = generate_synthetic_corpus(spec, 3, 42);
    const auto b = generate_synthetic_corpus(spec, 3, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].series.counts == b[i].series.counts);
        CHECK(a[i].truth.tau_plus == b[i].truth.tau_plus);
    }
    const auto c = generate_synthetic_corpus(spec, 3, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_diff = any_diff || a[i].series.counts != c[i].series.counts;
    CHECK(any_diff);

    // The planted peak is where the locator finds it.
    for (const SyntheticEvent& ev : a) {
        const PeakLocation loc = locate_peak(ev.series, ev.record);
        CHECK(loc.t_p == static_cast<int>(ev.truth.t_p));
    }
}

TEST_CASE("synthetic spec validation") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.categories[0].alpha_c = {0.5, 1.5};
    CHECK_THROWS_AS(generate_synthetic_corpus(spec, 1, 1), ConfigError);
    spec = default_synthetic_spec();
    spec.peak_offset_max = 48;
    CHECK_THROWS_AS(generate_synthetic_corpus(spec, 1, 1), ConfigError);
}

TEST_CASE("synthetic counts are Poisson around the model intensity") {
    // Point-mass parameters, flat circadian: every off-peak hour is an iid
    // Poisson(b) draw across events.
    CategorySpec cat;
    cat.name = "flat";
    cat.a_minus = {std::log(1e-9), 0.0};
    cat.b_minus = {std::log(1000.0), 0.0};
    cat.tau_minus = {std::log(10.0), 0.0};
    cat.a_plus = {std::log(1e-9), 0.0};
    cat.b_plus = {std::log(1000.0), 0.0};
    cat.tau_plus = {std::log(10.0), 0.0};
    cat.alpha_c = {0.0, 0.0};
    cat.t_c = {12.0, 12.0};
    SyntheticSpec spec;
    spec.categories = {cat};

    const int n = 10000;
    const auto corpus = generate_synthetic_corpus(spec, n, 7);
    const double lambda = 1000.0;

    // Sample mean within 3 standard errors of the intensity.
    const int hour = 100; // comfortably before every planted peak
    double mean = 0.0;
    for (const SyntheticEvent& ev : corpus) mean += ev.series.counts[hour];
    mean /= n;
    const double se = std::sqrt(lambda / n);
    CHECK(std::abs(mean - lambda) <= 3.0 * se);

    // Chi-square goodness of fit against Poisson(1000), 6 cells, alpha 0.01.
    const std::vector<std::int64_t> edges = {960, 980, 1000, 1020, 1040};
    std::vector<double> expected(edges.size() + 1, 0.0);
    {
        // Poisson pmf summed per cell; the tails absorb the remainder.
        double below = 0.0;
        std::vector<double> cdf_at_edges(edges.size(), 0.0);
        for (std::int64_t k = 0; k <= 1400; ++k) {
            const double logp = k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
            const double p = std::exp(logp);
            below += p;
            for (std::size_t e = 0; e < edges.size(); ++e)
                if (k <= edges[e]) cdf_at_edges[e] += p;
        }
        expected[0] = cdf_at_edges[0];
        for (std::size_t e = 1; e < edges.size(); ++e)
            expected[e] = cdf_at_edges[e] - cdf_at_edges[e - 1];
        expected[edges.size()] = 1.0 - cdf_at_edges.back();
    }
    std::vector<int> observed(edges.size() + 1, 0);
    for (const SyntheticEvent& ev : corpus) {
        const std::int64_t v = ev.series.counts[hour];
        std::size_t cell = edges.size();
        for (std::size_t e = 0; e < edges.size(); ++e)
            if (v <= edges[e]) {
                cell = e;
                break;
            }
        ++observed[cell];
    }
    double chi2 = 0.0;
    for (std::size_t c = 0; c < expected.size(); ++c) {
        const double exp_count = expected[c] * n;
        chi2 += (observed[c] - exp_count) * (observed[c] - exp_count) / exp_count;
    }
    // 99th percentile of chi-square with 5 degrees of freedom.
    CHECK(chi2 < 15.086);
}

TEST_CASE("football corpus embeds result-dependent response modes") {
    const FootballSpec spec;
    const auto corpus = generate_football_corpus(spec, 400, 11);
    REQUIRE(corpus.size() == 800);

    int lose_n = 0, lose_fast = 0, win_n = 0, win_fast = 0, draw_n = 0;
    for (const SyntheticEvent& ev : corpus) {
        REQUIRE(ev.record.outcome.result.has_value());
        const bool fast = ev.truth.tau_plus < 2.0;
        switch (*ev.record.outcome.result) {
            case MatchResult::lose:
                ++lose_n;
                lose_fast += fast;
                break;
            case MatchResult::win:
                ++win_n;
                win_fast += fast;
                break;
            case MatchResult::draw:
                ++draw_n;
                break;
        }
        // Opponent links are crossed within the match.
        CHECK_FALSE(ev.record.outcome.opponent.empty());
    }
    CHECK(win_n == lose_n);
    CHECK(draw_n % 2 == 0);
    CHECK(static_cast<double>(lose_fast) / lose_n == Catch::Approx(0.55).margin(0.06));
    CHECK(static_cast<double>(win_fast) / win_n == Catch::Approx(0.31).margin(0.06));

    const auto again = generate_football_corpus(spec, 400, 11);
    CHECK(again[123].series.counts == corpus[123].series.counts);
}
