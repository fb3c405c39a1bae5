#include <catch_amalgamated.hpp>

#include <random>

#include "peakcast/forecast.hpp"
#include "peakcast/priors.hpp"
#include "peakcast/synthetic.hpp"

using namespace peakcast;

namespace {

std::vector<CategorizedFit> identity_fits(int n) {
    std::vector<CategorizedFit> fits;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> log_val(std::log(10.0), std::log(5000.0));
    for (int i = 0; i < n; ++i) {
        PeakParams p;
        p.a_minus = p.a_plus = std::exp(log_val(rng));
        p.b_minus = p.b_plus = std::exp(log_val(rng)) * 0.1;
        p.tau_minus = p.tau_plus = std::exp(log_val(rng)) * 0.01;
        fits.push_back({p, "sports", true});
    }
    return fits;
}

ForecastRequest make_request(const PeakParams& truth, int t_obs, std::uint64_t seed) {
    ForecastRequest req;
    std::mt19937_64 rng(seed);
    const TimeSeries series = synthesize_window(truth, 0, 1.5, rng);
    const std::vector<double> s = series.as_doubles();
    req.t_p = static_cast<int>(truth.t_p);
    req.series.assign(s.begin(), s.begin() + req.t_p + t_obs + 1);
    req.prepeak = fit_prepeak_values(s, req.t_p);
    req.category = "sports";
    req.t_obs = t_obs;
    return req;
}

PeakParams slow_event() {
    PeakParams p;
    p.a_minus = 2000.0;
    p.b_minus = 200.0;
    p.tau_minus = 20.0;
    p.a_plus = 3500.0;
    p.b_plus = 250.0;
    p.tau_plus = 60.0;
    p.alpha_c = 0.4;
    p.t_c = 18.0;
    p.t_p = 250.0;
    return p;
}

} // namespace

TEST_CASE("identity training set gives the identity prior") {
    const PriorTable table = learn_priors(identity_fits(50));
    REQUIRE(table.has_category("sports"));
    const PriorEntry& e = table.lookup("sports");
    CHECK(e.a_plus.c == Catch::Approx(1.0).margin(1e-9));
    CHECK(e.a_plus.d == Catch::Approx(0.0).margin(1e-9));
    CHECK(e.a_plus.sigma2 == Catch::Approx(kPriorSigma2Floor));
    CHECK(e.tau_plus.c == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("planted regression hyperparameters are recovered") {
    std::mt19937_64 rng(101);
    std::normal_distribution<double> noise(0.0, 0.2); // sigma2 = 0.04
    std::uniform_real_distribution<double> log_q(std::log(5.0), std::log(2000.0));
    std::vector<CategorizedFit> fits;
    for (int i = 0; i < 500; ++i) {
        PeakParams p;
        const double la = log_q(rng), lb = log_q(rng), lt = log_q(rng) * 0.3;
        p.a_minus = std::exp(la);
        p.b_minus = std::exp(lb);
        p.tau_minus = std::exp(lt);
        p.a_plus = std::exp(0.8 * la + 0.5 + noise(rng));
        p.b_plus = std::exp(0.8 * lb + 0.5 + noise(rng));
        p.tau_plus = std::exp(0.8 * lt + 0.5 + noise(rng));
        fits.push_back({p, "film", true});
    }
    const PriorEntry& e = learn_priors(fits).lookup("film");
    for (const PriorRow* row : {&e.a_plus, &e.b_plus, &e.tau_plus}) {
        CHECK(row->c == Catch::Approx(0.8).epsilon(0.05));
        CHECK(row->d == Catch::Approx(0.5).epsilon(0.05).margin(0.03));
        CHECK(row->sigma2 == Catch::Approx(0.04).epsilon(0.05).margin(0.004));
    }
}

TEST_CASE("small categories fall back to the pooled row") {
    std::vector<CategorizedFit> fits = identity_fits(20);
    for (int i = 0; i < kMinCategoryFits - 1; ++i) {
        CategorizedFit f = fits[i];
        f.category = "rare";
        fits.push_back(f);
    }
    const PriorTable table = learn_priors(fits);
    CHECK_FALSE(table.has_category("rare"));
    CHECK(&table.lookup("rare") == &table.lookup(kPooledCategory));

    // Non-converged fits never train priors.
    std::vector<CategorizedFit> unconverged = identity_fits(5);
    for (auto& f : unconverged) f.converged = false;
    CHECK_THROWS_AS(learn_priors(unconverged), std::invalid_argument);
}

TEST_CASE("uniform prior reduces to least squares") {
    const PeakParams truth = slow_event();
    const ForecastRequest req = make_request(truth, 120, 51);

    const ResponseFit map_none = map_fit_response(req, nullptr, PriorMode::none);

    // Independent least-squares reference: scan a dense local grid around the
    // returned point to confirm it is a minimum of the pure SSE.
    auto sse = [&](double a, double b, double tau) {
        PeakParams p = assemble_params(req.prepeak, {a, b, tau, false}, req.t_p);
        double acc = 0.0;
        for (int t = req.t_p + 1; t < static_cast<int>(req.series.size()); ++t) {
            const double r = req.series[t] - eval_model(p, t);
            acc += r * r;
        }
        return acc;
    };
    const double at_fit = sse(map_none.a_plus, map_none.b_plus, map_none.tau_plus);
    for (const double scale : {0.97, 1.03}) {
        CHECK(at_fit <= sse(map_none.a_plus * scale, map_none.b_plus, map_none.tau_plus));
        CHECK(at_fit <= sse(map_none.a_plus, map_none.b_plus * scale, map_none.tau_plus));
        CHECK(at_fit <= sse(map_none.a_plus, map_none.b_plus, map_none.tau_plus * scale));
    }
    // And it recovers the generating response parameters from a long window.
    CHECK(map_none.a_plus == Catch::Approx(truth.a_plus).epsilon(0.1));
    CHECK(map_none.tau_plus == Catch::Approx(truth.tau_plus).epsilon(0.1));
}

TEST_CASE("empty observation returns the prior mode") {
    const PeakParams truth = slow_event();
    ForecastRequest req = make_request(truth, 24, 52);
    req.series.resize(req.t_p + 1); // nothing after the peak
    const PriorTable table = learn_priors(identity_fits(30));
    const ResponseFit r = map_fit_response(req, &table, PriorMode::anticipation);
    CHECK(r.no_data);

    const PriorEntry& e = table.lookup(kPooledCategory);
    const double mu_a = table.log_mean(e.a_plus, req.prepeak.a_minus);
    CHECK(r.a_plus == Catch::Approx(std::exp(mu_a - e.a_plus.sigma2)));
    const double mu_tau = table.log_mean(e.tau_plus, req.prepeak.tau_minus);
    CHECK(r.tau_plus == Catch::Approx(std::exp(mu_tau - e.tau_plus.sigma2)));
}

TEST_CASE("tight priors pin the response to the prior mode") {
    const PeakParams truth = slow_event();
    const ForecastRequest req = make_request(truth, 24, 53);

    PriorTable table;
    PriorEntry entry;
    // A deliberately wrong, nearly-deterministic prior must win over 24 hours
    // of conflicting data.
    entry.a_plus = {0.0, std::log(111.0), 1e-10, false};
    entry.b_plus = {0.0, std::log(11.0), 1e-10, false};
    entry.tau_plus = {0.0, std::log(3.0), 1e-10, false};
    entry.n = 100;
    table.rows[kPooledCategory] = entry;

    const ResponseFit r = map_fit_response(req, &table, PriorMode::anticipation);
    CHECK(r.a_plus == Catch::Approx(111.0).epsilon(1e-3));
    CHECK(r.b_plus == Catch::Approx(11.0).epsilon(1e-3));
    CHECK(r.tau_plus == Catch::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("map objective dominates both canonical starts") {
    const PeakParams truth = slow_event();
    const PriorTable table = learn_priors(identity_fits(40));
    for (int trial = 0; trial < 5; ++trial) {
        const ForecastRequest req = make_request(truth, 24, 60 + trial);
        const PriorEntry& e = table.lookup(kPooledCategory);

        auto neg_log_posterior = [&](double a, double b, double tau) {
            PeakParams p = assemble_params(req.prepeak, {a, b, tau, false}, req.t_p);
            double nll = 0.0;
            for (int t = req.t_p + 1; t < static_cast<int>(req.series.size()); ++t) {
                const double r = req.series[t] - eval_model(p, t);
                nll += r * r;
            }
            nll /= 2.0 * req.prepeak.sigma_n2;
            const double mus[3] = {table.log_mean(e.a_plus, req.prepeak.a_minus),
                                   table.log_mean(e.b_plus, req.prepeak.b_minus),
                                   table.log_mean(e.tau_plus, req.prepeak.tau_minus)};
            const double xs[3] = {std::log(a), std::log(b), std::log(tau)};
            const double s2[3] = {e.a_plus.sigma2, e.b_plus.sigma2, e.tau_plus.sigma2};
            for (int q = 0; q < 3; ++q)
                nll += xs[q] + (xs[q] - mus[q]) * (xs[q] - mus[q]) / (2.0 * s2[q]);
            return nll;
        };

        const ResponseFit map = map_fit_response(req, &table, PriorMode::anticipation);
        const ResponseFit ls = map_fit_response(req, nullptr, PriorMode::none);
        const double at_map = neg_log_posterior(map.a_plus, map.b_plus, map.tau_plus);
        CHECK(at_map <=
              neg_log_posterior(std::exp(table.log_mean(e.a_plus, req.prepeak.a_minus) -
                                         e.a_plus.sigma2),
                                std::exp(table.log_mean(e.b_plus, req.prepeak.b_minus) -
                                         e.b_plus.sigma2),
                                std::exp(table.log_mean(e.tau_plus, req.prepeak.tau_minus) -
                                         e.tau_plus.sigma2)) +
                  1e-9);
        CHECK(at_map <= neg_log_posterior(ls.a_plus, ls.b_plus, ls.tau_plus) + 1e-9);
    }
}

TEST_CASE("forecast equals the model pointwise and nails exact parameters") {
    const PeakParams truth = slow_event();
    const std::vector<double> pred = forecast_series(truth, 24, 168);
    REQUIRE(pred.size() == 144);
    for (int j = 0; j < 144; ++j)
        CHECK(pred[j] == eval_model(truth, truth.t_p + 25 + j));

    // Noiseless actuals from the same parameters: zero error.
    std::vector<double> actual;
    for (int t = 25; t <= 168; ++t) actual.push_back(eval_model(truth, truth.t_p + t));
    CHECK(*ape_timeseries(actual, pred) == Catch::Approx(0.0).margin(1e-15));
    CHECK(*ape_cumulative(actual, pred) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("absolute percentage errors") {
    const std::vector<double> s = {10, 20, 30};
    const std::vector<double> s_hat = {12, 18, 33};
    CHECK(*ape_timeseries(s, s_hat) == Catch::Approx(7.0 / 60.0));

    const std::vector<double> zeros(3, 0.0);
    CHECK(*ape_timeseries(s, zeros) == Catch::Approx(1.0));
    CHECK_FALSE(ape_timeseries(zeros, s).has_value());

    CHECK(*ape_cumulative(s, s) == Catch::Approx(0.0));
    const std::vector<double> a100 = {50, 50};
    const std::vector<double> p144 = {70, 74};
    CHECK(*ape_cumulative(a100, p144) == Catch::Approx(0.44));
    CHECK_FALSE(ape_cumulative(zeros, s).has_value());
}
