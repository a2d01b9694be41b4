#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "spreadhawkes/diagnostics.hpp"
#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

namespace {

EventStream simulate_truth(const ParamSet& p, std::size_t n, std::uint64_t seed) {
    SimConfig cfg;
    cfg.params = p;
    cfg.n_events = n;
    cfg.seed = seed;
    return simulate(cfg).stream;
}

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

}  // namespace

TEST_CASE("homogeneous process: every residual is one") {
    ParamSet p;
    p.mu = 2.0;
    p.beta = 1.0;
    EventStream st;
    st.session_end = 5.0;
    st.initial_state = MarketState(10000, 10001, 0.01);
    MarketState s = st.initial_state;
    for (int k = 1; k <= 10; ++k) {
        s = apply_event(s, EventKind::AskUp, 1);
        st.events.push_back({0.5 * k, EventKind::AskUp, 1, s});
    }
    const auto r = residuals(st, p, ModelVariant::Proposed);
    REQUIRE(r.per_process[0].size() == 10);
    for (double x : r.per_process[0]) CHECK(x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.tail[0] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("residuals and tails add up to the total compensator") {
    Rng rng(17);
    const auto st = testing::random_stream(rng, 500, 100.0);
    const auto p = testing::random_params(rng, ModelVariant::Proposed);
    const auto r = residuals(st, p, ModelVariant::Proposed);
    const auto rep = replay(st, p, ModelVariant::Proposed);
    double total = 0.0;
    for (const auto& c : rep.interval_compensator) total += c[0] + c[1] + c[2] + c[3];
    for (double x : rep.tail_compensator) total += x;
    double sum = 0.0;
    for (double x : r.pooled()) sum += x;
    for (double x : r.tail) sum += x;
    CHECK(sum == doctest::Approx(total).epsilon(1e-12));
    CHECK(r.pooled().size() == st.events.size());
    for (double x : r.pooled()) CHECK(x >= 0.0);
}

TEST_CASE("residuals at truth average one; a wrong beta worsens the fit") {
    const auto truth = table1_truth(1);
    ParamSet wrong = truth;
    wrong.beta *= 4.0;
    std::size_t worse = 0;
    const std::size_t runs = 50;
    for (std::size_t r = 0; r < runs; ++r) {
        const auto st = simulate_truth(truth, 5000, 900 + r);
        const auto at_truth = residuals(st, truth, ModelVariant::Proposed).pooled();
        const double n = double(at_truth.size());
        CHECK(std::abs(mean(at_truth) - 1.0) <= 3.0 / std::sqrt(n));
        const auto off = residuals(st, wrong, ModelVariant::Proposed).pooled();
        if (ks_statistic(off) > ks_statistic(at_truth)) ++worse;
    }
    CHECK(worse >= 45);
}

TEST_CASE("Q-Q of a single residual") {
    const std::vector<double> one{std::log(2.0)};
    const auto q = qq_points(one);
    REQUIRE(q.size() == 1);
    CHECK(q[0].theoretical == doctest::Approx(0.693147).epsilon(1e-6));
    CHECK(q[0].empirical == doctest::Approx(0.693147).epsilon(1e-6));
}

TEST_CASE("KS calibration on exact Exp(1) samples") {
    std::size_t below = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        std::exponential_distribution<double> e(1.0);
        std::vector<double> x(10000);
        for (auto& v : x) v = e(rng);
        if (ks_statistic(x) < ks_critical_5pct(x.size())) ++below;
    }
    CHECK(ks_critical_5pct(10000) == doctest::Approx(0.0136));
    CHECK(below >= 90);
}

TEST_CASE("heavy-tailed residuals sit above the diagonal in the upper quantiles") {
    // Lomax with shape 3 and scale 2 has mean one.
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(20000);
    for (auto& v : x) v = 2.0 * (std::pow(1.0 - u(rng), -1.0 / 3.0) - 1.0);
    const auto q = qq_points(x);
    for (std::size_t j = q.size() * 99 / 100; j < q.size(); j += 20) CHECK(q[j].empirical > q[j].theoretical);
}

TEST_CASE("excitement summaries") {
    const auto p = table1_truth(1);
    CHECK(alpha_bar(p) == doctest::Approx(10.6));
    ParamSet flat;
    flat.alpha_s1 = flat.alpha_s2 = flat.alpha_m = flat.alpha_w1 = flat.alpha_w2 = 7.0;
    const auto lr = liquidity_ratio(flat);
    REQUIRE(lr.ratio.has_value());
    CHECK(*lr.ratio == doctest::Approx(1.0));
    flat.alpha_w1 = flat.alpha_w2 = 0.0;
    CHECK_FALSE(liquidity_ratio(flat).ratio.has_value());
}

TEST_CASE("moving average") {
    const std::vector<double> constant(30, 4.5);
    CHECK(moving_average(constant) == constant);

    std::vector<double> spike(20, 0.0);
    spike.back() = 20.0;
    CHECK(moving_average(spike, 20).back() == doctest::Approx(1.0));

    std::vector<double> ramp(40);
    std::iota(ramp.begin(), ramp.end(), 1.0);
    const auto ma = moving_average(ramp, 20);
    CHECK(ma[39] == doctest::Approx(30.5));
    CHECK(ma[0] == 1.0);
    CHECK(ma[1] == 1.5);

    std::vector<double> affine(ramp.size());
    for (std::size_t i = 0; i < ramp.size(); ++i) affine[i] = 3.0 * ramp[i] - 2.0;
    const auto mb = moving_average(affine, 7);
    const auto mr = moving_average(ramp, 7);
    for (std::size_t i = 0; i < ramp.size(); ++i) CHECK(mb[i] == doctest::Approx(3.0 * mr[i] - 2.0));
    CHECK_THROWS_AS((void)moving_average(ramp, 0), std::invalid_argument);
}

TEST_CASE("stability report") {
    const auto r = stability_report(table1_truth(1));
    CHECK(r.trace == doctest::Approx(-46.2));
    CHECK(r.determinant == doctest::Approx(3.0));
    CHECK(r.stable);
    REQUIRE(r.steady_state_level.has_value());
    CHECK(*r.steady_state_level == doctest::Approx(8.0 / 3.0));
    CHECK(*r.steady_state_rate == doctest::Approx(0.5333).epsilon(1e-3));

    ParamSet edge = table1_truth(1);
    edge.beta = edge.alpha_s1 + edge.alpha_s2 + edge.alpha_m;
    const auto b = stability_report(edge);
    CHECK(b.determinant == doctest::Approx(0.0));
    CHECK_FALSE(b.stable);
    CHECK_FALSE(b.steady_state_level.has_value());

    Rng rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        ParamSet p = table1_truth(1);
        p.eta = 1e-3 + 10.0 * u(rng);
        p.alpha_s1 = 40.0 * u(rng);
        p.alpha_s2 = 40.0 * u(rng);
        p.alpha_m = 40.0 * u(rng);
        const auto s = stability_report(p);
        CHECK(s.trace < 0.0);
        CHECK(s.stable == stability_condition(p));
    }
}

TEST_CASE("fitted provision exceeds depletion when the truth says so") {
    ParamSet truth = table1_truth(1);
    truth.alpha_s1 = 4.0;
    truth.alpha_s2 = 6.0;
    truth.alpha_m = 5.0;
    truth.alpha_w1 = 20.0;
    truth.alpha_w2 = 25.0;
    const auto st = simulate_truth(truth, 10000, 77);
    FitConfig cfg;
    cfg.beta0 = 50.0;
    cfg.restarts = 1;
    cfg.compute_standard_errors = false;
    const auto report = fit(st, cfg);
    const auto lr = liquidity_ratio(report.estimates);
    CHECK(lr.provision_mean > lr.depletion_mean);
}
