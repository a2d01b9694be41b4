#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

namespace {

EventStream simulate_truth(const ParamSet& p, std::size_t n, std::uint64_t seed,
                           ModelVariant v = ModelVariant::Proposed) {
    SimConfig cfg;
    cfg.params = p;
    cfg.variant = v;
    cfg.n_events = n;
    cfg.seed = seed;
    return simulate(cfg).stream;
}

FitConfig quick(double beta0) {
    FitConfig cfg;
    cfg.beta0 = beta0;
    cfg.restarts = 1;
    cfg.compute_standard_errors = false;
    return cfg;
}

}  // namespace

TEST_CASE("Poisson limit: mu-hat and its standard error") {
    ParamSet truth;
    truth.mu = 0.4;
    truth.eta = 0.1;
    truth.beta = 10.0;
    SimConfig sim;
    sim.params = truth;
    sim.initial_state = MarketState(10000, 10005, 0.01);
    sim.horizon = 5000.0;
    sim.seed = 8;
    const auto st = simulate(sim).stream;

    FitConfig cfg;
    for (const char* name : {"alpha_s1", "alpha_s2", "alpha_m", "alpha_w1", "alpha_w2", "xi"}) cfg.fixed[name] = 0.0;
    cfg.fixed["eta"] = 0.1;
    cfg.fixed["beta"] = 10.0;
    cfg.restarts = 1;
    cfg.optimizer.relative_tolerance = 1e-13;
    const auto report = fit(st, cfg);
    const auto c = st.counts();
    const double T = st.duration();
    const double mle = double(c[0] + c[3]) / (2.0 * T);
    CHECK(report.estimates.mu == doctest::Approx(mle).epsilon(1e-5));
    CHECK(report.k == 1);
    REQUIRE(report.standard_errors[0].has_value());
    CHECK(*report.standard_errors[0] == doctest::Approx(std::sqrt(mle / (2.0 * T))).epsilon(1e-3));
    CHECK(report.estimates.beta == 10.0);
    CHECK(report.estimates.alpha_s1 == 0.0);
}

TEST_CASE("fit improves on its start and reports consistent fields") {
    const auto truth = table1_truth(1);
    const auto st = simulate_truth(truth, 10000, 31);
    FitConfig cfg;
    cfg.beta0 = 100.0;
    cfg.restarts = 2;
    const auto r = fit(st, cfg);
    CHECK(r.log_likelihood >= r.initial_log_likelihood);
    CHECK(r.converged);
    CHECK(r.reliable);
    CHECK(r.k == 9);
    CHECK(r.n_events == 10000);
    CHECK(r.aic == doctest::Approx(2.0 * 9 - 2.0 * r.log_likelihood));
    CHECK(r.bic == doctest::Approx(9 * std::log(10000.0) - 2.0 * r.log_likelihood));
    CHECK(r.log_likelihood == doctest::Approx(log_likelihood(st, r.estimates, ModelVariant::Proposed).value));
    CHECK(r.log_likelihood >= log_likelihood(st, truth, ModelVariant::Proposed).value);
    CHECK(r.stability_condition);
    CHECK(r.window_end == st.session_end);
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        CAPTURE(r.names[i]);
        REQUIRE(r.standard_errors[i].has_value());
        CHECK(*r.standard_errors[i] > 0.0);
        // within four standard errors of the truth
        CHECK(std::abs(r.values[i] - get_parameter(truth, r.names[i])) < 4.0 * *r.standard_errors[i]);
    }
    REQUIRE(r.hessian_min_eigenvalue.has_value());
    CHECK(*r.hessian_min_eigenvalue > 0.0);
}

TEST_CASE("estimates do not depend on the time origin") {
    const auto st = simulate_truth(table1_truth(1), 5000, 4);
    const auto a = fit(st, quick(100.0));
    const auto b = fit(shift_time(st, 36000.0), quick(100.0));
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CAPTURE(a.names[i]);
        CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-4));
    }
}

TEST_CASE("Hessian diagonal agrees with differences of the gradient") {
    const auto truth = table1_truth(1);
    const auto st = simulate_truth(truth, 5000, 6);
    const auto r = fit(st, quick(50.0));
    const auto names = parameter_names(ModelVariant::Proposed);
    const auto h = log_likelihood_hessian(st, r.estimates, ModelVariant::Proposed, names);
    const Objective ll = [&](std::span<const double> x) {
        return log_likelihood(st, unpack(x, ModelVariant::Proposed, r.estimates), ModelVariant::Proposed).value;
    };
    const auto x = pack(r.estimates, ModelVariant::Proposed);
    for (std::size_t i = 0; i < names.size(); ++i) {
        CAPTURE(names[i]);
        const double step = 1e-3 * std::abs(x[i]);
        auto up = x;
        auto down = x;
        up[i] += step;
        down[i] -= step;
        const double g_up = numerical_gradient(ll, up)[i];
        const double g_down = numerical_gradient(ll, down)[i];
        const double second = (g_up - g_down) / (2.0 * step);
        CHECK(h[i][i] == doctest::Approx(second).epsilon(1e-3));
    }
}

TEST_CASE("errors shrink as the sample grows") {
    const auto truth = table1_truth(1);
    std::vector<double> medians;
    for (std::size_t n : {1000, 5000, 10000}) {
        std::vector<double> rmse;
        for (std::uint64_t r = 0; r < 7; ++r) {
            const auto st = simulate_truth(truth, n, 7000 + r);
            rmse.push_back(relative_rmse(fit(st, quick(50.0)).estimates, truth, ModelVariant::Proposed));
        }
        std::nth_element(rmse.begin(), rmse.begin() + 3, rmse.end());
        medians.push_back(rmse[3]);
    }
    CHECK(medians[0] > medians[1]);
    CHECK(medians[1] > medians[2]);
}

TEST_CASE("starting at the true beta with plenty of data always succeeds") {
    ConvergenceConfig cfg;
    cfg.truth = convergence_truth(400.0);
    cfg.n_events = 20000;
    cfg.beta0_grid = {400.0};
    cfg.replications = 4;
    const auto rows = convergence_experiment(cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].success_rate() == 1.0);
}

TEST_CASE("sparse processes make a fit unreliable") {
    const auto st = simulate_truth(table1_truth(1), 150, 2);
    auto cfg = quick(50.0);
    cfg.min_events_per_process = 50;
    CHECK_FALSE(fit(st, cfg).reliable);
}

TEST_CASE("impossible data is a hard error") {
    EventStream st;
    st.session_end = 3.0;
    st.initial_state = MarketState(10000, 10003, 0.01);
    const auto s1 = apply_event(st.initial_state, EventKind::AskUp, 1);
    const auto s2 = apply_event(s1, EventKind::BidUp, 1);
    st.events = {{1.0, EventKind::AskUp, 1, s1}, {2.0, EventKind::BidUp, 1, s2}};
    auto cfg = quick(50.0);
    cfg.fixed = {{"eta", 0.0}, {"alpha_w1", 0.0}, {"alpha_w2", 0.0}};
    cfg.min_events_per_process = 0;
    CHECK_THROWS_AS((void)fit(st, cfg), FitError);
    cfg.fixed = {{"gamma", 1.0}};
    CHECK_THROWS_AS((void)fit(st, cfg), std::invalid_argument);
}

TEST_CASE("initial parameters") {
    const auto st = simulate_truth(table1_truth(1), 2000, 3);
    FitConfig cfg;
    cfg.beta0 = 80.0;
    const auto h = initial_parameters(st, cfg, 0);
    const auto c = st.counts();
    CHECK(h.mu == doctest::Approx(0.5 * double(c[0] + c[3]) / (2.0 * st.duration())));
    CHECK(h.eta * mean_relative_level(st) == doctest::Approx(0.5 * double(c[1] + c[2]) / (2.0 * st.duration())));
    CHECK(h.alpha_s1 == 20.0);
    CHECK(h.alpha_w2 == 20.0);
    CHECK(h.xi == 8.0);
    CHECK(h.beta == 80.0);

    cfg.start = StartMode::UniformRandom;
    for (std::size_t s = 0; s < 20; ++s) {
        cfg.seed = s;
        const auto r = initial_parameters(st, cfg, 0);
        CHECK(r.mu >= 0.0);
        CHECK(r.mu <= 10.0);
        CHECK(r.eta <= 10.0);
        CHECK(r.alpha_m <= 80.0);
        CHECK(r.xi <= 80.0);
        CHECK(r.beta == 80.0);
    }
    cfg.seed = 1;
    CHECK(initial_parameters(st, cfg, 0) == initial_parameters(st, cfg, 0));
    CHECK_FALSE(initial_parameters(st, cfg, 1) == initial_parameters(st, cfg, 2));
}

TEST_CASE("relative RMSE and the convergence truth") {
    const auto t = convergence_truth(400.0);
    CHECK(t.mu == 0.1);
    CHECK(t.eta == 0.0);
    CHECK(t.xi == 40.0);
    CHECK(t.alpha_s1 == 100.0);
    CHECK(t.alpha_w2 == 100.0);
    CHECK(relative_rmse(t, t, ModelVariant::Proposed) == 0.0);
    ParamSet e = t;
    e.beta = 440.0;  // one of nine components off by 10%
    CHECK(relative_rmse(e, t, ModelVariant::Proposed) == doctest::Approx(0.1 / 3.0));
    e = t;
    e.eta = 0.3;  // zero truth: absolute error
    CHECK(relative_rmse(e, t, ModelVariant::Proposed) == doctest::Approx(0.1));
}

TEST_CASE("derived seeds are deterministic and distinct") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));
}

TEST_CASE("richer variants reproduce the proposed likelihood when embedded") {
    Rng rng(10);
    const auto st = testing::random_stream(rng, 300, 60.0);
    const auto p = testing::random_params(rng, ModelVariant::Proposed);
    const double base = log_likelihood(st, p, ModelVariant::Proposed).value;
    for (ModelVariant v : {ModelVariant::ExtendedI, ModelVariant::ExtendedII, ModelVariant::ExtendedIII,
                           ModelVariant::ExtendedIV, ModelVariant::ExtendedV}) {
        CAPTURE(to_string(v));
        CHECK(log_likelihood(st, embed_proposed(p, v), v).value == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("every fittable variant fits") {
    const auto st = simulate_truth(table1_truth(1), 3000, 12);
    const double proposed = fit(st, quick(50.0)).log_likelihood;
    for (ModelVariant v : {ModelVariant::BasicHawkes, ModelVariant::ExtendedI, ModelVariant::ExtendedII,
                           ModelVariant::ExtendedIII, ModelVariant::ExtendedIV, ModelVariant::ExtendedV,
                           ModelVariant::ConstantBase}) {
        CAPTURE(to_string(v));
        auto cfg = quick(50.0);
        cfg.variant = v;
        const auto r = fit(st, cfg);
        CHECK(std::isfinite(r.log_likelihood));
        CHECK(r.k == parameter_count(v));
        CHECK(r.log_likelihood >= r.initial_log_likelihood);
        if (v != ModelVariant::BasicHawkes && v != ModelVariant::ConstantBase) {
            // nested models: never much worse than the proposed fit
            CHECK(r.log_likelihood > proposed - 5.0);
        }
    }
    auto spread = quick(50.0);
    spread.variant = ModelVariant::SpreadOnly;
    CHECK_THROWS((void)fit(st, spread));
}

TEST_CASE("a non-finite Hessian point reports unavailable errors") {
    const auto st = simulate_truth(table1_truth(1), 2000, 9);
    ParamSet p = table1_truth(1);
    p.alpha_s1 = 1e-9;  // far from any maximum along a flat direction
    p.alpha_m = 0.0;
    const auto se = standard_errors(st, p, ModelVariant::Proposed);
    if (se.values.empty()) {
        CHECK_FALSE(se.note.empty());
    } else {
        for (const auto& v : se.values) {
            if (v) CHECK(*v >= 0.0);
        }
    }
}
