#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spreadhawkes/likelihood.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

TEST_CASE("parameter counts per variant") {
    CHECK(parameter_count(ModelVariant::Proposed) == 9);
    CHECK(parameter_count(ModelVariant::BasicHawkes) == 18);
    CHECK(parameter_count(ModelVariant::ExtendedI) == 11);
    CHECK(parameter_count(ModelVariant::ExtendedII) == 13);
    CHECK(parameter_count(ModelVariant::ExtendedIII) == 12);
    CHECK(parameter_count(ModelVariant::ExtendedIV) == 12);
    CHECK(parameter_count(ModelVariant::ExtendedV) == 12);
    CHECK(parameter_count(ModelVariant::ConstantBase) == 9);
}

TEST_CASE("AIC and BIC") {
    CHECK(aic(-1000.0, 9) == 2018.0);
    CHECK(bic(-1000.0, 9, std::exp(1.0)) == doctest::Approx(2009.0).epsilon(1e-15));
}

TEST_CASE("empty stream") {
    auto p = table1_truth(1);
    EventStream st;
    st.session_end = 250.0;
    st.initial_state = MarketState(9998, 10002, 0.01);
    const double ell = st.initial_state.relative_level();
    const auto ll = log_likelihood(st, p, ModelVariant::Proposed);
    CHECK(ll.valid);
    CHECK(ll.value == doctest::Approx(-2.0 * (p.mu + p.eta * ell) * 250.0).epsilon(1e-14));
}

TEST_CASE("two-event stream against quadrature and direct sums") {
    auto p = table1_truth(1);
    p.eta = 20.0;
    p.xi = 30.0;
    EventStream st;
    st.session_end = 2.0;
    st.initial_state = MarketState(10000, 10002, 0.01);
    const auto s1 = apply_event(st.initial_state, EventKind::AskUp, 1);
    const auto s2 = apply_event(s1, EventKind::AskDown, 1);
    st.events = {{1.0, EventKind::AskUp, 1, s1}, {1.5, EventKind::AskDown, 1, s2}};
    const double oracle = testing::direct_log_likelihood(st, p, ModelVariant::Proposed);
    const auto ll = log_likelihood(st, p, ModelVariant::Proposed);
    CHECK(std::abs(ll.value - oracle) <= 1e-6);
}

TEST_CASE("log-likelihood matches the oracle on random streams, every variant") {
    Rng rng(99);
    for (ModelVariant v : {ModelVariant::Proposed, ModelVariant::BasicHawkes, ModelVariant::ExtendedI,
                           ModelVariant::ExtendedII, ModelVariant::ExtendedIII, ModelVariant::ExtendedIV,
                           ModelVariant::ExtendedV, ModelVariant::ConstantBase}) {
        CAPTURE(to_string(v));
        for (int rep = 0; rep < 3; ++rep) {
            const auto st = testing::random_stream(rng, 60, 20.0);
            auto p = testing::random_params(rng, v);
            const auto ll = log_likelihood(st, p, v);
            if (!ll.valid) continue;
            const double oracle = testing::direct_log_likelihood(st, p, v);
            CHECK(ll.value == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("per-process terms sum to the total") {
    Rng rng(3);
    const auto st = testing::random_stream(rng, 300, 60.0);
    const auto p = testing::random_params(rng, ModelVariant::Proposed);
    const auto ll = log_likelihood(st, p, ModelVariant::Proposed);
    REQUIRE(ll.valid);
    CHECK(ll.per_process[0] + ll.per_process[1] + ll.per_process[2] + ll.per_process[3] ==
          doctest::Approx(ll.value).epsilon(1e-14));
    CHECK(ll.n_events == st.events.size());
}

TEST_CASE("shifting the time origin leaves the log-likelihood unchanged") {
    Rng rng(12);
    const auto st = testing::random_stream(rng, 500, 100.0);
    const auto p = testing::random_params(rng, ModelVariant::Proposed);
    const double a = log_likelihood(st, p, ModelVariant::Proposed).value;
    const double b = log_likelihood(shift_time(st, 36000.0), p, ModelVariant::Proposed).value;
    CHECK(b == doctest::Approx(a).epsilon(1e-9));
}

TEST_CASE("an event where its own intensity is zero is flagged") {
    auto p = table1_truth(1);
    EventStream st;
    st.session_end = 3.0;
    st.initial_state = MarketState(10000, 10003, 0.01);
    const auto s1 = apply_event(st.initial_state, EventKind::AskUp, 1);
    const auto s2 = apply_event(s1, EventKind::BidUp, 1);
    st.events = {{1.0, EventKind::AskUp, 1, s1}, {2.0, EventKind::BidUp, 1, s2}};
    CHECK(log_likelihood(st, p, ModelVariant::Proposed).valid);

    // Without a base rate or provision excitement the narrowing event is impossible.
    p.eta = 0.0;
    p.alpha_w1 = 0.0;
    p.alpha_w2 = 0.0;
    const auto ll = log_likelihood(st, p, ModelVariant::Proposed);
    CHECK_FALSE(ll.valid);
    CHECK(std::isinf(ll.value));
    CHECK(ll.value < 0.0);
    REQUIRE(ll.zero_intensity_event.has_value());
    CHECK(*ll.zero_intensity_event == 1);
}

TEST_CASE("truth outscores single-parameter perturbations") {
    const auto truth = table1_truth(1);
    const auto names = parameter_names(ModelVariant::Proposed);
    std::vector<std::size_t> wins(2 * names.size(), 0);
    const std::size_t reps = 100;
    for (std::size_t r = 0; r < reps; ++r) {
        SimConfig cfg;
        cfg.params = truth;
        cfg.n_events = 10000;
        cfg.seed = 500 + r;
        const auto st = simulate(cfg).stream;
        const double at_truth = log_likelihood(st, truth, ModelVariant::Proposed).value;
        for (std::size_t k = 0; k < names.size(); ++k) {
            for (std::size_t d = 0; d < 2; ++d) {
                ParamSet q = truth;
                set_parameter(q, names[k], get_parameter(truth, names[k]) * (d == 0 ? 0.8 : 1.2));
                if (log_likelihood(st, q, ModelVariant::Proposed).value < at_truth) ++wins[2 * k + d];
            }
        }
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
        CAPTURE(names[k]);
        CHECK(wins[2 * k] >= 90);
        CHECK(wins[2 * k + 1] >= 90);
    }
}
