#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

TEST_CASE("without excitement the widening counts are Poisson(2 mu T)") {
    ParamSet p;
    p.mu = 0.5;
    p.beta = 10.0;
    const double horizon = 200.0;
    double sum = 0.0;
    double sum2 = 0.0;
    const int runs = 200;
    for (int r = 0; r < runs; ++r) {
        SimConfig cfg;
        cfg.params = p;
        cfg.initial_state = MarketState(10000, 10004, 0.01);
        cfg.horizon = horizon;
        cfg.seed = 1000 + r;
        const auto st = simulate(cfg).stream;
        const auto c = st.counts();
        CHECK(c[1] + c[2] == 0);
        const double n = double(c[0] + c[3]);
        sum += n;
        sum2 += n * n;
    }
    const double lambda = 2.0 * p.mu * horizon;
    const double m = sum / runs;
    const double var = sum2 / runs - m * m;
    CHECK(std::abs(m - lambda) <= 3.0 * std::sqrt(lambda));
    CHECK(std::abs(m - lambda) <= 3.0 * std::sqrt(lambda / runs));
    CHECK(var == doctest::Approx(lambda).epsilon(0.3));
}

TEST_CASE("simulated streams are valid, and narrowing never happens at the minimum") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SimConfig cfg;
        cfg.params = table1_truth(seed % 2 == 0 ? 1 : 2);
        cfg.n_events = 5000;
        cfg.seed = seed;
        cfg.jumps = JumpSource::sample_table();
        const auto res = simulate(cfg);
        CHECK_NOTHROW(validate(res.stream));
        CHECK(res.stream.events.size() == 5000);
        CHECK(res.suppressed_at_minimum == 0);
        MarketState prev = res.stream.initial_state;
        double t = 0.0;
        for (const auto& e : res.stream.events) {
            CHECK(e.t > t);
            t = e.t;
            if (prev.level() == 0) CHECK(is_widening(e.kind));
            CHECK(e.state_after.level() >= 0);
            prev = e.state_after;
        }
        CHECK(res.stream.session_end == res.stream.events.back().t);
    }
}

TEST_CASE("horizon stopping rule") {
    SimConfig cfg;
    cfg.params = table1_truth(1);
    cfg.horizon = 500.0;
    const auto st = simulate(cfg).stream;
    CHECK(st.session_end == 500.0);
    CHECK(st.events.back().t <= 500.0);
    CHECK_FALSE(st.events.empty());

    SimConfig both = cfg;
    both.n_events = 10;
    CHECK_THROWS_AS((void)simulate(both), std::invalid_argument);
}

TEST_CASE("same seed, same stream") {
    SimConfig cfg;
    cfg.params = table1_truth(1);
    cfg.n_events = 3000;
    cfg.seed = 42;
    const auto a = simulate(cfg).stream;
    const auto b = simulate(cfg).stream;
    CHECK(a == b);
    cfg.seed = 43;
    CHECK_FALSE(simulate(cfg).stream == a);
}

TEST_CASE("every variant simulates a valid stream") {
    for (ModelVariant v : {ModelVariant::BasicHawkes, ModelVariant::ExtendedI, ModelVariant::ExtendedII,
                           ModelVariant::ExtendedIII, ModelVariant::ExtendedIV, ModelVariant::ExtendedV,
                           ModelVariant::ConstantBase}) {
        CAPTURE(to_string(v));
        SimConfig cfg;
        ParamSet p = embed_proposed(table1_truth(1), v);
        if (v == ModelVariant::BasicHawkes) {
            for (auto& row : p.alpha) row.fill(2.0);
        }
        if (v == ModelVariant::ConstantBase) p.eta = 0.5;
        cfg.params = p;
        cfg.variant = v;
        cfg.n_events = 2000;
        const auto res = simulate(cfg);
        CHECK_NOTHROW(validate(res.stream));
    }
}

TEST_CASE("explosion guard") {
    ParamSet p = table1_truth(1);
    p.alpha_s1 = 60.0;  // self-excitation above beta
    SimConfig cfg;
    cfg.params = p;
    cfg.horizon = 1e6;
    cfg.max_events = 20000;
    CHECK_THROWS_AS((void)simulate(cfg), SimulationError);
}

TEST_CASE("jump tables") {
    const JumpDistribution d({1, 2}, {0.25, 0.75});
    CHECK(d.mean() == doctest::Approx(1.75));
    Rng rng(1);
    int twos = 0;
    for (int k = 0; k < 4000; ++k) twos += d.sample(rng) == 2 ? 1 : 0;
    CHECK(twos == doctest::Approx(3000).epsilon(0.05));
    CHECK_THROWS_AS(JumpDistribution({1, 2}, {0.5, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(JumpDistribution({0}, {1.0}), std::invalid_argument);

    const auto path = std::filesystem::temp_directory_path() / "spreadhawkes_jumps.csv";
    {
        std::ofstream out(path);
        out << "kind,size,probability\nask_up,2,1.0\nask_down,1,0.5\nask_down,3,0.5\n";
    }
    const auto src = JumpSource::load(path);
    CHECK(src.per_kind[0].sizes() == std::vector<std::int64_t>{2});
    CHECK(src.per_kind[1].sizes() == std::vector<std::int64_t>{1, 3});
    CHECK(src.per_kind[2].sizes() == std::vector<std::int64_t>{1});
    std::filesystem::remove(path);
}

TEST_CASE("spread-only chain without excitement: stationary mean mu / eta") {
    ParamSet p;
    p.mu = 0.3;
    p.eta = 0.1;
    p.beta = 1.0;
    // Truncated birth-death chain, births 2 mu, deaths 2 eta k.
    const int cap = 200;
    std::vector<double> pi(cap + 1, 0.0);
    pi[0] = 1.0;
    for (int k = 1; k <= cap; ++k) pi[k] = pi[k - 1] * (2.0 * p.mu) / (2.0 * p.eta * k);
    double z = 0.0;
    double m = 0.0;
    for (int k = 0; k <= cap; ++k) {
        z += pi[k];
        m += k * pi[k];
    }
    const double oracle = m / z;
    CHECK(oracle == doctest::Approx(3.0).epsilon(1e-9));

    SpreadConfig cfg;
    cfg.params = p;
    cfg.horizon = 2e5;
    cfg.seed = 3;
    const auto path = simulate_spread_only(cfg);
    CHECK(path.time_average_level() == doctest::Approx(oracle).epsilon(0.03));
    CHECK(path.up_rate() == doctest::Approx(2.0 * p.mu).epsilon(0.03));
    CHECK(path.down_rate() == doctest::Approx(2.0 * p.mu).epsilon(0.03));
    for (auto level : path.level_after) CHECK(level >= 0);
}
